use std::collections::BTreeSet;
use std::fmt;

use crate::logic::PositiveLtl;
use crate::model::{within, StateId, TransitionSystem};

/// Remaining obligation as a disjunction of clauses, each a conjunction of
/// temporal literals (atoms, approximate atoms, `X` and `U` subformulas).
/// Clauses that contain another clause are dropped, so the form is canonical.
/// `{{}}` is true and `{}` is false.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Residual(BTreeSet<BTreeSet<PositiveLtl>>);

impl Residual {
    pub fn tt() -> Self {
        Residual(BTreeSet::from([BTreeSet::new()]))
    }

    pub fn ff() -> Self {
        Residual(BTreeSet::new())
    }

    pub fn literal(f: PositiveLtl) -> Self {
        Residual(BTreeSet::from([BTreeSet::from([f])]))
    }

    pub fn is_true(&self) -> bool {
        self.0.contains(&BTreeSet::new())
    }

    pub fn is_false(&self) -> bool {
        self.0.is_empty()
    }

    pub fn clauses(&self) -> &BTreeSet<BTreeSet<PositiveLtl>> {
        &self.0
    }

    fn minimized(clauses: BTreeSet<BTreeSet<PositiveLtl>>) -> Self {
        let keep = clauses
            .iter()
            .filter(|c| !clauses.iter().any(|d| d != *c && d.is_subset(c)))
            .cloned()
            .collect();
        Residual(keep)
    }

    pub fn or(&self, other: &Residual) -> Residual {
        Self::minimized(self.0.union(&other.0).cloned().collect())
    }

    pub fn and(&self, other: &Residual) -> Residual {
        let mut out = BTreeSet::new();
        for a in &self.0 {
            for b in &other.0 {
                out.insert(a.union(b).cloned().collect());
            }
        }
        Self::minimized(out)
    }

    /// The formula as a residual, without consuming any state: boolean
    /// structure is normalized and temporal subformulas become literals.
    pub fn of_formula(f: &PositiveLtl) -> Residual {
        match f {
            PositiveLtl::Or(a, b) => Self::of_formula(a).or(&Self::of_formula(b)),
            PositiveLtl::And(a, b) => Self::of_formula(a).and(&Self::of_formula(b)),
            other => Self::literal(other.clone()),
        }
    }
}

impl fmt::Display for Residual {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_false() {
            return f.write_str("false");
        }
        if self.is_true() {
            return f.write_str("true");
        }
        let multi = self.0.len() > 1;
        for (i, clause) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(" | ")?;
            }
            let group = multi && clause.len() > 1;
            if group {
                f.write_str("(")?;
            }
            for (j, lit) in clause.iter().enumerate() {
                if j > 0 {
                    f.write_str(" & ")?;
                }
                match lit {
                    PositiveLtl::Atom(_) | PositiveLtl::Diamond(..) | PositiveLtl::Next(_) => write!(f, "{lit}")?,
                    _ => write!(f, "({lit})")?,
                }
            }
            if group {
                f.write_str(")")?;
            }
        }
        Ok(())
    }
}

/// Obligation left for the rest of the trace after reading state `q`.
pub fn progress<S: TransitionSystem + ?Sized>(f: &PositiveLtl, sys: &S, q: StateId) -> Residual {
    let space = sys.space();
    let obs = sys.observation(q);
    let holds = |b: bool| if b { Residual::tt() } else { Residual::ff() };
    match f {
        PositiveLtl::Atom(p) => holds(space.index_of(p) == Some(obs)),
        PositiveLtl::Diamond(e, p) => holds(space.index_of(p).is_some_and(|o| within(space.distance(o, obs), e.value()))),
        PositiveLtl::Or(a, b) => progress(a, sys, q).or(&progress(b, sys, q)),
        PositiveLtl::And(a, b) => progress(a, sys, q).and(&progress(b, sys, q)),
        PositiveLtl::Next(x) => Residual::of_formula(x),
        PositiveLtl::Until(a, b) => progress(b, sys, q).or(&progress(a, sys, q).and(&Residual::literal(f.clone()))),
    }
}

/// Progresses every literal of a residual through state `q`.
pub fn progress_residual<S: TransitionSystem + ?Sized>(r: &Residual, sys: &S, q: StateId) -> Residual {
    let mut out = Residual::ff();
    for clause in r.clauses() {
        let mut acc = Residual::tt();
        for lit in clause {
            acc = acc.and(&progress(lit, sys, q));
            if acc.is_false() {
                break;
            }
        }
        out = out.or(&acc);
        if out.is_true() {
            break;
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::tests::example_one;

    #[test]
    fn progression_examples() {
        let t = example_one();
        assert!(progress(&PositiveLtl::atom("p1"), &t, 0).is_true());
        assert!(progress(&PositiveLtl::atom("p2"), &t, 0).is_false());
        assert_eq!(
            progress(&PositiveLtl::next(PositiveLtl::atom("p2")), &t, 1),
            Residual::literal(PositiveLtl::atom("p2"))
        );
        let u = PositiveLtl::until(PositiveLtl::atom("p1"), PositiveLtl::atom("p3"));
        assert_eq!(progress(&u, &t, 0), Residual::literal(u.clone()));
        assert!(progress(&u, &t, 2).is_true());
        assert!(progress(&u, &t, 1).is_false());
        assert!(progress(&PositiveLtl::diamond(1.0, "p2"), &t, 0).is_true());
    }

    #[test]
    fn subsumption_and_display() {
        let a = Residual::literal(PositiveLtl::atom("a"));
        let b = Residual::literal(PositiveLtl::atom("b"));
        let r = a.or(&a.and(&b));
        assert_eq!(r, a);
        assert_eq!(a.or(&Residual::tt()), Residual::tt());
        assert_eq!(a.and(&Residual::ff()), Residual::ff());
        assert_eq!(a.and(&b).or(&Residual::literal(PositiveLtl::atom("c"))).to_string(), "(a & b) | c");
    }
}
