//! Formulas, ranks, and satisfaction checking.

mod bounded;
mod exact;
mod formula;
mod lasso_eval;

use serde::Serialize;

pub use bounded::eval_bounded;
pub use exact::{core_path, eval_state, CorePath, ExactChecker};
pub(crate) use exact::CoalitionMoves;
pub(crate) use formula::is_plain_ident;
pub use formula::{Eps, PathFormula, PositiveLtl, StateFormula};
pub use lasso_eval::{eval_lasso, eval_lasso_ltl};

use crate::error::{Error, Result};

/// Three-valued verdict of the bounded checker.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    True,
    False,
    Unknown,
}

impl Verdict {
    pub fn from_bool(b: bool) -> Self {
        if b {
            Verdict::True
        } else {
            Verdict::False
        }
    }

    pub fn definite(self) -> Option<bool> {
        match self {
            Verdict::True => Some(true),
            Verdict::False => Some(false),
            Verdict::Unknown => None,
        }
    }

    pub fn not(self) -> Self {
        match self {
            Verdict::True => Verdict::False,
            Verdict::False => Verdict::True,
            Verdict::Unknown => Verdict::Unknown,
        }
    }

    pub fn and(self, other: Self) -> Self {
        match (self, other) {
            (Verdict::False, _) | (_, Verdict::False) => Verdict::False,
            (Verdict::True, Verdict::True) => Verdict::True,
            _ => Verdict::Unknown,
        }
    }

    pub fn or(self, other: Self) -> Self {
        self.not().and(other.not()).not()
    }
}

impl std::fmt::Display for Verdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Verdict::True => "true",
            Verdict::False => "false",
            Verdict::Unknown => "unknown",
        })
    }
}

/// Rank of a state formula. Atoms have rank 1.
pub fn rank_s(f: &StateFormula) -> usize {
    match f {
        StateFormula::Atom(_) | StateFormula::Diamond(..) => 1,
        StateFormula::Not(x) => rank_s(x) + 1,
        StateFormula::And(a, b) => rank_s(a).max(rank_s(b)) + 1,
        StateFormula::Coalition(_, p) => rank_p(p) + 1,
    }
}

/// Rank of a path formula. A lifted state formula ranks one above itself,
/// so the rank does not depend on how far boolean structure is lifted.
pub fn rank_p(f: &PathFormula) -> usize {
    match f {
        PathFormula::State(s) => rank_s(s) + 1,
        PathFormula::Not(x) | PathFormula::Next(x) => rank_p(x) + 1,
        PathFormula::And(a, b) | PathFormula::Until(a, b) => rank_p(a).max(rank_p(b)) + 1,
    }
}

/// Replaces every atom `p` by `<eps> p`. Fails on approximate atoms.
pub fn tr_epsilon(f: &PositiveLtl, eps: f64) -> Result<PositiveLtl> {
    if !eps.is_finite() || eps < 0.0 {
        return Err(Error::input(format!("radius must be a finite nonnegative number, got {eps}")));
    }
    fn go(f: &PositiveLtl, eps: f64) -> Result<PositiveLtl> {
        Ok(match f {
            PositiveLtl::Atom(p) => PositiveLtl::diamond(eps, p.clone()),
            PositiveLtl::Diamond(e, p) => {
                return Err(Error::input(format!(
                    "translation expects a formula without approximate atoms, found <{e}> {p}"
                )))
            }
            PositiveLtl::Or(a, b) => PositiveLtl::or(go(a, eps)?, go(b, eps)?),
            PositiveLtl::And(a, b) => PositiveLtl::and(go(a, eps)?, go(b, eps)?),
            PositiveLtl::Next(x) => PositiveLtl::next(go(x, eps)?),
            PositiveLtl::Until(a, b) => PositiveLtl::until(go(a, eps)?, go(b, eps)?),
        })
    }
    go(f, eps)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::tests::{example_one, matrix_game};
    use crate::model::{AgentSet, Lasso};

    fn x(f: PathFormula) -> PathFormula {
        PathFormula::next(f)
    }

    #[test]
    fn ranks_of_small_formulas() {
        let p = StateFormula::atom("p");
        assert_eq!(rank_s(&p), 1);
        assert_eq!(rank_s(&StateFormula::not(p.clone())), 2);
        let cx = StateFormula::coalition(AgentSet::new([1]), x(PathFormula::atom("p")));
        assert_eq!(rank_s(&cx), 4);
        assert_eq!(rank_s(&StateFormula::diamond(0.5, "p")), 1);
    }

    #[test]
    fn rank_ignores_lifting() {
        let a = PathFormula::atom("a");
        let b = PathFormula::atom("b");
        let lifted = PathFormula::and(a.clone(), b.clone());
        let unlifted = PathFormula::And(Box::new(a), Box::new(b));
        assert_eq!(rank_p(&lifted), rank_p(&unlifted));
    }

    #[test]
    fn translation_replaces_atoms() {
        let f = PositiveLtl::next(PositiveLtl::and(PositiveLtl::atom("p"), PositiveLtl::atom("q")));
        let g = tr_epsilon(&f, 0.5).unwrap();
        assert_eq!(
            g,
            PositiveLtl::next(PositiveLtl::and(PositiveLtl::diamond(0.5, "p"), PositiveLtl::diamond(0.5, "q")))
        );
        let u = PositiveLtl::until(PositiveLtl::atom("p"), PositiveLtl::atom("q"));
        assert_eq!(
            tr_epsilon(&u, 1.0).unwrap(),
            PositiveLtl::until(PositiveLtl::diamond(1.0, "p"), PositiveLtl::diamond(1.0, "q"))
        );
        assert!(tr_epsilon(&g, 0.5).is_err());
    }

    #[test]
    fn example_one_exact_checks() {
        let t = example_one();
        assert!(eval_state(&t, 0, &StateFormula::diamond(1.0, "p2"), 1.0).unwrap());
        assert!(!eval_state(&t, 0, &StateFormula::diamond(1.0, "p3"), 1.0).unwrap());
        let f = StateFormula::coalition(AgentSet::new([1]), x(PathFormula::atom("p1")));
        assert!(eval_state(&t, 0, &f, 0.0).unwrap());
        let mismatch = StateFormula::diamond(0.5, "p1");
        assert!(matches!(eval_state(&t, 0, &mismatch, 1.0), Err(Error::Input(_))));
        let unknown = StateFormula::atom("zz");
        assert!(matches!(eval_state(&t, 0, &unknown, 1.0), Err(Error::Input(_))));
    }

    #[test]
    fn cooperation_needed_for_goal() {
        let t = matrix_game();
        let truth = PathFormula::or(PathFormula::atom("p1"), PathFormula::not(PathFormula::atom("p1")));
        let goal = PathFormula::until(truth, PathFormula::atom("p2"));
        let solo = StateFormula::coalition(AgentSet::new([1]), goal.clone());
        let both = StateFormula::coalition(AgentSet::new([1, 2]), goal);
        assert!(!eval_state(&t, 0, &solo, 0.0).unwrap());
        assert!(eval_state(&t, 0, &both, 0.0).unwrap());
    }

    #[test]
    fn outside_core_is_unsupported() {
        let t = example_one();
        let f = StateFormula::coalition(AgentSet::new([1]), x(x(PathFormula::atom("p1"))));
        assert!(matches!(eval_state(&t, 0, &f, 0.0), Err(Error::UnsupportedExact(_))));
        assert_eq!(eval_bounded(&t, 0, &f, 3, 0.0).unwrap(), Verdict::True);
    }

    #[test]
    fn release_and_negated_next() {
        let t = matrix_game();
        // agent 1 keeps the play inside p1 by choosing the first row
        let stay = PathFormula::release(
            PathFormula::not(PathFormula::or(PathFormula::atom("p1"), PathFormula::atom("p2"))),
            PathFormula::atom("p1"),
        );
        let f = StateFormula::coalition(AgentSet::new([1]), stay);
        assert!(eval_state(&t, 0, &f, 0.0).unwrap());
        let g = StateFormula::coalition(AgentSet::new([2]), PathFormula::not(x(PathFormula::atom("p2"))));
        assert!(eval_state(&t, 0, &g, 0.0).unwrap());
        let h = StateFormula::coalition(AgentSet::new([1, 2]), PathFormula::not(x(PathFormula::atom("p1"))));
        assert!(eval_state(&t, 0, &h, 0.0).unwrap());
    }

    #[test]
    fn witness_strategy_reaches_goal() {
        let t = matrix_game();
        let f = StateFormula::coalition(AgentSet::new([1, 2]), x(PathFormula::atom("p2")));
        let mut ck = ExactChecker::new(&t, 0.0);
        let w = ck.witness(&f).unwrap().unwrap();
        let chosen = w.choice(0, 0).unwrap();
        assert_eq!(chosen.iter().copied().collect::<Vec<_>>(), vec![4]);
    }

    #[test]
    fn bounded_examples() {
        let t = example_one();
        let f = StateFormula::coalition(
            AgentSet::new([1]),
            PathFormula::until(PathFormula::atom("p2"), PathFormula::atom("p1")),
        );
        assert_eq!(eval_bounded(&t, 0, &f, 1, 0.0).unwrap(), Verdict::True);
        assert!(eval_bounded(&t, 0, &f, 0, 0.0).is_err());
        let g = StateFormula::coalition(
            AgentSet::new([1]),
            PathFormula::until(PathFormula::atom("p1"), PathFormula::atom("p2")),
        );
        assert_eq!(eval_bounded(&t, 0, &g, 4, 0.0).unwrap(), Verdict::Unknown);
        let nx = StateFormula::coalition(AgentSet::new([1]), x(PathFormula::atom("p2")));
        assert_eq!(eval_bounded(&t, 0, &nx, 1, 0.0).unwrap(), Verdict::Unknown);
        assert_eq!(eval_bounded(&t, 0, &nx, 2, 0.0).unwrap(), Verdict::False);
    }

    #[test]
    fn lasso_examples() {
        let t = example_one();
        let l = Lasso::new(vec![], vec![0]).unwrap();
        let u = PathFormula::until(PathFormula::atom("p2"), PathFormula::atom("p1"));
        assert!(eval_lasso(&t, &l, &u, 0.0).unwrap());
        assert!(!eval_lasso(&t, &l, &x(PathFormula::atom("p2")), 0.0).unwrap());
        let ltl = PositiveLtl::next(PositiveLtl::diamond(1.0, "p2"));
        assert!(eval_lasso_ltl(&t, &l, &ltl).unwrap());
        let bad = Lasso::new(vec![0], vec![1]).unwrap();
        assert!(matches!(eval_lasso(&t, &bad, &u, 0.0), Err(Error::InvalidLasso(_))));
    }

    #[test]
    fn exact_atom_equals_zero_radius_diamond() {
        let t = matrix_game();
        for q in 0..5 {
            for p in ["p1", "p2"] {
                assert_eq!(
                    eval_state(&t, q, &StateFormula::atom(p), 0.0).unwrap(),
                    eval_state(&t, q, &StateFormula::diamond(0.0, p), 0.0).unwrap()
                );
            }
        }
    }
}
