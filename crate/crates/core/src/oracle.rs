//! Brute-force reference implementations. They share types with the main
//! algorithms but none of their code, and are meant for small inputs only.

use std::collections::{BTreeSet, HashMap};

use crate::error::{Error, Result};
use crate::logic::{Eps, PathFormula, PositiveLtl, StateFormula, Verdict};
use crate::model::{within, AgentAts, AgentSet, LabelAts, Lasso, StateId, StateSet, TransitionSystem};

/// Largest `|S1| * |S2|` accepted by the relation enumerators.
pub const ENUM_BISIM_CAP: usize = 12;
/// Largest memo table of the strategy enumerator.
pub const ENUM_STRATEGIES_CAP: usize = 1_000_000;
/// Default search horizon of the strategy enumerator.
pub const ENUM_STRATEGIES_HORIZON: usize = 200;

/// Every intersection `Q_{a1} ∩ ... ∩ Q_{an}` for one set per agent.
fn selections(sys: &AgentAts, q: StateId, agents: &[u32]) -> Vec<StateSet> {
    let all: StateSet = (0..sys.num_states()).collect();
    let mut out = Vec::new();
    let lists: Vec<&[StateSet]> = agents.iter().map(|&a| sys.choices(q, a)).collect();
    if lists.iter().any(|l| l.is_empty()) {
        return out;
    }
    let mut idx = vec![0usize; lists.len()];
    loop {
        let mut meet = all.clone();
        for (l, &i) in lists.iter().zip(&idx) {
            meet = meet.intersection(&l[i]).copied().collect();
        }
        out.push(meet);
        let mut pos = 0;
        loop {
            if pos == idx.len() {
                return out;
            }
            idx[pos] += 1;
            if idx[pos] < lists[pos].len() {
                break;
            }
            idx[pos] = 0;
            pos += 1;
        }
    }
}

fn split(sys: &AgentAts, ag: &AgentSet) -> (Vec<u32>, Vec<u32>) {
    let ours: Vec<u32> = ag.iter().collect();
    let theirs: Vec<u32> = sys.agents().iter().filter(|a| !ag.contains(*a)).collect();
    (ours, theirs)
}

fn cap_check(n1: usize, n2: usize) -> Result<()> {
    if n1 * n2 > ENUM_BISIM_CAP {
        return Err(Error::CapExceeded(format!(
            "relation enumeration needs |S1|*|S2| <= {ENUM_BISIM_CAP}, got {}",
            n1 * n2
        )));
    }
    Ok(())
}

/// Union of all relations that satisfy the approximate alternating
/// bisimulation conditions, by checking every subset of `S1 x S2`.
pub fn enum_bisim_agent(t1: &AgentAts, t2: &AgentAts, ag: &AgentSet, eps: f64) -> Result<BTreeSet<(StateId, StateId)>> {
    let (n1, n2) = (t1.num_states(), t2.num_states());
    cap_check(n1, n2)?;
    let (o1, c1) = split(t1, ag);
    let (o2, c2) = split(t2, ag);
    let h1: Vec<(Vec<StateSet>, Vec<StateSet>)> =
        (0..n1).map(|q| (selections(t1, q, &o1), selections(t1, q, &c1))).collect();
    let h2: Vec<(Vec<StateSet>, Vec<StateSet>)> =
        (0..n2).map(|q| (selections(t2, q, &o2), selections(t2, q, &c2))).collect();
    let space = t1.space();
    let in_rel = |mask: u32, a: StateId, b: StateId| mask & (1 << (a * n2 + b)) != 0;
    let product_in = |mask: u32, x: &StateSet, y: &StateSet| x.iter().all(|&a| y.iter().all(|&b| in_rel(mask, a, b)));
    let meet = |x: &StateSet, y: &StateSet| -> StateSet { x.intersection(y).copied().collect() };
    let is_bisim = |mask: u32| {
        (0..n1).all(|a| {
            (0..n2).all(|b| {
                if !in_rel(mask, a, b) {
                    return true;
                }
                let close = within(space.distance(t1.observation(a), t2.observation(b)), eps);
                let forth = h1[a].0.iter().all(|q1| {
                    h2[b].0.iter().any(|q2| {
                        h2[b].1.iter().all(|q2c| {
                            h1[a].1.iter().any(|q1c| product_in(mask, &meet(q1, q1c), &meet(q2, q2c)))
                        })
                    })
                });
                let back = h2[b].0.iter().all(|q2| {
                    h1[a].0.iter().any(|q1| {
                        h1[a].1.iter().all(|q1c| {
                            h2[b].1.iter().any(|q2c| product_in(mask, &meet(q1, q1c), &meet(q2, q2c)))
                        })
                    })
                });
                close && forth && back
            })
        })
    };
    let mut union = 0u32;
    for mask in 0..(1u32 << (n1 * n2)) {
        if mask & !union != 0 && is_bisim(mask) {
            union |= mask;
        }
    }
    Ok(unmask(union, n1, n2))
}

fn unmask(mask: u32, n1: usize, n2: usize) -> BTreeSet<(StateId, StateId)> {
    (0..n1)
        .flat_map(|a| (0..n2).map(move |b| (a, b)))
        .filter(|&(a, b)| mask & (1 << (a * n2 + b)) != 0)
        .collect()
}

/// Union of all alternating approximate bisimulations between labeled
/// systems, by checking every subset of `S1 x S2`.
pub fn enum_bisim_label(t1: &LabelAts, t2: &LabelAts, eps: f64) -> Result<BTreeSet<(StateId, StateId)>> {
    let (n1, n2) = (t1.num_states(), t2.num_states());
    cap_check(n1, n2)?;
    let space = t1.space();
    let in_rel = |mask: u32, a: StateId, b: StateId| mask & (1 << (a * n2 + b)) != 0;
    let (na1, nb1) = (t1.controls().len(), t1.disturbances().len());
    let (na2, nb2) = (t2.controls().len(), t2.disturbances().len());
    let is_bisim = |mask: u32| {
        (0..n1).all(|q1| {
            (0..n2).all(|q2| {
                if !in_rel(mask, q1, q2) {
                    return true;
                }
                let close = within(space.distance(t1.observation(q1), t2.observation(q2)), eps);
                let forth = (0..na1).all(|a1| {
                    (0..na2).any(|a2| {
                        (0..nb2).all(|b2| {
                            (0..n2).filter(|&s2| t2.post(q2, a2, b2).contains(&s2)).all(|s2| {
                                (0..nb1).any(|b1| {
                                    (0..n1).any(|s1| t1.post(q1, a1, b1).contains(&s1) && in_rel(mask, s1, s2))
                                })
                            })
                        })
                    })
                });
                let back = (0..na2).all(|a2| {
                    (0..na1).any(|a1| {
                        (0..nb1).all(|b1| {
                            (0..n1).filter(|&s1| t1.post(q1, a1, b1).contains(&s1)).all(|s1| {
                                (0..nb2).any(|b2| {
                                    (0..n2).any(|s2| t2.post(q2, a2, b2).contains(&s2) && in_rel(mask, s1, s2))
                                })
                            })
                        })
                    })
                });
                close && forth && back
            })
        })
    };
    let mut union = 0u32;
    for mask in 0..(1u32 << (n1 * n2)) {
        if mask & !union != 0 && is_bisim(mask) {
            union |= mask;
        }
    }
    Ok(unmask(union, n1, n2))
}

fn ltl_subformula_count(f: &PositiveLtl) -> usize {
    let mut seen = BTreeSet::new();
    fn walk<'a>(f: &'a PositiveLtl, seen: &mut BTreeSet<&'a PositiveLtl>) {
        seen.insert(f);
        match f {
            PositiveLtl::Atom(_) | PositiveLtl::Diamond(..) => {}
            PositiveLtl::Next(x) => walk(x, seen),
            PositiveLtl::Or(a, b) | PositiveLtl::And(a, b) | PositiveLtl::Until(a, b) => {
                walk(a, seen);
                walk(b, seen);
            }
        }
    }
    walk(f, &mut seen);
    seen.len()
}

/// Smallest unrolling length accepted by [`unroll_eval`].
pub fn unroll_length(lasso: &Lasso, f: &PositiveLtl) -> usize {
    lasso.prefix().len() + lasso.cycle().len() * (1 + ltl_subformula_count(f))
}

/// Truth of `f` on the first `n` states of the lasso's word, reading `X`
/// past the end and unwitnessed `U` as false.
pub fn unroll_eval<S: TransitionSystem + ?Sized>(sys: &S, lasso: &Lasso, f: &PositiveLtl, n: usize) -> Result<bool> {
    let need = unroll_length(lasso, f);
    if n < need {
        return Err(Error::input(format!("unrolling length {n} is below the required {need}")));
    }
    let word: Vec<StateId> = (0..n).map(|k| lasso.unrolled(k)).collect();
    fn sat<S: TransitionSystem + ?Sized>(sys: &S, w: &[StateId], f: &PositiveLtl, i: usize) -> bool {
        let space = sys.space();
        match f {
            PositiveLtl::Atom(p) => space.index_of(p) == Some(sys.observation(w[i])),
            PositiveLtl::Diamond(e, p) => space
                .index_of(p)
                .is_some_and(|o| within(space.distance(o, sys.observation(w[i])), e.value())),
            PositiveLtl::Or(a, b) => sat(sys, w, a, i) || sat(sys, w, b, i),
            PositiveLtl::And(a, b) => sat(sys, w, a, i) && sat(sys, w, b, i),
            PositiveLtl::Next(x) => i + 1 < w.len() && sat(sys, w, x, i + 1),
            PositiveLtl::Until(a, b) => (i..w.len()).any(|j| sat(sys, w, b, j) && (i..j).all(|k| sat(sys, w, a, k))),
        }
    }
    Ok(sat(sys, &word, f, 0))
}

fn kleene_and(a: Verdict, b: Verdict) -> Verdict {
    match (a, b) {
        (Verdict::False, _) | (_, Verdict::False) => Verdict::False,
        (Verdict::True, Verdict::True) => Verdict::True,
        _ => Verdict::Unknown,
    }
}

fn kleene_or(a: Verdict, b: Verdict) -> Verdict {
    match (a, b) {
        (Verdict::True, _) | (_, Verdict::True) => Verdict::True,
        (Verdict::False, Verdict::False) => Verdict::False,
        _ => Verdict::Unknown,
    }
}

fn kleene_not(a: Verdict) -> Verdict {
    match a {
        Verdict::True => Verdict::False,
        Verdict::False => Verdict::True,
        Verdict::Unknown => Verdict::Unknown,
    }
}

/// Bounded three-valued check by plain game-tree recursion: the coalition
/// maximizes and the opponents minimize the Kleene value of the path
/// formula on each `k`-state prefix.
pub fn bounded_game(sys: &AgentAts, q: StateId, f: &StateFormula, k: usize) -> Verdict {
    let space = sys.space();
    match f {
        StateFormula::Atom(p) => Verdict::from_bool(space.index_of(p) == Some(sys.observation(q))),
        StateFormula::Diamond(e, p) => Verdict::from_bool(
            space
                .index_of(p)
                .is_some_and(|o| within(space.distance(o, sys.observation(q)), e.value())),
        ),
        StateFormula::Not(x) => kleene_not(bounded_game(sys, q, x, k)),
        StateFormula::And(a, b) => kleene_and(bounded_game(sys, q, a, k), bounded_game(sys, q, b, k)),
        StateFormula::Coalition(ag, path) => {
            let (ours, theirs) = split(sys, ag);
            game_value(sys, &ours, &theirs, path, &mut vec![q], k)
        }
    }
}

fn game_value(sys: &AgentAts, ours: &[u32], theirs: &[u32], path: &PathFormula, h: &mut Vec<StateId>, k: usize) -> Verdict {
    if h.len() >= k {
        return prefix_value(sys, path, h, 0, k);
    }
    let q = *h.last().expect("nonempty history");
    let mut best = Verdict::False;
    for mine in selections(sys, q, ours) {
        let mut worst = Verdict::True;
        for other in selections(sys, q, theirs) {
            for &s in mine.intersection(&other) {
                h.push(s);
                worst = kleene_and(worst, game_value(sys, ours, theirs, path, h, k));
                h.pop();
            }
        }
        best = kleene_or(best, worst);
    }
    best
}

fn prefix_value(sys: &AgentAts, path: &PathFormula, w: &[StateId], i: usize, k: usize) -> Verdict {
    match path {
        PathFormula::State(s) => bounded_game(sys, w[i], s, k),
        PathFormula::Not(x) => kleene_not(prefix_value(sys, x, w, i, k)),
        PathFormula::And(a, b) => kleene_and(prefix_value(sys, a, w, i, k), prefix_value(sys, b, w, i, k)),
        PathFormula::Next(x) => {
            if i + 1 < w.len() {
                prefix_value(sys, x, w, i + 1, k)
            } else {
                Verdict::Unknown
            }
        }
        PathFormula::Until(a, b) => {
            // true: some b-position with a everywhere before it
            let witnessed = (i..w.len()).any(|j| {
                prefix_value(sys, b, w, j, k) == Verdict::True
                    && (i..j).all(|m| prefix_value(sys, a, w, m, k) == Verdict::True)
            });
            // false: a fails at some position and b fails up to and including it
            let refuted = (i..w.len()).any(|m| {
                prefix_value(sys, a, w, m, k) == Verdict::False
                    && (i..=m).all(|j| prefix_value(sys, b, w, j, k) == Verdict::False)
            });
            if witnessed {
                Verdict::True
            } else if refuted {
                Verdict::False
            } else {
                Verdict::Unknown
            }
        }
    }
}

/// Obligation tree used by the strategy enumerator.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
enum Obl {
    True,
    False,
    Atom(String),
    Near(Eps, String),
    And(Vec<Obl>),
    Or(Vec<Obl>),
    Next(Box<Obl>),
    Until(Box<Obl>, Box<Obl>),
}

impl Obl {
    fn from(f: &PositiveLtl) -> Obl {
        match f {
            PositiveLtl::Atom(p) => Obl::Atom(p.clone()),
            PositiveLtl::Diamond(e, p) => Obl::Near(*e, p.clone()),
            PositiveLtl::And(a, b) => Obl::and(vec![Obl::from(a), Obl::from(b)]),
            PositiveLtl::Or(a, b) => Obl::or(vec![Obl::from(a), Obl::from(b)]),
            PositiveLtl::Next(x) => Obl::Next(Box::new(Obl::from(x))),
            PositiveLtl::Until(a, b) => Obl::Until(Box::new(Obl::from(a)), Box::new(Obl::from(b))),
        }
    }

    fn and(xs: Vec<Obl>) -> Obl {
        let mut flat = BTreeSet::new();
        for x in xs {
            match x {
                Obl::True => {}
                Obl::False => return Obl::False,
                Obl::And(ys) => flat.extend(ys),
                other => {
                    flat.insert(other);
                }
            }
        }
        match flat.len() {
            0 => Obl::True,
            1 => flat.into_iter().next().expect("one element"),
            _ => Obl::And(flat.into_iter().collect()),
        }
    }

    fn or(xs: Vec<Obl>) -> Obl {
        let mut flat = BTreeSet::new();
        for x in xs {
            match x {
                Obl::False => {}
                Obl::True => return Obl::True,
                Obl::Or(ys) => flat.extend(ys),
                other => {
                    flat.insert(other);
                }
            }
        }
        match flat.len() {
            0 => Obl::False,
            1 => flat.into_iter().next().expect("one element"),
            _ => Obl::Or(flat.into_iter().collect()),
        }
    }

    /// Obligation after reading a state with observation `obs`.
    fn step(&self, sys: &LabelAts, obs: usize) -> Obl {
        let space = sys.space();
        match self {
            Obl::True | Obl::False => self.clone(),
            Obl::Atom(p) => {
                if space.index_of(p) == Some(obs) {
                    Obl::True
                } else {
                    Obl::False
                }
            }
            Obl::Near(e, p) => {
                if space.index_of(p).is_some_and(|o| within(space.distance(o, obs), e.value())) {
                    Obl::True
                } else {
                    Obl::False
                }
            }
            Obl::And(xs) => Obl::and(xs.iter().map(|x| x.step(sys, obs)).collect()),
            Obl::Or(xs) => Obl::or(xs.iter().map(|x| x.step(sys, obs)).collect()),
            Obl::Next(x) => (**x).clone(),
            Obl::Until(a, b) => Obl::or(vec![b.step(sys, obs), Obl::and(vec![a.step(sys, obs), self.clone()])]),
        }
    }
}

/// Whether some history-dependent control strategy from `q` forces every
/// outcome to satisfy `spec` within `horizon` steps, by forward search over
/// all histories (memoized on state, obligation and remaining depth).
pub fn enum_strategies(sys: &LabelAts, q: StateId, spec: &PositiveLtl, horizon: usize) -> Result<bool> {
    struct Search<'a> {
        sys: &'a LabelAts,
        memo: HashMap<(StateId, Obl, usize), bool>,
    }
    impl Search<'_> {
        fn win(&mut self, q: StateId, o: Obl, depth: usize) -> Result<bool> {
            match o {
                Obl::True => return Ok(true),
                Obl::False => return Ok(false),
                _ if depth == 0 => return Ok(false),
                _ => {}
            }
            let key = (q, o, depth);
            if let Some(&v) = self.memo.get(&key) {
                return Ok(v);
            }
            if self.memo.len() >= ENUM_STRATEGIES_CAP {
                return Err(Error::CapExceeded(format!(
                    "strategy search exceeded {ENUM_STRATEGIES_CAP} memo entries"
                )));
            }
            let o = &key.1;
            let mut any = false;
            for a in 0..self.sys.controls().len() {
                let mut all = true;
                'dist: for b in 0..self.sys.disturbances().len() {
                    for &t in self.sys.post(q, a, b) {
                        let next = o.step(self.sys, self.sys.observation(t));
                        if !self.win(t, next, depth - 1)? {
                            all = false;
                            break 'dist;
                        }
                    }
                }
                if all {
                    any = true;
                    break;
                }
            }
            self.memo.insert(key, any);
            Ok(any)
        }
    }
    if q >= sys.num_states() {
        return Err(Error::input(format!("unknown state index {q}")));
    }
    let first = Obl::from(spec).step(sys, sys.observation(q));
    Search { sys, memo: HashMap::new() }.win(q, first, horizon)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bisim::approx_bisim;
    use crate::logic::eval_lasso_ltl;
    use crate::model::tests::{example_one, matrix_game};

    #[test]
    fn example_one_enumeration_matches_refinement() {
        let t = example_one();
        for eps in [0.0, 1.0, 2.0] {
            let r = approx_bisim(&t, &t, &AgentSet::new([1]), eps).unwrap();
            assert_eq!(enum_bisim_agent(&t, &t, &AgentSet::new([1]), eps).unwrap(), r.relation);
        }
    }

    #[test]
    fn enumeration_cap() {
        let t = matrix_game();
        assert!(matches!(
            enum_bisim_agent(&t, &t, &AgentSet::new([1]), 0.0),
            Err(Error::CapExceeded(_))
        ));
    }

    #[test]
    fn unrolled_until() {
        let t = example_one();
        let l = Lasso::new(vec![], vec![0]).unwrap();
        let u = PositiveLtl::until(PositiveLtl::atom("p2"), PositiveLtl::atom("p1"));
        let n = unroll_length(&l, &u);
        assert!(unroll_eval(&t, &l, &u, n).unwrap());
        assert!(unroll_eval(&t, &l, &u, n - 1).is_err());
        let x = PositiveLtl::next(PositiveLtl::atom("p2"));
        assert!(!unroll_eval(&t, &l, &x, 10).unwrap());
        assert_eq!(unroll_eval(&t, &l, &x, 10).unwrap(), eval_lasso_ltl(&t, &l, &x).unwrap());
    }

    #[test]
    fn game_recursion_on_matrix() {
        let t = matrix_game();
        let goal = StateFormula::coalition(
            AgentSet::new([1, 2]),
            PathFormula::next(PathFormula::atom("p2")),
        );
        assert_eq!(bounded_game(&t, 0, &goal, 2), Verdict::True);
        assert_eq!(bounded_game(&t, 0, &goal, 1), Verdict::Unknown);
        let solo = StateFormula::coalition(AgentSet::new([1]), PathFormula::next(PathFormula::atom("p2")));
        assert_eq!(bounded_game(&t, 0, &solo, 2), Verdict::False);
    }
}
