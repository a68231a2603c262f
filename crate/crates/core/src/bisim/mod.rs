//! Greatest (approximate) alternating bisimulations by iterated refinement.

mod distinguish;

use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;

pub use distinguish::{distinguish, distinguish_in, Distinction};

use crate::error::{Error, Result};
use crate::model::{
    within, ActionId, AgentAts, AgentSet, LabelAts, StateId, StateSet, TransitionSystem, Violation,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Reason {
    ObsDistance,
    Forth,
    Back,
}

/// The choice that the other side could not answer.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Witness {
    None,
    Choice(StateSet),
    Action(ActionId),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Refutation {
    /// 0 for pairs excluded by observation distance, otherwise the
    /// refinement round that removed the pair.
    pub round: usize,
    pub reason: Reason,
    pub witness: Witness,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BisimResult {
    pub relation: BTreeSet<(StateId, StateId)>,
    pub epsilon: f64,
    /// `None` for labeled systems.
    pub agents: Option<AgentSet>,
    /// Number of refinement rounds that removed at least one pair.
    pub rounds: usize,
    pub refutations: BTreeMap<(StateId, StateId), Refutation>,
    /// Every state of either system is related to some state of the other.
    pub systems_bisimilar: bool,
}

impl BisimResult {
    pub fn related(&self, q1: StateId, q2: StateId) -> bool {
        self.relation.contains(&(q1, q2))
    }

    /// The relation as it stood before round `k` (pairs removed at round
    /// `k` or later are still present).
    pub fn relation_before(&self, k: usize) -> BTreeSet<(StateId, StateId)> {
        let mut r = self.relation.clone();
        r.extend(
            self.refutations
                .iter()
                .filter(|(_, f)| f.round >= k && f.reason != Reason::ObsDistance)
                .map(|(&p, _)| p),
        );
        r
    }
}

/// Dense relation over `S1 x S2`.
#[derive(Clone)]
pub(crate) struct Matrix {
    n2: usize,
    bits: Vec<bool>,
}

impl Matrix {
    fn new(n1: usize, n2: usize) -> Self {
        Self { n2, bits: vec![false; n1 * n2] }
    }

    pub(crate) fn from_set(n1: usize, n2: usize, set: &BTreeSet<(StateId, StateId)>) -> Self {
        let mut m = Self::new(n1, n2);
        for &(a, b) in set {
            m.set(a, b, true);
        }
        m
    }

    pub(crate) fn get(&self, a: StateId, b: StateId) -> bool {
        self.bits[a * self.n2 + b]
    }

    fn set(&mut self, a: StateId, b: StateId, v: bool) {
        self.bits[a * self.n2 + b] = v;
    }
}

/// Per-state move table for a coalition: `succ[i][j]` is the intersection of
/// the coalition's `i`-th joint choice with the opponents' `j`-th.
pub(crate) struct StateGame {
    pub ours: Vec<StateSet>,
    pub theirs: Vec<StateSet>,
    pub succ: Vec<Vec<Vec<StateId>>>,
}

pub(crate) fn state_games(sys: &AgentAts, ag: &AgentSet) -> Vec<StateGame> {
    let co = sys.complement(ag);
    (0..sys.num_states())
        .map(|q| {
            let ours = sys.joint_choices(q, ag);
            let theirs = sys.joint_choices(q, &co);
            let succ = ours
                .iter()
                .map(|a| theirs.iter().map(|b| a.intersection(b).copied().collect()).collect())
                .collect();
            StateGame { ours, theirs, succ }
        })
        .collect()
}

fn all_in(r: &Matrix, xs: &[StateId], ys: &[StateId]) -> bool {
    xs.iter().all(|&x| ys.iter().all(|&y| r.get(x, y)))
}

/// First coalition choice at `q1` that no choice at `q2` can match, or `None`
/// when the forth condition holds.
pub(crate) fn forth_failure(g1: &StateGame, g2: &StateGame, r: &Matrix) -> Option<usize> {
    (0..g1.ours.len()).find(|&i| {
        !(0..g2.ours.len()).any(|k| {
            (0..g2.theirs.len()).all(|l| (0..g1.theirs.len()).any(|j| all_in(r, &g1.succ[i][j], &g2.succ[k][l])))
        })
    })
}

/// Mirror of [`forth_failure`]: first choice at `q2` that `q1` cannot match.
pub(crate) fn back_failure(g1: &StateGame, g2: &StateGame, r: &Matrix) -> Option<usize> {
    (0..g2.ours.len()).find(|&k| {
        !(0..g1.ours.len()).any(|i| {
            (0..g1.theirs.len()).all(|j| (0..g2.theirs.len()).any(|l| all_in(r, &g1.succ[i][j], &g2.succ[k][l])))
        })
    })
}

fn first_violation(name: &str, v: Vec<Violation>) -> Result<()> {
    match v.first() {
        None => Ok(()),
        Some(x) => Err(Error::input(format!("system `{name}` is invalid: {x}"))),
    }
}

fn check_eps(eps: f64) -> Result<()> {
    if eps >= 0.0 && eps.is_finite() {
        Ok(())
    } else {
        Err(Error::input(format!("radius must be a finite nonnegative number, got {eps}")))
    }
}

pub(crate) fn check_agent_pair(t1: &AgentAts, t2: &AgentAts, ag: &AgentSet) -> Result<()> {
    if !t1.space().same_space(t2.space()) {
        return Err(Error::input("the systems use different observation spaces"));
    }
    if t1.agents() != t2.agents() {
        return Err(Error::input(format!(
            "agent sets differ: {{{}}} vs {{{}}}",
            t1.agents(),
            t2.agents()
        )));
    }
    if !ag.is_subset(t1.agents()) {
        return Err(Error::input(format!(
            "coalition {{{ag}}} is not a subset of the agents {{{}}}",
            t1.agents()
        )));
    }
    first_violation(t1.name(), t1.validate())?;
    first_violation(t2.name(), t2.validate())
}

/// Shared refinement loop: start from the observation-close pairs and
/// remove, round by round and simultaneously, every pair that `check`
/// refutes against the previous relation.
fn refine<S1, S2>(
    t1: &S1,
    t2: &S2,
    eps: f64,
    agents: Option<AgentSet>,
    check: impl Fn(StateId, StateId, &Matrix) -> Option<(Reason, Witness)>,
) -> BisimResult
where
    S1: TransitionSystem + ?Sized,
    S2: TransitionSystem + ?Sized,
{
    let (n1, n2) = (t1.num_states(), t2.num_states());
    let space = t1.space();
    let mut r = Matrix::new(n1, n2);
    let mut refutations = BTreeMap::new();
    for a in 0..n1 {
        for b in 0..n2 {
            if within(space.distance(t1.observation(a), t2.observation(b)), eps) {
                r.set(a, b, true);
            } else {
                refutations.insert(
                    (a, b),
                    Refutation {
                        round: 0,
                        reason: Reason::ObsDistance,
                        witness: Witness::None,
                    },
                );
            }
        }
    }
    let mut rounds = 0;
    loop {
        let mut removed = Vec::new();
        for a in 0..n1 {
            for b in 0..n2 {
                if r.get(a, b) {
                    if let Some(why) = check(a, b, &r) {
                        removed.push(((a, b), why));
                    }
                }
            }
        }
        if removed.is_empty() {
            break;
        }
        rounds += 1;
        for ((a, b), (reason, witness)) in removed {
            r.set(a, b, false);
            refutations.insert((a, b), Refutation { round: rounds, reason, witness });
        }
    }
    let relation: BTreeSet<(StateId, StateId)> = (0..n1)
        .flat_map(|a| (0..n2).map(move |b| (a, b)))
        .filter(|&(a, b)| r.get(a, b))
        .collect();
    let left_total = (0..n1).all(|a| (0..n2).any(|b| r.get(a, b)));
    let right_total = (0..n2).all(|b| (0..n1).any(|a| r.get(a, b)));
    BisimResult {
        relation,
        epsilon: eps,
        agents,
        rounds,
        refutations,
        systems_bisimilar: left_total && right_total,
    }
}

fn agent_check<'a>(
    g1: &'a [StateGame],
    g2: &'a [StateGame],
) -> impl Fn(StateId, StateId, &Matrix) -> Option<(Reason, Witness)> + 'a {
    move |a, b, r| {
        if let Some(i) = forth_failure(&g1[a], &g2[b], r) {
            return Some((Reason::Forth, Witness::Choice(g1[a].ours[i].clone())));
        }
        back_failure(&g1[a], &g2[b], r).map(|k| (Reason::Back, Witness::Choice(g2[b].ours[k].clone())))
    }
}

/// The largest `(ag, eps)`-alternating approximate bisimulation between two
/// agent systems over the same observation space and agents.
pub fn approx_bisim(t1: &AgentAts, t2: &AgentAts, ag: &AgentSet, eps: f64) -> Result<BisimResult> {
    check_eps(eps)?;
    check_agent_pair(t1, t2, ag)?;
    let g1 = state_games(t1, ag);
    let g2 = state_games(t2, ag);
    Ok(refine(t1, t2, eps, Some(ag.clone()), agent_check(&g1, &g2)))
}

/// Exact alternating bisimilarity (radius zero).
pub fn exact_bisim(t1: &AgentAts, t2: &AgentAts, ag: &AgentSet) -> Result<BisimResult> {
    approx_bisim(t1, t2, ag, 0.0)
}

/// Pairs of `relation` that survive one more refinement step; equal to
/// `relation` exactly when it is a fixpoint.
pub fn refine_once(
    t1: &AgentAts,
    t2: &AgentAts,
    ag: &AgentSet,
    eps: f64,
    relation: &BTreeSet<(StateId, StateId)>,
) -> Result<BTreeSet<(StateId, StateId)>> {
    check_agent_pair(t1, t2, ag)?;
    let g1 = state_games(t1, ag);
    let g2 = state_games(t2, ag);
    let r = Matrix::from_set(t1.num_states(), t2.num_states(), relation);
    let space = t1.space();
    Ok(relation
        .iter()
        .copied()
        .filter(|&(a, b)| {
            within(space.distance(t1.observation(a), t2.observation(b)), eps)
                && forth_failure(&g1[a], &g2[b], &r).is_none()
                && back_failure(&g1[a], &g2[b], &r).is_none()
        })
        .collect())
}

fn label_forth(t1: &LabelAts, t2: &LabelAts, a: StateId, b: StateId, r: &Matrix) -> Option<ActionId> {
    (0..t1.controls().len()).find(|&a1| {
        !(0..t2.controls().len()).any(|a2| {
            (0..t2.disturbances().len()).all(|b2| {
                t2.post(b, a2, b2).iter().all(|&s2| {
                    (0..t1.disturbances().len()).any(|b1| t1.post(a, a1, b1).iter().any(|&s1| r.get(s1, s2)))
                })
            })
        })
    })
}

fn label_back(t1: &LabelAts, t2: &LabelAts, a: StateId, b: StateId, r: &Matrix) -> Option<ActionId> {
    (0..t2.controls().len()).find(|&a2| {
        !(0..t1.controls().len()).any(|a1| {
            (0..t1.disturbances().len()).all(|b1| {
                t1.post(a, a1, b1).iter().all(|&s1| {
                    (0..t2.disturbances().len()).any(|b2| t2.post(b, a2, b2).iter().any(|&s2| r.get(s1, s2)))
                })
            })
        })
    })
}

/// The largest alternating approximate bisimulation between two labeled
/// systems, with `systems_bisimilar` set when it is total on both sides.
pub fn aea_bisim(t1: &LabelAts, t2: &LabelAts, eps: f64) -> Result<BisimResult> {
    check_eps(eps)?;
    if !t1.space().same_space(t2.space()) {
        return Err(Error::input("the systems use different observation spaces"));
    }
    first_violation(t1.name(), t1.validate())?;
    first_violation(t2.name(), t2.validate())?;
    Ok(refine(t1, t2, eps, None, |a, b, r| {
        if let Some(a1) = label_forth(t1, t2, a, b, r) {
            return Some((Reason::Forth, Witness::Action(a1)));
        }
        label_back(t1, t2, a, b, r).map(|a2| (Reason::Back, Witness::Action(a2)))
    }))
}

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use super::*;
    use crate::model::tests::{example_one, line_space, matrix_game};
    use crate::model::{LabelAtsBuilder, MetricObsSpace};

    fn pairs(xs: &[(StateId, StateId)]) -> BTreeSet<(StateId, StateId)> {
        xs.iter().copied().collect()
    }

    #[test]
    fn example_one_radius_one() {
        let t = example_one();
        let r = approx_bisim(&t, &t, &AgentSet::new([1]), 1.0).unwrap();
        let mut expected: BTreeSet<_> = (0..3).flat_map(|a| (0..3).map(move |b| (a, b))).collect();
        expected.remove(&(0, 2));
        expected.remove(&(2, 0));
        assert_eq!(r.relation, expected);
        // not transitive: q1~q2, q2~q3, but not q1~q3
        assert!(r.related(0, 1) && r.related(1, 2) && !r.related(0, 2));
        assert_eq!(r.refutations[&(0, 2)].reason, Reason::ObsDistance);
        assert!(r.systems_bisimilar);
    }

    #[test]
    fn example_one_radius_zero_is_identity() {
        let t = example_one();
        let r = exact_bisim(&t, &t, &AgentSet::new([1])).unwrap();
        assert_eq!(r.relation, pairs(&[(0, 0), (1, 1), (2, 2)]));
    }

    #[test]
    fn matrix_game_refinement() {
        let t = matrix_game();
        let r = exact_bisim(&t, &t, &AgentSet::new([1])).unwrap();
        // the sink states with observation p1 are all alike
        assert!(r.related(1, 2) && r.related(1, 3) && !r.related(1, 4));
        // agent 1 alone can always avoid the p2 sink, like a p1 sink
        assert!(r.related(0, 0) && r.related(0, 1));
        let grand = exact_bisim(&t, &t, &AgentSet::new([1, 2])).unwrap();
        assert!(!grand.related(0, 1));
        assert_eq!(grand.refutations[&(0, 1)].reason, Reason::Forth);
        assert_eq!(grand.refutations[&(0, 1)].round, 1);
        let stable = refine_once(&t, &t, &AgentSet::new([1]), 0.0, &r.relation).unwrap();
        assert_eq!(stable, r.relation);
    }

    #[test]
    fn mismatched_agents_rejected() {
        let a = example_one();
        let b = matrix_game();
        assert!(matches!(approx_bisim(&a, &b, &AgentSet::new([1]), 1.0), Err(Error::Input(_))));
    }

    fn one_state(space: Arc<MetricObsSpace>, obs: &str) -> LabelAts {
        let mut b = LabelAtsBuilder::new("one", space, vec!["a".into()], vec!["b".into()]).unwrap();
        b.add_state("q", obs).unwrap();
        b.add_transition(0, 0, 0, 0).unwrap();
        b.build()
    }

    #[test]
    fn labeled_single_states_related_by_distance() {
        let space = Arc::new(
            MetricObsSpace::from_table(vec!["x".into(), "y".into()], &[("x".into(), "y".into(), 0.5)]).unwrap(),
        );
        let t1 = one_state(space.clone(), "x");
        let t2 = one_state(space, "y");
        assert!(aea_bisim(&t1, &t2, 0.5).unwrap().systems_bisimilar);
        assert!(aea_bisim(&t1, &t2, 0.4).unwrap().relation.is_empty());
    }

    #[test]
    fn labeled_self_contains_identity() {
        let space = line_space(2);
        let mut b = LabelAtsBuilder::new("l", space, vec!["a".into(), "c".into()], vec!["b".into()]).unwrap();
        b.add_state("u", "p1").unwrap();
        b.add_state("v", "p2").unwrap();
        b.add_transition(0, 0, 0, 0).unwrap();
        b.add_transition(0, 1, 0, 1).unwrap();
        b.add_transition(1, 0, 0, 1).unwrap();
        b.add_transition(1, 1, 0, 0).unwrap();
        let t = b.build();
        let r = aea_bisim(&t, &t, 0.0).unwrap();
        assert!(r.related(0, 0) && r.related(1, 1));
        let blocking = {
            let mut b = LabelAtsBuilder::new("x", line_space(1), vec!["a".into()], vec!["b".into()]).unwrap();
            b.add_state("q", "p1").unwrap();
            b.build()
        };
        assert!(aea_bisim(&blocking, &blocking, 0.0).is_err());
    }
}
