use std::collections::{BTreeSet, HashMap};

use super::{approx_bisim, state_games, BisimResult, Matrix, Reason, StateGame, Witness};
use crate::error::{Error, Result};
use crate::logic::{PathFormula, StateFormula};
use crate::model::{AgentAts, AgentSet, StateId, StateSet, TransitionSystem};

/// Which state satisfies the first formula of a distinguishing pair.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
enum Direction {
    /// The left state satisfies `phi` and the right state violates `gamma`.
    LeftSatisfies,
    /// The right state satisfies `phi` and the left state violates `gamma`.
    RightSatisfies,
}

impl Direction {
    fn flip(self) -> Self {
        match self {
            Direction::LeftSatisfies => Direction::RightSatisfies,
            Direction::RightSatisfies => Direction::LeftSatisfies,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Distinction {
    Bisimilar,
    /// The left state satisfies `phi` and the right state violates `gamma`.
    Distinguished { phi: StateFormula, gamma: StateFormula },
}

type Found = (StateFormula, StateFormula, Direction);

/// Negation that cancels an outer negation.
fn negate(f: StateFormula) -> StateFormula {
    match f {
        StateFormula::Not(x) => *x,
        other => StateFormula::not(other),
    }
}

/// Turn `(phi, gamma)` into `(!gamma, !phi)`, which swaps the direction.
fn swap((phi, gamma, dir): Found) -> Found {
    (negate(gamma), negate(phi), dir.flip())
}

fn orient(found: Found, want: Direction) -> Found {
    if found.2 == want {
        found
    } else {
        swap(found)
    }
}

fn fold(xs: Vec<StateFormula>, op: fn(StateFormula, StateFormula) -> StateFormula) -> StateFormula {
    let mut it = xs.into_iter();
    let first = it.next().expect("nonempty family");
    it.fold(first, op)
}

/// `!<<ag>> !X f`: every coalition choice allows a successor satisfying `f`.
fn cannot_avoid(ag: &AgentSet, f: StateFormula) -> StateFormula {
    StateFormula::not(StateFormula::coalition(
        ag.clone(),
        PathFormula::not(PathFormula::next(PathFormula::state(f))),
    ))
}

struct Builder<'a> {
    t1: &'a AgentAts,
    t2: &'a AgentAts,
    res: &'a BisimResult,
    ag: AgentSet,
    g1: Vec<StateGame>,
    g2: Vec<StateGame>,
    before: HashMap<usize, Matrix>,
    memo: HashMap<(StateId, StateId), Found>,
}

impl Builder<'_> {
    fn relation_before(&mut self, k: usize) -> &Matrix {
        let (n1, n2) = (self.t1.num_states(), self.t2.num_states());
        let res = self.res;
        self.before
            .entry(k)
            .or_insert_with(|| Matrix::from_set(n1, n2, &res.relation_before(k)))
    }

    fn single(set: &[StateId]) -> StateId {
        set[0]
    }

    fn index_of(choices: &[StateSet], set: &StateSet) -> Result<usize> {
        choices
            .iter()
            .position(|c| c == set)
            .ok_or_else(|| Error::input("refutation witness is not a choice of the state"))
    }

    fn build(&mut self, q1: StateId, q2: StateId) -> Result<Found> {
        if let Some(f) = self.memo.get(&(q1, q2)) {
            return Ok(f.clone());
        }
        let refutation = self.res.refutations.get(&(q1, q2)).cloned().ok_or_else(|| {
            Error::input(format!("pair ({q1}, {q2}) is related and cannot be distinguished"))
        })?;
        let found = match (refutation.reason, &refutation.witness) {
            (Reason::ObsDistance, _) => {
                let p = self.t1.space().name(self.t1.observation(q1)).to_string();
                (
                    StateFormula::atom(p.clone()),
                    StateFormula::diamond(self.res.epsilon, p),
                    Direction::LeftSatisfies,
                )
            }
            (Reason::Forth, Witness::Choice(set)) => self.forth(q1, q2, refutation.round, set)?,
            (Reason::Back, Witness::Choice(set)) => self.back(q1, q2, refutation.round, set)?,
            _ => return Err(Error::input("refutation carries no choice witness")),
        };
        self.memo.insert((q1, q2), found.clone());
        Ok(found)
    }

    /// The coalition at `q1` has a choice `q2` cannot answer: the right state
    /// satisfies the constructed formula.
    fn forth(&mut self, q1: StateId, q2: StateId, round: usize, witness: &StateSet) -> Result<Found> {
        let i = Self::index_of(&self.g1[q1].ours, witness)?;
        let r = self.relation_before(round).clone();
        let mut disj_phi = Vec::new();
        let mut disj_gamma = Vec::new();
        for k in 0..self.g2[q2].ours.len() {
            let l = (0..self.g2[q2].theirs.len())
                .find(|&l| {
                    let s2 = Self::single(&self.g2[q2].succ[k][l]);
                    (0..self.g1[q1].theirs.len()).all(|j| !r.get(Self::single(&self.g1[q1].succ[i][j]), s2))
                })
                .ok_or_else(|| Error::input("refutation witness does not replay"))?;
            let s2 = Self::single(&self.g2[q2].succ[k][l]);
            let mut conj = BTreeSet::new();
            for j in 0..self.g1[q1].theirs.len() {
                let s1 = Self::single(&self.g1[q1].succ[i][j]);
                let f = orient(self.build(s1, s2)?, Direction::RightSatisfies);
                conj.insert((f.0, f.1));
            }
            let (ps, gs): (Vec<_>, Vec<_>) = conj.into_iter().unzip();
            disj_phi.push(fold(ps, StateFormula::and));
            disj_gamma.push(fold(gs, StateFormula::and));
        }
        Ok((
            cannot_avoid(&self.ag, fold(disj_phi, StateFormula::or)),
            cannot_avoid(&self.ag, fold(disj_gamma, StateFormula::or)),
            Direction::RightSatisfies,
        ))
    }

    /// Mirror of [`Self::forth`]: the left state satisfies the formula.
    fn back(&mut self, q1: StateId, q2: StateId, round: usize, witness: &StateSet) -> Result<Found> {
        let k = Self::index_of(&self.g2[q2].ours, witness)?;
        let r = self.relation_before(round).clone();
        let mut disj_phi = Vec::new();
        let mut disj_gamma = Vec::new();
        for i in 0..self.g1[q1].ours.len() {
            let j = (0..self.g1[q1].theirs.len())
                .find(|&j| {
                    let s1 = Self::single(&self.g1[q1].succ[i][j]);
                    (0..self.g2[q2].theirs.len()).all(|l| !r.get(s1, Self::single(&self.g2[q2].succ[k][l])))
                })
                .ok_or_else(|| Error::input("refutation witness does not replay"))?;
            let s1 = Self::single(&self.g1[q1].succ[i][j]);
            let mut conj = BTreeSet::new();
            for l in 0..self.g2[q2].theirs.len() {
                let s2 = Self::single(&self.g2[q2].succ[k][l]);
                let f = orient(self.build(s1, s2)?, Direction::LeftSatisfies);
                conj.insert((f.0, f.1));
            }
            let (ps, gs): (Vec<_>, Vec<_>) = conj.into_iter().unzip();
            disj_phi.push(fold(ps, StateFormula::and));
            disj_gamma.push(fold(gs, StateFormula::and));
        }
        Ok((
            cannot_avoid(&self.ag, fold(disj_phi, StateFormula::or)),
            cannot_avoid(&self.ag, fold(disj_gamma, StateFormula::or)),
            Direction::LeftSatisfies,
        ))
    }
}

/// A related formula pair separating `q1` from `q2`, read off the refutation
/// trace of an already computed bisimulation over `t1` and `t2`.
pub fn distinguish_in(
    t1: &AgentAts,
    t2: &AgentAts,
    res: &BisimResult,
    q1: StateId,
    q2: StateId,
) -> Result<Distinction> {
    if q1 >= t1.num_states() || q2 >= t2.num_states() {
        return Err(Error::input(format!("unknown state pair ({q1}, {q2})")));
    }
    if res.related(q1, q2) {
        return Ok(Distinction::Bisimilar);
    }
    let ag = res
        .agents
        .clone()
        .ok_or_else(|| Error::input("distinguishing formulas need an agent-system bisimulation"))?;
    let mut b = Builder {
        t1,
        t2,
        res,
        g1: state_games(t1, &ag),
        g2: state_games(t2, &ag),
        ag,
        before: HashMap::new(),
        memo: HashMap::new(),
    };
    let (phi, gamma, _) = orient(b.build(q1, q2)?, Direction::LeftSatisfies);
    Ok(Distinction::Distinguished { phi, gamma })
}

/// Computes the bisimulation and then a distinguishing pair for `(q1, q2)`.
pub fn distinguish(
    t1: &AgentAts,
    t2: &AgentAts,
    ag: &AgentSet,
    eps: f64,
    q1: StateId,
    q2: StateId,
) -> Result<Distinction> {
    let res = approx_bisim(t1, t2, ag, eps)?;
    distinguish_in(t1, t2, &res, q1, q2)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::logic::eval_state;
    use crate::model::tests::{example_one, matrix_game};
    use crate::relations::decide_h;

    fn check(t1: &AgentAts, t2: &AgentAts, ag: &AgentSet, eps: f64, q1: StateId, q2: StateId) -> StateFormula {
        let res = approx_bisim(t1, t2, ag, eps).unwrap();
        let Distinction::Distinguished { phi, gamma } = distinguish_in(t1, t2, &res, q1, q2).unwrap() else {
            panic!("expected a distinction")
        };
        assert!(decide_h(&phi, &gamma, ag, eps));
        assert!(eval_state(t1, q1, &phi, eps).unwrap());
        assert!(!eval_state(t2, q2, &gamma, eps).unwrap());
        assert!(phi.coalition_depth() <= res.rounds);
        phi
    }

    #[test]
    fn example_one_far_pair() {
        let t = example_one();
        let phi = check(&t, &t, &AgentSet::new([1]), 1.0, 0, 2);
        assert_eq!(phi, StateFormula::atom("p1"));
        assert_eq!(
            distinguish(&t, &t, &AgentSet::new([1]), 1.0, 0, 1).unwrap(),
            Distinction::Bisimilar
        );
    }

    #[test]
    fn matrix_game_grand_coalition() {
        let t = matrix_game();
        let ag = AgentSet::new([1, 2]);
        let phi = check(&t, &t, &ag, 0.0, 0, 1);
        assert_eq!(phi.coalition_depth(), 1);
        check(&t, &t, &ag, 0.0, 1, 0);
    }
}
