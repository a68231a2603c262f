use std::collections::{BTreeMap, HashMap};

use super::{PathFormula, StateFormula};
use crate::error::{Error, Result};
use crate::model::{AgStrategy, AgentAts, AgentSet, StateId, TransitionSystem};

/// Path formulas directly under a coalition that the exact checker handles.
#[derive(Debug, Clone, PartialEq)]
pub enum CorePath {
    Now(StateFormula),
    Next(StateFormula),
    Until(StateFormula, StateFormula),
    /// `a R b`: `b` holds up to and including the first position where `a` holds.
    Release(StateFormula, StateFormula),
}

fn as_state(p: &PathFormula) -> Option<StateFormula> {
    match p {
        PathFormula::State(s) => Some((**s).clone()),
        PathFormula::Not(x) => as_state(x).map(StateFormula::not),
        PathFormula::And(a, b) => Some(StateFormula::and(as_state(a)?, as_state(b)?)),
        PathFormula::Next(_) | PathFormula::Until(..) => None,
    }
}

/// Rewrites a coalition body into one of the exactly checkable shapes,
/// pushing negations through `X` and turning negated `U` into `R`.
pub fn core_path(p: &PathFormula) -> Option<CorePath> {
    if let Some(s) = as_state(p) {
        return Some(CorePath::Now(s));
    }
    match p {
        PathFormula::Next(x) => as_state(x).map(CorePath::Next),
        PathFormula::Until(a, b) => Some(CorePath::Until(as_state(a)?, as_state(b)?)),
        PathFormula::Not(inner) => match &**inner {
            PathFormula::Not(x) => core_path(x),
            PathFormula::Next(x) => as_state(x).map(|s| CorePath::Next(StateFormula::not(s))),
            PathFormula::Until(a, b) => Some(CorePath::Release(
                StateFormula::not(as_state(a)?),
                StateFormula::not(as_state(b)?),
            )),
            _ => None,
        },
        _ => None,
    }
}

/// One-step game structure for a fixed coalition: `moves[q][i]` lists the
/// successors reachable when the coalition plays its `i`-th joint choice.
pub(crate) struct CoalitionMoves {
    pub choices: Vec<Vec<crate::model::StateSet>>,
    pub moves: Vec<Vec<Vec<StateId>>>,
}

impl CoalitionMoves {
    pub fn new(sys: &AgentAts, ag: &AgentSet) -> Self {
        let co = sys.complement(ag);
        let mut choices = Vec::with_capacity(sys.num_states());
        let mut moves = Vec::with_capacity(sys.num_states());
        for q in 0..sys.num_states() {
            let ours = sys.joint_choices(q, ag);
            let theirs = sys.joint_choices(q, &co);
            let per: Vec<Vec<StateId>> = ours
                .iter()
                .map(|mine| {
                    let mut succ: Vec<StateId> = theirs
                        .iter()
                        .flat_map(|t| mine.intersection(t).copied())
                        .collect();
                    succ.sort_unstable();
                    succ.dedup();
                    succ
                })
                .collect();
            choices.push(ours);
            moves.push(per);
        }
        Self { choices, moves }
    }

    /// Index of the first joint choice forcing the next state into `target`.
    pub fn forcing_choice(&self, q: StateId, target: &[bool]) -> Option<usize> {
        self.moves[q]
            .iter()
            .position(|succ| succ.iter().all(|&s| target[s]))
    }

    pub fn cpre(&self, target: &[bool]) -> Vec<bool> {
        (0..self.moves.len())
            .map(|q| self.forcing_choice(q, target).is_some())
            .collect()
    }
}

/// Global exact model checker for the coalition core fragment.
pub struct ExactChecker<'a> {
    sys: &'a AgentAts,
    eps: f64,
    moves: HashMap<AgentSet, CoalitionMoves>,
    cache: HashMap<StateFormula, Vec<bool>>,
}

impl<'a> ExactChecker<'a> {
    pub fn new(sys: &'a AgentAts, eps: f64) -> Self {
        Self {
            sys,
            eps,
            moves: HashMap::new(),
            cache: HashMap::new(),
        }
    }

    fn moves_for(&mut self, ag: &AgentSet) -> Result<&CoalitionMoves> {
        if !ag.is_subset(self.sys.agents()) {
            return Err(Error::input(format!(
                "coalition {{{ag}}} is not a subset of the agents {{{}}}",
                self.sys.agents()
            )));
        }
        if !self.moves.contains_key(ag) {
            let m = CoalitionMoves::new(self.sys, ag);
            self.moves.insert(ag.clone(), m);
        }
        Ok(&self.moves[ag])
    }

    /// The set of states satisfying `f`, as a membership vector.
    pub fn sat(&mut self, f: &StateFormula) -> Result<Vec<bool>> {
        if let Some(v) = self.cache.get(f) {
            return Ok(v.clone());
        }
        let n = self.sys.num_states();
        let space = self.sys.space();
        let v = match f {
            StateFormula::Atom(p) => {
                let o = space.require(p)?;
                (0..n).map(|q| self.sys.observation(q) == o).collect()
            }
            StateFormula::Diamond(e, p) => {
                if !e.matches(self.eps) {
                    return Err(Error::input(format!(
                        "approximate atom uses radius {e} but the analysis radius is {}",
                        self.eps
                    )));
                }
                let o = space.require(p)?;
                (0..n)
                    .map(|q| crate::model::within(space.distance(o, self.sys.observation(q)), self.eps))
                    .collect()
            }
            StateFormula::Not(x) => self.sat(x)?.into_iter().map(|b| !b).collect(),
            StateFormula::And(a, b) => {
                let va = self.sat(a)?;
                let vb = self.sat(b)?;
                va.into_iter().zip(vb).map(|(x, y)| x && y).collect()
            }
            StateFormula::Coalition(ag, path) => {
                let core = core_path(path).ok_or_else(|| {
                    Error::UnsupportedExact(format!("coalition body `{path}` is outside the X/U/R fragment"))
                })?;
                self.coalition(ag, &core)?.0
            }
        };
        self.cache.insert(f.clone(), v.clone());
        Ok(v)
    }

    /// Winning region plus, per state, the joint choice index that witnesses it.
    fn coalition(&mut self, ag: &AgentSet, core: &CorePath) -> Result<(Vec<bool>, Vec<Option<usize>>)> {
        let n = self.sys.num_states();
        match core {
            CorePath::Now(s) => {
                let v = self.sat(s)?;
                let w = v.iter().map(|&b| b.then_some(0)).collect();
                Ok((v, w))
            }
            CorePath::Next(s) => {
                let target = self.sat(s)?;
                let m = self.moves_for(ag)?;
                let w: Vec<Option<usize>> = (0..n).map(|q| m.forcing_choice(q, &target)).collect();
                Ok((w.iter().map(Option::is_some).collect(), w))
            }
            CorePath::Until(a, b) => {
                let va = self.sat(a)?;
                let vb = self.sat(b)?;
                let m = self.moves_for(ag)?;
                // least fixpoint, recording the choice that first pulled a state in
                let mut z = vb.clone();
                let mut w: Vec<Option<usize>> = vb.iter().map(|&x| x.then_some(0)).collect();
                loop {
                    let mut grew = Vec::new();
                    for q in 0..n {
                        if !z[q] && va[q] {
                            if let Some(i) = m.forcing_choice(q, &z) {
                                grew.push((q, i));
                            }
                        }
                    }
                    if grew.is_empty() {
                        break;
                    }
                    for (q, i) in grew {
                        z[q] = true;
                        w[q] = Some(i);
                    }
                }
                Ok((z, w))
            }
            CorePath::Release(a, b) => {
                let va = self.sat(a)?;
                let vb = self.sat(b)?;
                let m = self.moves_for(ag)?;
                let mut z = vb.clone();
                loop {
                    let pre = m.cpre(&z);
                    let next: Vec<bool> = (0..n).map(|q| vb[q] && (va[q] || pre[q])).collect();
                    if next == z {
                        break;
                    }
                    z = next;
                }
                let w = (0..n)
                    .map(|q| {
                        if !z[q] {
                            None
                        } else if va[q] {
                            Some(0)
                        } else {
                            m.forcing_choice(q, &z)
                        }
                    })
                    .collect();
                Ok((z, w))
            }
        }
    }

    /// Memoryless witness for a top-level coalition formula, defined on every
    /// state of its winning region (other states get their first choice).
    pub fn witness(&mut self, f: &StateFormula) -> Result<Option<AgStrategy>> {
        let StateFormula::Coalition(ag, path) = f else {
            return Ok(None);
        };
        let core = core_path(path).ok_or_else(|| {
            Error::UnsupportedExact(format!("coalition body `{path}` is outside the X/U/R fragment"))
        })?;
        let (_, w) = self.coalition(ag, &core)?;
        let m = self.moves_for(ag)?;
        let table: BTreeMap<StateId, crate::model::StateSet> = w
            .iter()
            .enumerate()
            .map(|(q, i)| (q, m.choices[q][i.unwrap_or(0)].clone()))
            .collect();
        AgStrategy::memoryless(self.sys, ag.clone(), table).map(Some)
    }
}

/// Exact truth of `f` at `q` for the coalition core fragment; `eps` is the
/// analysis radius every approximate atom must carry.
pub fn eval_state(sys: &AgentAts, q: StateId, f: &StateFormula, eps: f64) -> Result<bool> {
    if q >= sys.num_states() {
        return Err(Error::input(format!("unknown state index {q}")));
    }
    Ok(ExactChecker::new(sys, eps).sat(f)?[q])
}
