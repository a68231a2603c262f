use std::collections::HashMap;

use super::{CoalitionMoves, PathFormula, StateFormula, Verdict};
use crate::error::{Error, Result};
use crate::model::{within, AgentAts, AgentSet, StateId, TransitionSystem};

/// Three-valued truth of `f` at `q`, with every coalition evaluated on the
/// depth-`k` game tree (prefixes of `k` states, history-dependent choices).
pub fn eval_bounded(sys: &AgentAts, q: StateId, f: &StateFormula, k: usize, eps: f64) -> Result<Verdict> {
    if k < 1 {
        return Err(Error::input("horizon must be at least 1"));
    }
    if q >= sys.num_states() {
        return Err(Error::input(format!("unknown state index {q}")));
    }
    Bounded {
        sys,
        k,
        eps,
        moves: HashMap::new(),
        memo: HashMap::new(),
    }
    .state(f, q)
}

struct Bounded<'a> {
    sys: &'a AgentAts,
    k: usize,
    eps: f64,
    moves: HashMap<AgentSet, CoalitionMoves>,
    memo: HashMap<(StateFormula, StateId), Verdict>,
}

impl Bounded<'_> {
    fn state(&mut self, f: &StateFormula, q: StateId) -> Result<Verdict> {
        let key = (f.clone(), q);
        if let Some(&v) = self.memo.get(&key) {
            return Ok(v);
        }
        let space = self.sys.space();
        let v = match f {
            StateFormula::Atom(p) => Verdict::from_bool(space.require(p)? == self.sys.observation(q)),
            StateFormula::Diamond(e, p) => {
                if !e.matches(self.eps) {
                    return Err(Error::input(format!(
                        "approximate atom uses radius {e} but the analysis radius is {}",
                        self.eps
                    )));
                }
                let o = space.require(p)?;
                Verdict::from_bool(within(space.distance(o, self.sys.observation(q)), self.eps))
            }
            StateFormula::Not(x) => self.state(x, q)?.not(),
            StateFormula::And(a, b) => {
                let va = self.state(a, q)?;
                if va == Verdict::False {
                    Verdict::False
                } else {
                    va.and(self.state(b, q)?)
                }
            }
            StateFormula::Coalition(ag, path) => self.coalition(ag, path, q)?,
        };
        self.memo.insert(key, v);
        Ok(v)
    }

    fn coalition(&mut self, ag: &AgentSet, path: &PathFormula, q: StateId) -> Result<Verdict> {
        if !ag.is_subset(self.sys.agents()) {
            return Err(Error::input(format!(
                "coalition {{{ag}}} is not a subset of the agents {{{}}}",
                self.sys.agents()
            )));
        }
        if !self.moves.contains_key(ag) {
            self.moves.insert(ag.clone(), CoalitionMoves::new(self.sys, ag));
        }
        let mut history = vec![q];
        // pessimistic: the coalition must force a prefix that settles the formula true
        if self.maximin(ag, path, &mut history, true)? {
            return Ok(Verdict::True);
        }
        // optimistic: the opponents can force a prefix that settles it false
        if !self.maximin(ag, path, &mut history, false)? {
            return Ok(Verdict::False);
        }
        Ok(Verdict::Unknown)
    }

    fn maximin(&mut self, ag: &AgentSet, path: &PathFormula, history: &mut Vec<StateId>, pessimistic: bool) -> Result<bool> {
        if history.len() == self.k {
            let v = self.score(path, history)?;
            return Ok(if pessimistic { v == Verdict::True } else { v != Verdict::False });
        }
        let last = *history.last().expect("history is nonempty");
        let options = self.moves[ag].moves[last].clone();
        for succs in options {
            let mut all = true;
            for s in succs {
                history.push(s);
                let ok = self.maximin(ag, path, history, pessimistic)?;
                history.pop();
                if !ok {
                    all = false;
                    break;
                }
            }
            if all {
                return Ok(true);
            }
        }
        Ok(false)
    }

    /// Kleene value of `path` at the start of the finite `prefix`.
    fn score(&mut self, path: &PathFormula, prefix: &[StateId]) -> Result<Verdict> {
        let vals = self.positions(path, prefix)?;
        Ok(vals[0])
    }

    fn positions(&mut self, path: &PathFormula, prefix: &[StateId]) -> Result<Vec<Verdict>> {
        let n = prefix.len();
        Ok(match path {
            PathFormula::State(s) => prefix.iter().map(|&q| self.state(s, q)).collect::<Result<_>>()?,
            PathFormula::Not(x) => self.positions(x, prefix)?.into_iter().map(Verdict::not).collect(),
            PathFormula::And(a, b) => {
                let va = self.positions(a, prefix)?;
                let vb = self.positions(b, prefix)?;
                va.into_iter().zip(vb).map(|(x, y)| x.and(y)).collect()
            }
            PathFormula::Next(x) => {
                let vx = self.positions(x, prefix)?;
                (0..n)
                    .map(|i| if i + 1 < n { vx[i + 1] } else { Verdict::Unknown })
                    .collect()
            }
            PathFormula::Until(a, b) => {
                let va = self.positions(a, prefix)?;
                let vb = self.positions(b, prefix)?;
                let mut out = vec![Verdict::Unknown; n];
                let mut later = Verdict::Unknown;
                for i in (0..n).rev() {
                    later = vb[i].or(va[i].and(later));
                    out[i] = later;
                }
                out
            }
        })
    }
}
