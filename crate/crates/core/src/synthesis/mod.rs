//! Control synthesis for negation-free LTL specifications on labeled systems.
//!
//! Negation-free specifications are co-safety: a trace satisfies one exactly
//! when some finite prefix progresses the specification to `true`. Synthesis
//! is therefore a reachability game on (state, residual obligation) pairs.

mod residual;

use std::collections::{BTreeMap, BTreeSet, HashMap};

use serde::Serialize;

pub use residual::{progress, progress_residual, Residual};

use crate::bisim::aea_bisim;
use crate::error::{Error, Result};
use crate::logic::{tr_epsilon, PositiveLtl};
use crate::model::{ActionId, CtrlStrategy, LabelAts, StateId, TransitionSystem};

/// One node of the product arena with the actions the strategy offers there.
#[derive(Debug, Clone, PartialEq)]
pub struct StrategyNode {
    pub state: StateId,
    pub residual: Residual,
    pub actions: BTreeSet<ActionId>,
    /// Remaining steps until the obligation is discharged.
    pub rank: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SynthResult {
    pub realizable: bool,
    /// Memory values index `residuals`.
    pub strategy: Option<CtrlStrategy>,
    pub residuals: Vec<Residual>,
    pub nodes: Vec<StrategyNode>,
    /// Worst-case number of steps until the specification is met.
    pub horizon: Option<usize>,
}

struct Arena {
    residuals: Vec<Residual>,
    index: HashMap<Residual, usize>,
    /// Reachable nodes `(state, residual index)`.
    nodes: BTreeSet<(StateId, usize)>,
}

impl Arena {
    fn intern(&mut self, r: Residual) -> usize {
        if let Some(&i) = self.index.get(&r) {
            return i;
        }
        self.residuals.push(r.clone());
        self.index.insert(r, self.residuals.len() - 1);
        self.residuals.len() - 1
    }
}

fn successor_nodes(
    sys: &LabelAts,
    arena: &mut Arena,
    q: StateId,
    m: usize,
    a: ActionId,
) -> Vec<(StateId, usize)> {
    let mut out = Vec::new();
    for b in 0..sys.disturbances().len() {
        for &t in sys.post(q, a, b) {
            let r = progress_residual(&arena.residuals[m].clone(), sys, t);
            let n = (t, arena.intern(r));
            if !out.contains(&n) {
                out.push(n);
            }
        }
    }
    out
}

fn check_system(sys: &LabelAts, q0: StateId) -> Result<()> {
    if q0 >= sys.num_states() {
        return Err(Error::input(format!("unknown state index {q0}")));
    }
    if let Some(v) = sys.validate().first() {
        return Err(Error::input(format!("system `{}` is invalid: {v}", sys.name())));
    }
    Ok(())
}

/// Solves the reachability game for `spec` from `q0` and extracts a strategy
/// whose memory is the residual obligation.
pub fn synthesize(sys: &LabelAts, q0: StateId, spec: &PositiveLtl) -> Result<SynthResult> {
    check_system(sys, q0)?;
    let mut arena = Arena {
        residuals: Vec::new(),
        index: HashMap::new(),
        nodes: BTreeSet::new(),
    };
    let init = (q0, arena.intern(progress(spec, sys, q0)));
    // forward exploration of the product, remembering moves per action
    let mut moves: BTreeMap<(StateId, usize), Vec<Vec<(StateId, usize)>>> = BTreeMap::new();
    let mut stack = vec![init];
    arena.nodes.insert(init);
    while let Some((q, m)) = stack.pop() {
        if arena.residuals[m].is_true() || arena.residuals[m].is_false() {
            continue;
        }
        let mut per_action = Vec::new();
        for a in 0..sys.controls().len() {
            let succ = successor_nodes(sys, &mut arena, q, m, a);
            for &n in &succ {
                if arena.nodes.insert(n) {
                    stack.push(n);
                }
            }
            per_action.push(succ);
        }
        moves.insert((q, m), per_action);
    }
    // backward attractor to the true residual
    let mut rank: BTreeMap<(StateId, usize), usize> = arena
        .nodes
        .iter()
        .filter(|&&(_, m)| arena.residuals[m].is_true())
        .map(|&n| (n, 0))
        .collect();
    let mut level = 0;
    loop {
        level += 1;
        let fresh: Vec<(StateId, usize)> = moves
            .iter()
            .filter(|(n, _)| !rank.contains_key(n))
            .filter(|(_, per)| per.iter().any(|succ| succ.iter().all(|s| rank.contains_key(s))))
            .map(|(&n, _)| n)
            .collect();
        if fresh.is_empty() {
            break;
        }
        for n in fresh {
            rank.insert(n, level);
        }
    }
    let realizable = rank.contains_key(&init);
    let mut nodes = Vec::new();
    let mut table = BTreeMap::new();
    let mut update = BTreeMap::new();
    if realizable {
        let all: BTreeSet<ActionId> = (0..sys.controls().len()).collect();
        for (&(q, m), &r) in &rank {
            let actions: BTreeSet<ActionId> = if r == 0 {
                all.clone()
            } else {
                moves[&(q, m)]
                    .iter()
                    .enumerate()
                    .filter(|(_, succ)| succ.iter().all(|s| rank.get(s).is_some_and(|&x| x < r)))
                    .map(|(a, _)| a)
                    .collect()
            };
            if r > 0 {
                for &a in &actions {
                    for &(t, m2) in &moves[&(q, m)][a] {
                        update.insert((m, t), m2);
                    }
                }
            }
            table.insert((m, q), actions.clone());
            nodes.push(StrategyNode {
                state: q,
                residual: arena.residuals[m].clone(),
                actions,
                rank: r,
            });
        }
    }
    let strategy = if realizable {
        Some(CtrlStrategy::new(sys, init.1, table, update)?)
    } else {
        None
    };
    Ok(SynthResult {
        realizable,
        strategy,
        residuals: arena.residuals,
        nodes,
        horizon: rank.get(&init).copied(),
    })
}

/// True iff every outcome of `strategy` from `q0` satisfies `spec`.
pub fn verify_under_strategy(sys: &LabelAts, q0: StateId, strategy: &CtrlStrategy, spec: &PositiveLtl) -> Result<bool> {
    check_system(sys, q0)?;
    type Node = (StateId, usize, Residual);
    let start: Node = (q0, strategy.initial_memory(), progress(spec, sys, q0));
    // iterative depth-first search for a reachable false residual or a
    // cycle that never discharges the obligation
    let mut color: HashMap<Node, u8> = HashMap::new();
    let mut stack: Vec<(Node, Vec<Node>, usize)> = Vec::new();
    let expand = |n: &Node| -> Result<Option<Vec<Node>>> {
        let (q, mem, res) = n;
        if res.is_true() {
            return Ok(Some(Vec::new()));
        }
        if res.is_false() {
            return Ok(None);
        }
        let actions = strategy.actions(*mem, *q).ok_or_else(|| {
            Error::Strategy(format!(
                "no entry for memory {mem} at state {} (residual {res})",
                sys.state_name(*q)
            ))
        })?;
        if actions.is_empty() {
            return Err(Error::Strategy("strategy emits the empty action set".into()));
        }
        let mut out = Vec::new();
        for &a in actions {
            if a >= sys.controls().len() {
                return Err(Error::Strategy(format!("unknown control index {a}")));
            }
            for b in 0..sys.disturbances().len() {
                for &t in sys.post(*q, a, b) {
                    let n = (t, strategy.next_memory(*mem, t), progress_residual(res, sys, t));
                    if !out.contains(&n) {
                        out.push(n);
                    }
                }
            }
        }
        Ok(Some(out))
    };
    let Some(succ) = expand(&start)? else { return Ok(false) };
    color.insert(start.clone(), 1);
    stack.push((start, succ, 0));
    while let Some((node, succ, i)) = stack.pop() {
        if i == succ.len() {
            color.insert(node, 2);
            continue;
        }
        let next = succ[i].clone();
        stack.push((node, succ, i + 1));
        match color.get(&next) {
            Some(1) => return Ok(false),
            Some(_) => {}
            None => {
                let Some(s) = expand(&next)? else { return Ok(false) };
                color.insert(next.clone(), 1);
                stack.push((next, s, 0));
            }
        }
    }
    Ok(true)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TransferRow {
    pub sample_state: String,
    pub abstract_state: String,
    pub synth_abs: bool,
    pub synth_sample: bool,
    pub violation: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TransferReport {
    pub systems_bisimilar: bool,
    pub spec: String,
    pub translated: String,
    pub pairs: Vec<TransferRow>,
    pub violations: usize,
}

/// For every related pair of an alternating approximate bisimulation, checks
/// that a specification enforceable on the abstraction has its widened
/// translation enforceable on the sample.
pub fn transfer_harness(sample: &LabelAts, abs: &LabelAts, eps: f64, spec: &PositiveLtl) -> Result<TransferReport> {
    if spec.has_diamond() {
        return Err(Error::input("the specification must not contain approximate atoms"));
    }
    let widened = tr_epsilon(spec, eps)?;
    let bisim = aea_bisim(sample, abs, eps)?;
    let mut abs_cache: HashMap<StateId, bool> = HashMap::new();
    let mut sample_cache: HashMap<StateId, bool> = HashMap::new();
    let mut pairs = Vec::new();
    for &(q1, q2) in &bisim.relation {
        let synth_abs = match abs_cache.get(&q2) {
            Some(&v) => v,
            None => {
                let v = synthesize(abs, q2, spec)?.realizable;
                abs_cache.insert(q2, v);
                v
            }
        };
        let synth_sample = match sample_cache.get(&q1) {
            Some(&v) => v,
            None => {
                let v = synthesize(sample, q1, &widened)?.realizable;
                sample_cache.insert(q1, v);
                v
            }
        };
        pairs.push(TransferRow {
            sample_state: sample.state_name(q1).to_string(),
            abstract_state: abs.state_name(q2).to_string(),
            synth_abs,
            synth_sample,
            violation: synth_abs && !synth_sample,
        });
    }
    Ok(TransferReport {
        systems_bisimilar: bisim.systems_bisimilar,
        spec: spec.to_string(),
        translated: widened.to_string(),
        violations: pairs.iter().filter(|r| r.violation).count(),
        pairs,
    })
}

#[cfg(test)]
mod tests {
    use std::collections::BTreeSet;

    use super::*;
    use crate::model::tests::line_space;
    use crate::model::LabelAtsBuilder;

    /// q0 reaches `goal` under a1 whatever the disturbance; a2 with b2 traps.
    pub(crate) fn three_state(trap_only: bool) -> LabelAts {
        let n_controls = if trap_only { 1 } else { 2 };
        let controls = if trap_only { vec!["a2".into()] } else { vec!["a1".into(), "a2".into()] };
        let mut b = LabelAtsBuilder::new("three", line_space(3), controls, vec!["b1".into(), "b2".into()]).unwrap();
        let q0 = b.add_state("q0", "p1").unwrap();
        let goal = b.add_state("goal", "p2").unwrap();
        let trap = b.add_state("trap", "p3").unwrap();
        let a2 = b.control("a2").unwrap();
        if !trap_only {
            let a1 = b.control("a1").unwrap();
            b.add_transition(q0, a1, 0, goal).unwrap();
            b.add_transition(q0, a1, 1, goal).unwrap();
        }
        b.add_transition(q0, a2, 0, goal).unwrap();
        b.add_transition(q0, a2, 1, trap).unwrap();
        for s in [goal, trap] {
            for a in 0..n_controls {
                b.add_transition(s, a, 0, s).unwrap();
                b.add_transition(s, a, 1, s).unwrap();
            }
        }
        b.build()
    }

    fn eventually(p: &str) -> PositiveLtl {
        let any = PositiveLtl::or(
            PositiveLtl::or(PositiveLtl::atom("p1"), PositiveLtl::atom("p2")),
            PositiveLtl::atom("p3"),
        );
        PositiveLtl::until(any, PositiveLtl::atom(p))
    }

    #[test]
    fn immediate_win() {
        let t = three_state(false);
        let r = synthesize(&t, 0, &PositiveLtl::atom("p1")).unwrap();
        assert!(r.realizable);
        assert_eq!(r.horizon, Some(0));
        let any = CtrlStrategy::constant(&t, BTreeSet::from([1])).unwrap();
        assert!(verify_under_strategy(&t, 0, &any, &PositiveLtl::atom("p1")).unwrap());
    }

    #[test]
    fn reach_goal_needs_safe_action() {
        let t = three_state(false);
        let r = synthesize(&t, 0, &eventually("p2")).unwrap();
        assert!(r.realizable);
        assert_eq!(r.horizon, Some(1));
        let s = r.strategy.unwrap();
        assert_eq!(s.actions(s.initial_memory(), 0), Some(&BTreeSet::from([0])));
        assert!(verify_under_strategy(&t, 0, &s, &eventually("p2")).unwrap());
        let trap = CtrlStrategy::constant(&t, BTreeSet::from([1])).unwrap();
        assert!(!verify_under_strategy(&t, 0, &trap, &eventually("p2")).unwrap());
        let forced = three_state(true);
        assert!(!synthesize(&forced, 0, &eventually("p2")).unwrap().realizable);
    }

    #[test]
    fn undefined_strategy_entry_is_error() {
        let t = three_state(false);
        let partial = CtrlStrategy::new(&t, 0, BTreeMap::new(), BTreeMap::new()).unwrap();
        assert!(matches!(
            verify_under_strategy(&t, 0, &partial, &eventually("p2")),
            Err(Error::Strategy(_))
        ));
    }

    #[test]
    fn identity_transfer_has_no_violations() {
        let t = three_state(false);
        let rep = transfer_harness(&t, &t, 0.0, &eventually("p2")).unwrap();
        assert!(rep.systems_bisimilar);
        assert_eq!(rep.violations, 0);
        assert!(rep.pairs.iter().any(|r| r.synth_abs));
    }
}
