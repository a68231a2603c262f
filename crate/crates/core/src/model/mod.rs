//! System models: metric observation spaces, agent-based and labeled
//! alternating transition systems, strategies, outcomes and lassos.

mod agent_ats;
mod label_ats;
mod lasso;
mod metric;
mod strategy;

use std::collections::{BTreeSet, HashSet};
use std::fmt;

use serde::Serialize;

pub use agent_ats::{Agent, AgentAts, AgentAtsBuilder, AgentSet};
pub use label_ats::{ActionId, DisturbanceId, LabelAts, LabelAtsBuilder};
pub use lasso::{lasso_check, Lasso};
pub use metric::{within, MetricKind, MetricObsSpace, TOLERANCE};
pub use strategy::{AgStrategy, CtrlStrategy};

use crate::error::{Error, Result};

pub type StateId = usize;
pub type StateSet = BTreeSet<StateId>;

/// Read-only view shared by both system kinds.
pub trait TransitionSystem {
    fn name(&self) -> &str;
    fn space(&self) -> &MetricObsSpace;
    fn num_states(&self) -> usize;
    fn state_name(&self, q: StateId) -> &str;
    fn state_index(&self, name: &str) -> Option<StateId>;
    fn observation(&self, q: StateId) -> usize;
    /// Whether some resolution of all choices leads from `from` to `to`.
    fn has_edge(&self, from: StateId, to: StateId) -> bool;

    fn require_state(&self, name: &str) -> Result<StateId> {
        self.state_index(name)
            .ok_or_else(|| Error::input(format!("unknown state `{name}` in system `{}`", self.name())))
    }
}

/// A broken structural invariant of a system.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Violation {
    MissingChoice {
        state: String,
        agent: Agent,
    },
    EmptyChoiceSet {
        state: String,
        agent: Agent,
    },
    /// A joint selection whose intersection is not a singleton.
    NotSingleton {
        state: String,
        selection: Vec<(Agent, Vec<String>)>,
        size: usize,
    },
    Blocking {
        state: String,
        control: String,
        disturbance: String,
    },
    Metric(String),
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::MissingChoice { state, agent } => {
                write!(f, "state {state}: agent {agent} has no choice sets")
            }
            Violation::EmptyChoiceSet { state, agent } => {
                write!(f, "state {state}: agent {agent} offers the empty set")
            }
            Violation::NotSingleton { state, selection, size } => {
                let sel: Vec<String> = selection
                    .iter()
                    .map(|(a, s)| format!("{a}:{{{}}}", s.join(",")))
                    .collect();
                write!(
                    f,
                    "state {state}: selection [{}] intersects to {size} states (expected 1)",
                    sel.join(" ")
                )
            }
            Violation::Blocking {
                state,
                control,
                disturbance,
            } => write!(f, "state {state}: no successor under ({control}, {disturbance})"),
            Violation::Metric(msg) => write!(f, "metric: {msg}"),
        }
    }
}

/// Either kind of system, as read from a file.
#[derive(Debug, Clone)]
pub enum System {
    Agent(AgentAts),
    Labeled(LabelAts),
}

impl System {
    pub fn validate(&self) -> Vec<Violation> {
        match self {
            System::Agent(t) => t.validate(),
            System::Labeled(t) => t.validate(),
        }
    }

    pub fn as_dyn(&self) -> &dyn TransitionSystem {
        match self {
            System::Agent(t) => t,
            System::Labeled(t) => t,
        }
    }
}

/// `Out^n(q, F)`: all length-`n` traces from `q` consistent with `strategy`,
/// built one step at a time.
pub fn outcomes_n(
    sys: &AgentAts,
    q: StateId,
    strategy: &AgStrategy,
    ag: &AgentSet,
    n: usize,
) -> Result<BTreeSet<Vec<StateId>>> {
    if n == 0 {
        return Err(Error::input("outcome length must be positive"));
    }
    if strategy.agents() != ag {
        return Err(Error::Strategy(format!(
            "strategy belongs to {{{}}}, not {{{ag}}}",
            strategy.agents()
        )));
    }
    sys.hbar_set(q, ag)?;
    let opponents = sys.complement(ag);
    let mut frontier: HashSet<(Vec<StateId>, usize)> = HashSet::new();
    frontier.insert((vec![q], strategy.initial_memory()));
    for _ in 1..n {
        let mut next = HashSet::new();
        for (trace, mem) in frontier {
            let last = *trace.last().expect("traces are nonempty");
            let chosen = strategy.choice(mem, last).ok_or_else(|| {
                Error::Strategy(format!(
                    "no entry for memory {mem} at state {}",
                    sys.state_names()[last]
                ))
            })?;
            for counter in sys.joint_choices(last, &opponents) {
                let meet: Vec<StateId> = chosen.intersection(&counter).copied().collect();
                if let [succ] = meet[..] {
                    let mut t = trace.clone();
                    t.push(succ);
                    next.insert((t, strategy.next_memory(mem, succ)));
                }
            }
        }
        frontier = next;
    }
    Ok(frontier.into_iter().map(|(t, _)| t).collect())
}

/// Outcomes of a control strategy: at each step some offered action and any
/// disturbance may fire, with any of the resulting successors.
pub fn ctrl_outcomes_n(
    sys: &LabelAts,
    q: StateId,
    strategy: &CtrlStrategy,
    n: usize,
) -> Result<BTreeSet<Vec<StateId>>> {
    if n == 0 {
        return Err(Error::input("outcome length must be positive"));
    }
    if q >= sys.num_states() {
        return Err(Error::input(format!("unknown state index {q}")));
    }
    let mut frontier: HashSet<(Vec<StateId>, usize)> = HashSet::new();
    frontier.insert((vec![q], strategy.initial_memory()));
    for _ in 1..n {
        let mut next = HashSet::new();
        for (trace, mem) in frontier {
            let last = *trace.last().expect("traces are nonempty");
            let actions = strategy.actions(mem, last).ok_or_else(|| {
                Error::Strategy(format!(
                    "no entry for memory {mem} at state {}",
                    sys.state_names()[last]
                ))
            })?;
            for &a in actions {
                for b in 0..sys.disturbances().len() {
                    for &succ in sys.post(last, a, b) {
                        let mut t = trace.clone();
                        t.push(succ);
                        next.insert((t, strategy.next_memory(mem, succ)));
                    }
                }
            }
        }
        frontier = next;
    }
    Ok(frontier.into_iter().map(|(t, _)| t).collect())
}
