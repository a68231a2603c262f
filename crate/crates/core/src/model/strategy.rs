use std::collections::{BTreeMap, BTreeSet};

use super::{ActionId, AgentAts, AgentSet, LabelAts, StateId, StateSet};
use crate::error::{Error, Result};

/// Finite-memory strategy of an agent coalition.
///
/// `table[(m, q)]` is the chosen set when the memory is `m` and the current
/// state is `q`; on moving to successor `q'` the memory becomes
/// `update[(m, q')]`, or stays `m` when no update is listed.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AgStrategy {
    agents: AgentSet,
    initial_memory: usize,
    table: BTreeMap<(usize, StateId), StateSet>,
    update: BTreeMap<(usize, StateId), usize>,
}

impl AgStrategy {
    /// Every table entry must be an element of `hbar(q, agents)`.
    pub fn new(
        sys: &AgentAts,
        agents: AgentSet,
        initial_memory: usize,
        table: BTreeMap<(usize, StateId), StateSet>,
        update: BTreeMap<(usize, StateId), usize>,
    ) -> Result<Self> {
        for (&(m, q), set) in &table {
            let allowed = sys.hbar_set(q, &agents)?;
            if !allowed.contains(set) {
                return Err(Error::Strategy(format!(
                    "entry (memory {m}, state {}) chooses {:?}, which is not a joint choice of {{{agents}}}",
                    sys.state_names()[q],
                    sys.set_names(set)
                )));
            }
        }
        Ok(Self {
            agents,
            initial_memory,
            table,
            update,
        })
    }

    pub fn memoryless(sys: &AgentAts, agents: AgentSet, choice: BTreeMap<StateId, StateSet>) -> Result<Self> {
        let table = choice.into_iter().map(|(q, s)| ((0, q), s)).collect();
        Self::new(sys, agents, 0, table, BTreeMap::new())
    }

    pub fn agents(&self) -> &AgentSet {
        &self.agents
    }

    pub fn initial_memory(&self) -> usize {
        self.initial_memory
    }

    pub fn choice(&self, memory: usize, q: StateId) -> Option<&StateSet> {
        self.table.get(&(memory, q))
    }

    pub fn next_memory(&self, memory: usize, successor: StateId) -> usize {
        self.update.get(&(memory, successor)).copied().unwrap_or(memory)
    }

    pub fn entries(&self) -> impl Iterator<Item = (&(usize, StateId), &StateSet)> {
        self.table.iter()
    }
}

/// Finite-memory control strategy for a labeled system. Every emitted action
/// set is nonempty.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CtrlStrategy {
    initial_memory: usize,
    table: BTreeMap<(usize, StateId), BTreeSet<ActionId>>,
    update: BTreeMap<(usize, StateId), usize>,
}

impl CtrlStrategy {
    pub fn new(
        sys: &LabelAts,
        initial_memory: usize,
        table: BTreeMap<(usize, StateId), BTreeSet<ActionId>>,
        update: BTreeMap<(usize, StateId), usize>,
    ) -> Result<Self> {
        for (&(m, q), acts) in &table {
            if acts.is_empty() {
                return Err(Error::Strategy(format!(
                    "entry (memory {m}, state {}) emits the empty action set",
                    sys.state_names()[q]
                )));
            }
            if let Some(a) = acts.iter().find(|&&a| a >= sys.controls().len()) {
                return Err(Error::Strategy(format!("unknown control index {a}")));
            }
        }
        Ok(Self {
            initial_memory,
            table,
            update,
        })
    }

    /// A strategy that always offers the same action set.
    pub fn constant(sys: &LabelAts, actions: BTreeSet<ActionId>) -> Result<Self> {
        use super::TransitionSystem;
        let table = (0..sys.num_states()).map(|q| ((0, q), actions.clone())).collect();
        Self::new(sys, 0, table, BTreeMap::new())
    }

    pub fn initial_memory(&self) -> usize {
        self.initial_memory
    }

    pub fn actions(&self, memory: usize, q: StateId) -> Option<&BTreeSet<ActionId>> {
        self.table.get(&(memory, q))
    }

    pub fn next_memory(&self, memory: usize, successor: StateId) -> usize {
        self.update.get(&(memory, successor)).copied().unwrap_or(memory)
    }

    pub fn entries(&self) -> impl Iterator<Item = (&(usize, StateId), &BTreeSet<ActionId>)> {
        self.table.iter()
    }
}
