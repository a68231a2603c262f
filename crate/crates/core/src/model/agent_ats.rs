use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;
use std::sync::Arc;

use serde::Serialize;

use super::{MetricObsSpace, StateId, StateSet, TransitionSystem, Violation};
use crate::error::{Error, Result};

pub type Agent = u32;

/// A set of agents, printed as a comma-separated list.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct AgentSet(BTreeSet<Agent>);

impl AgentSet {
    pub fn new(agents: impl IntoIterator<Item = Agent>) -> Self {
        AgentSet(agents.into_iter().collect())
    }

    pub fn empty() -> Self {
        AgentSet(BTreeSet::new())
    }

    /// Agents `1..=k`.
    pub fn range(k: u32) -> Self {
        AgentSet((1..=k).collect())
    }

    pub fn iter(&self) -> impl Iterator<Item = Agent> + '_ {
        self.0.iter().copied()
    }

    pub fn contains(&self, a: Agent) -> bool {
        self.0.contains(&a)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn is_subset(&self, other: &AgentSet) -> bool {
        self.0.is_subset(&other.0)
    }

    pub fn difference(&self, other: &AgentSet) -> AgentSet {
        AgentSet(self.0.difference(&other.0).copied().collect())
    }
}

impl fmt::Display for AgentSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|a| a.to_string()).collect();
        f.write_str(&parts.join(","))
    }
}

impl FromIterator<Agent> for AgentSet {
    fn from_iter<I: IntoIterator<Item = Agent>>(iter: I) -> Self {
        AgentSet(iter.into_iter().collect())
    }
}

/// Agent-based alternating transition system: every agent constrains the
/// successor by picking one of its choice sets, and the joint choice of all
/// agents pins down exactly one successor.
#[derive(Debug, Clone)]
pub struct AgentAts {
    name: String,
    space: Arc<MetricObsSpace>,
    agents: AgentSet,
    states: Vec<String>,
    state_index: HashMap<String, StateId>,
    obs: Vec<usize>,
    choices: Vec<BTreeMap<Agent, Vec<StateSet>>>,
}

pub struct AgentAtsBuilder {
    inner: AgentAts,
}

impl AgentAtsBuilder {
    pub fn new(name: impl Into<String>, space: Arc<MetricObsSpace>, num_agents: u32) -> Self {
        Self {
            inner: AgentAts {
                name: name.into(),
                space,
                agents: AgentSet::range(num_agents),
                states: Vec::new(),
                state_index: HashMap::new(),
                obs: Vec::new(),
                choices: Vec::new(),
            },
        }
    }

    pub fn add_state(&mut self, name: &str, obs: &str) -> Result<StateId> {
        let o = self.inner.space.require(obs)?;
        if self.inner.state_index.contains_key(name) {
            return Err(Error::input(format!("state `{name}` declared twice")));
        }
        let id = self.inner.states.len();
        self.inner.states.push(name.to_string());
        self.inner.state_index.insert(name.to_string(), id);
        self.inner.obs.push(o);
        self.inner.choices.push(BTreeMap::new());
        Ok(id)
    }

    pub fn state(&self, name: &str) -> Result<StateId> {
        self.inner.require_state(name)
    }

    /// Sets `hbar(state, agent)`; duplicated member sets are kept once.
    pub fn set_choice(&mut self, state: StateId, agent: Agent, sets: Vec<StateSet>) -> Result<()> {
        if !self.inner.agents.contains(agent) {
            return Err(Error::input(format!("unknown agent {agent}")));
        }
        if state >= self.inner.states.len() {
            return Err(Error::input(format!("unknown state index {state}")));
        }
        let mut uniq: Vec<StateSet> = Vec::new();
        for s in sets {
            if let Some(bad) = s.iter().find(|&&x| x >= self.inner.states.len()) {
                return Err(Error::input(format!("unknown state index {bad}")));
            }
            if !uniq.contains(&s) {
                uniq.push(s);
            }
        }
        if self.inner.choices[state].insert(agent, uniq).is_some() {
            return Err(Error::input(format!(
                "choice for state `{}` agent {agent} given twice",
                self.inner.states[state]
            )));
        }
        Ok(())
    }

    pub fn build(self) -> AgentAts {
        self.inner
    }
}

impl AgentAts {
    pub fn agents(&self) -> &AgentSet {
        &self.agents
    }

    pub fn space_arc(&self) -> &Arc<MetricObsSpace> {
        &self.space
    }

    /// `hbar(q, i)` as written.
    pub fn choices(&self, q: StateId, agent: Agent) -> &[StateSet] {
        self.choices[q].get(&agent).map(Vec::as_slice).unwrap_or(&[])
    }

    /// All intersections obtainable by letting each agent of `ag` pick one of
    /// its sets. The empty agent set yields the whole state space. Order
    /// follows the input order of choices; duplicates are dropped.
    pub fn hbar_set(&self, q: StateId, ag: &AgentSet) -> Result<Vec<StateSet>> {
        if q >= self.states.len() {
            return Err(Error::input(format!("unknown state index {q}")));
        }
        if !ag.is_subset(&self.agents) {
            return Err(Error::input(format!(
                "agent set {{{ag}}} is not a subset of {{{}}}",
                self.agents
            )));
        }
        Ok(self.joint_choices(q, ag))
    }

    pub(crate) fn joint_choices(&self, q: StateId, ag: &AgentSet) -> Vec<StateSet> {
        let mut acc: Vec<StateSet> = vec![(0..self.states.len()).collect()];
        for agent in ag.iter() {
            let mut next = Vec::new();
            for partial in &acc {
                for set in self.choices(q, agent) {
                    let meet: StateSet = partial.intersection(set).copied().collect();
                    if !next.contains(&meet) {
                        next.push(meet);
                    }
                }
            }
            acc = next;
        }
        acc
    }

    pub fn complement(&self, ag: &AgentSet) -> AgentSet {
        self.agents.difference(ag)
    }

    pub fn validate(&self) -> Vec<Violation> {
        let mut out: Vec<Violation> = self
            .space
            .axiom_violations()
            .into_iter()
            .map(Violation::Metric)
            .collect();
        for q in 0..self.states.len() {
            let mut complete = true;
            for agent in self.agents.iter() {
                match self.choices[q].get(&agent) {
                    None => {
                        complete = false;
                        out.push(Violation::MissingChoice {
                            state: self.states[q].clone(),
                            agent,
                        });
                    }
                    Some(sets) if sets.is_empty() => {
                        complete = false;
                        out.push(Violation::MissingChoice {
                            state: self.states[q].clone(),
                            agent,
                        });
                    }
                    Some(sets) => {
                        if sets.iter().any(BTreeSet::is_empty) {
                            complete = false;
                            out.push(Violation::EmptyChoiceSet {
                                state: self.states[q].clone(),
                                agent,
                            });
                        }
                    }
                }
            }
            if complete {
                self.check_selections(q, &mut out);
            }
        }
        out
    }

    fn check_selections(&self, q: StateId, out: &mut Vec<Violation>) {
        let agents: Vec<Agent> = self.agents.iter().collect();
        let mut pick = vec![0usize; agents.len()];
        loop {
            let mut meet: StateSet = (0..self.states.len()).collect();
            for (k, &agent) in agents.iter().enumerate() {
                let set = &self.choices(q, agent)[pick[k]];
                meet = meet.intersection(set).copied().collect();
            }
            if meet.len() != 1 {
                out.push(Violation::NotSingleton {
                    state: self.states[q].clone(),
                    selection: agents
                        .iter()
                        .enumerate()
                        .map(|(k, &agent)| {
                            (agent, self.set_names(&self.choices(q, agent)[pick[k]]))
                        })
                        .collect(),
                    size: meet.len(),
                });
            }
            // odometer over the per-agent choice indices
            let mut k = 0;
            loop {
                if k == agents.len() {
                    return;
                }
                pick[k] += 1;
                if pick[k] < self.choices(q, agents[k]).len() {
                    break;
                }
                pick[k] = 0;
                k += 1;
            }
        }
    }

    pub fn set_names(&self, set: &StateSet) -> Vec<String> {
        set.iter().map(|&s| self.states[s].clone()).collect()
    }

    pub fn state_names(&self) -> &[String] {
        &self.states
    }
}

impl TransitionSystem for AgentAts {
    fn name(&self) -> &str {
        &self.name
    }

    fn space(&self) -> &MetricObsSpace {
        &self.space
    }

    fn num_states(&self) -> usize {
        self.states.len()
    }

    fn state_name(&self, q: StateId) -> &str {
        &self.states[q]
    }

    fn state_index(&self, name: &str) -> Option<StateId> {
        self.state_index.get(name).copied()
    }

    fn observation(&self, q: StateId) -> usize {
        self.obs[q]
    }

    fn has_edge(&self, from: StateId, to: StateId) -> bool {
        self.joint_choices(from, &self.agents)
            .iter()
            .any(|s| s.contains(&to))
    }
}
