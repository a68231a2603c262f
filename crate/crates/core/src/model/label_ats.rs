use std::collections::{BTreeSet, HashMap};
use std::sync::Arc;

use super::{MetricObsSpace, StateId, TransitionSystem, Violation};
use crate::error::{Error, Result};

pub type ActionId = usize;
pub type DisturbanceId = usize;

/// Control/disturbance-labeled alternating transition system with a
/// (possibly nondeterministic) transition relation over `S x A x B x S`.
#[derive(Debug, Clone)]
pub struct LabelAts {
    name: String,
    space: Arc<MetricObsSpace>,
    states: Vec<String>,
    state_index: HashMap<String, StateId>,
    obs: Vec<usize>,
    controls: Vec<String>,
    disturbances: Vec<String>,
    // post[q][a][b] = sorted successor list
    post: Vec<Vec<Vec<Vec<StateId>>>>,
}

pub struct LabelAtsBuilder {
    inner: LabelAts,
    pending: BTreeSet<(StateId, ActionId, DisturbanceId, StateId)>,
}

impl LabelAtsBuilder {
    pub fn new(
        name: impl Into<String>,
        space: Arc<MetricObsSpace>,
        controls: Vec<String>,
        disturbances: Vec<String>,
    ) -> Result<Self> {
        if controls.is_empty() || disturbances.is_empty() {
            return Err(Error::input("control and disturbance sets must be nonempty"));
        }
        for labels in [&controls, &disturbances] {
            let uniq: BTreeSet<&String> = labels.iter().collect();
            if uniq.len() != labels.len() {
                return Err(Error::input("duplicate control or disturbance label"));
            }
        }
        Ok(Self {
            inner: LabelAts {
                name: name.into(),
                space,
                states: Vec::new(),
                state_index: HashMap::new(),
                obs: Vec::new(),
                controls,
                disturbances,
                post: Vec::new(),
            },
            pending: BTreeSet::new(),
        })
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
        Ok(id)
    }

    pub fn state(&self, name: &str) -> Result<StateId> {
        self.inner.require_state(name)
    }

    pub fn control(&self, name: &str) -> Result<ActionId> {
        self.inner
            .control_index(name)
            .ok_or_else(|| Error::input(format!("unknown control `{name}`")))
    }

    pub fn disturbance(&self, name: &str) -> Result<DisturbanceId> {
        self.inner
            .disturbance_index(name)
            .ok_or_else(|| Error::input(format!("unknown disturbance `{name}`")))
    }

    pub fn add_transition(&mut self, from: StateId, a: ActionId, b: DisturbanceId, to: StateId) -> Result<()> {
        let n = self.inner.states.len();
        if from >= n || to >= n || a >= self.inner.controls.len() || b >= self.inner.disturbances.len() {
            return Err(Error::input("transition refers to an unknown state or label"));
        }
        self.pending.insert((from, a, b, to));
        Ok(())
    }

    pub fn build(mut self) -> LabelAts {
        let n = self.inner.states.len();
        let na = self.inner.controls.len();
        let nb = self.inner.disturbances.len();
        let mut post = vec![vec![vec![Vec::new(); nb]; na]; n];
        for &(q, a, b, t) in &self.pending {
            post[q][a][b].push(t);
        }
        self.inner.post = post;
        self.inner
    }
}

impl LabelAts {
    pub fn controls(&self) -> &[String] {
        &self.controls
    }

    pub fn disturbances(&self) -> &[String] {
        &self.disturbances
    }

    pub fn control_index(&self, name: &str) -> Option<ActionId> {
        self.controls.iter().position(|c| c == name)
    }

    pub fn disturbance_index(&self, name: &str) -> Option<DisturbanceId> {
        self.disturbances.iter().position(|c| c == name)
    }

    pub fn space_arc(&self) -> &Arc<MetricObsSpace> {
        &self.space
    }

    /// Successors of `q` under the label pair `(a, b)`, sorted.
    pub fn post(&self, q: StateId, a: ActionId, b: DisturbanceId) -> &[StateId] {
        &self.post[q][a][b]
    }

    /// All quadruples in declaration-independent (sorted) order.
    pub fn transitions(&self) -> impl Iterator<Item = (StateId, ActionId, DisturbanceId, StateId)> + '_ {
        self.post.iter().enumerate().flat_map(|(q, per_a)| {
            per_a.iter().enumerate().flat_map(move |(a, per_b)| {
                per_b
                    .iter()
                    .enumerate()
                    .flat_map(move |(b, succ)| succ.iter().map(move |&t| (q, a, b, t)))
            })
        })
    }

    pub fn validate(&self) -> Vec<Violation> {
        let mut out: Vec<Violation> = self
            .space
            .axiom_violations()
            .into_iter()
            .map(Violation::Metric)
            .collect();
        for q in 0..self.states.len() {
            for a in 0..self.controls.len() {
                for b in 0..self.disturbances.len() {
                    if self.post[q][a][b].is_empty() {
                        out.push(Violation::Blocking {
                            state: self.states[q].clone(),
                            control: self.controls[a].clone(),
                            disturbance: self.disturbances[b].clone(),
                        });
                    }
                }
            }
        }
        out
    }

    pub fn state_names(&self) -> &[String] {
        &self.states
    }
}

impl TransitionSystem for LabelAts {
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
        self.post[from]
            .iter()
            .any(|per_b| per_b.iter().any(|succ| succ.binary_search(&to).is_ok()))
    }
}
