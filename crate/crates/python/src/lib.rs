use altbisim::bisim::{aea_bisim, approx_bisim, distinguish_in, BisimResult, Distinction};
use altbisim::dsl::{parse_ltl, parse_state_formula, parse_system, print_system};
use altbisim::fixture;
use altbisim::logic::{eval_bounded, tr_epsilon, ExactChecker, Verdict};
use altbisim::model::{AgentAts, AgentSet, LabelAts, System, TransitionSystem};
use altbisim::relations::{h_inverse, h_partner};
use altbisim::synthesis::{synthesize as synth_core, transfer_harness};
use pyo3::create_exception;
use pyo3::exceptions::{PyException, PyValueError};
use pyo3::prelude::*;

create_exception!(altbisim, AltbisimError, PyException);
create_exception!(altbisim, ParseError, AltbisimError);

fn py_err(e: altbisim::Error) -> PyErr {
    match e {
        altbisim::Error::Parse(_) => ParseError::new_err(e.to_string()),
        other => AltbisimError::new_err(other.to_string()),
    }
}

fn agents_of(sys: &AgentAts, agents: Option<Vec<u32>>) -> PyResult<AgentSet> {
    let ag = match agents {
        Some(v) => AgentSet::new(v),
        None => sys.agents().clone(),
    };
    if !ag.is_subset(sys.agents()) {
        return Err(PyValueError::new_err("coalition names an agent the system lacks"));
    }
    Ok(ag)
}

fn state_of<S: TransitionSystem>(sys: &S, name: &str) -> PyResult<usize> {
    sys.require_state(name).map_err(py_err)
}

/// Concurrent multi-agent system where each agent picks a set of successors.
#[pyclass(module = "altbisim", frozen)]
pub struct AgentSystem {
    inner: AgentAts,
}

#[pymethods]
impl AgentSystem {
    #[getter]
    fn name(&self) -> String {
        self.inner.name().to_string()
    }

    #[getter]
    fn states(&self) -> Vec<String> {
        self.inner.state_names().to_vec()
    }

    #[getter]
    fn agents(&self) -> Vec<u32> {
        self.inner.agents().iter().collect()
    }

    /// Structural violations as messages; empty for a valid system.
    fn validate(&self) -> Vec<String> {
        self.inner.validate().iter().map(|v| format!("{v:?}")).collect()
    }

    fn to_text(&self) -> String {
        print_system(&System::Agent(self.inner.clone()))
    }

    fn __repr__(&self) -> String {
        format!("AgentSystem({:?}, {} states)", self.inner.name(), self.inner.num_states())
    }
}

/// Control system whose transitions carry a control action and a disturbance.
#[pyclass(module = "altbisim", frozen)]
pub struct LabeledSystem {
    inner: LabelAts,
}

#[pymethods]
impl LabeledSystem {
    #[getter]
    fn name(&self) -> String {
        self.inner.name().to_string()
    }

    #[getter]
    fn states(&self) -> Vec<String> {
        self.inner.state_names().to_vec()
    }

    #[getter]
    fn controls(&self) -> Vec<String> {
        self.inner.controls().to_vec()
    }

    #[getter]
    fn disturbances(&self) -> Vec<String> {
        self.inner.disturbances().to_vec()
    }

    fn validate(&self) -> Vec<String> {
        self.inner.validate().iter().map(|v| format!("{v:?}")).collect()
    }

    fn to_text(&self) -> String {
        print_system(&System::Labeled(self.inner.clone()))
    }

    fn __repr__(&self) -> String {
        format!("LabeledSystem({:?}, {} states)", self.inner.name(), self.inner.num_states())
    }
}

/// Greatest bisimulation between two systems, with pairs as state names.
#[pyclass(module = "altbisim", frozen)]
pub struct Bisimulation {
    #[pyo3(get)]
    relation: Vec<(String, String)>,
    #[pyo3(get)]
    epsilon: f64,
    #[pyo3(get)]
    rounds: usize,
    #[pyo3(get)]
    systems_bisimilar: bool,
}

impl Bisimulation {
    fn new<S: TransitionSystem>(t1: &S, t2: &S, r: &BisimResult) -> Self {
        Self {
            relation: r
                .relation
                .iter()
                .map(|&(a, b)| (t1.state_name(a).to_string(), t2.state_name(b).to_string()))
                .collect(),
            epsilon: r.epsilon,
            rounds: r.rounds,
            systems_bisimilar: r.systems_bisimilar,
        }
    }
}

#[pymethods]
impl Bisimulation {
    fn related(&self, q1: &str, q2: &str) -> bool {
        self.relation.iter().any(|(a, b)| a == q1 && b == q2)
    }

    fn __len__(&self) -> usize {
        self.relation.len()
    }

    fn __repr__(&self) -> String {
        format!("Bisimulation(eps={}, {} pairs)", self.epsilon, self.relation.len())
    }
}

fn wrap(py: Python<'_>, sys: System) -> PyResult<Py<PyAny>> {
    Ok(match sys {
        System::Agent(t) => Py::new(py, AgentSystem { inner: t })?.into_any(),
        System::Labeled(t) => Py::new(py, LabeledSystem { inner: t })?.into_any(),
    })
}

/// Parses system text into an `AgentSystem` or a `LabeledSystem`.
#[pyfunction]
fn parse(py: Python<'_>, text: &str) -> PyResult<Py<PyAny>> {
    wrap(py, parse_system(text).map_err(py_err)?)
}

/// Reads and parses a system file.
#[pyfunction]
fn load(py: Python<'_>, path: &str) -> PyResult<Py<PyAny>> {
    let text = std::fs::read_to_string(path).map_err(|e| PyValueError::new_err(format!("{path}: {e}")))?;
    wrap(py, altbisim::dsl::parse_system_in(&text, Some(path)).map_err(py_err)?)
}

#[pyfunction]
#[pyo3(signature = (seed, states=3, agents=2, observations=2, max_choices=2))]
fn gen_agent(seed: u64, states: usize, agents: u32, observations: usize, max_choices: usize) -> PyResult<AgentSystem> {
    Ok(AgentSystem {
        inner: fixture::gen_agent(seed, states, agents, observations, max_choices).map_err(py_err)?,
    })
}

#[pyfunction]
#[pyo3(signature = (seed, states=3, controls=2, disturbances=2, observations=2, max_successors=2))]
fn gen_labeled(
    seed: u64,
    states: usize,
    controls: usize,
    disturbances: usize,
    observations: usize,
    max_successors: usize,
) -> PyResult<LabeledSystem> {
    Ok(LabeledSystem {
        inner: fixture::gen_labeled(seed, states, controls, disturbances, observations, max_successors).map_err(py_err)?,
    })
}

/// Greatest alternating approximate bisimulation for a coalition (all agents by default).
#[pyfunction]
#[pyo3(signature = (sys1, sys2, eps, agents=None))]
fn bisim(sys1: &AgentSystem, sys2: &AgentSystem, eps: f64, agents: Option<Vec<u32>>) -> PyResult<Bisimulation> {
    let ag = agents_of(&sys1.inner, agents)?;
    let r = approx_bisim(&sys1.inner, &sys2.inner, &ag, eps).map_err(py_err)?;
    Ok(Bisimulation::new(&sys1.inner, &sys2.inner, &r))
}

/// Greatest bisimulation between two labeled systems.
#[pyfunction]
fn aea_bisimulation(sys1: &LabeledSystem, sys2: &LabeledSystem, eps: f64) -> PyResult<Bisimulation> {
    let r = aea_bisim(&sys1.inner, &sys2.inner, eps).map_err(py_err)?;
    Ok(Bisimulation::new(&sys1.inner, &sys2.inner, &r))
}

/// Truth of a state formula at a state. With `bounded`, a three-valued
/// check over prefixes of that many states returning `None` when unknown.
#[pyfunction]
#[pyo3(signature = (sys, state, formula, eps=0.0, bounded=None))]
fn check(sys: &AgentSystem, state: &str, formula: &str, eps: f64, bounded: Option<usize>) -> PyResult<Option<bool>> {
    let t = &sys.inner;
    let q = state_of(t, state)?;
    let f = parse_state_formula(formula, Some(t.space())).map_err(py_err)?;
    match bounded {
        Some(k) => Ok(match eval_bounded(t, q, &f, k, eps).map_err(py_err)? {
            Verdict::True => Some(true),
            Verdict::False => Some(false),
            Verdict::Unknown => None,
        }),
        None => Ok(Some(ExactChecker::new(t, eps).sat(&f).map_err(py_err)?[q])),
    }
}

/// Partner formula of a left formula, or of a right one with `inverse`; `None` outside the domain.
#[pyfunction]
#[pyo3(signature = (formula, agents, eps, inverse=false))]
fn partner(formula: &str, agents: Vec<u32>, eps: f64, inverse: bool) -> PyResult<Option<String>> {
    let f = parse_state_formula(formula, None).map_err(py_err)?;
    let ag = AgentSet::new(agents);
    let out = if inverse { h_inverse(&f, &ag, eps) } else { h_partner(&f, &ag, eps) };
    Ok(out.map_err(py_err)?.map(|g| g.to_string()))
}

/// Widens every atom of a negation-free LTL formula to radius `eps`.
#[pyfunction]
fn tr(formula: &str, eps: f64) -> PyResult<String> {
    let f = parse_ltl(formula, None).map_err(py_err)?;
    Ok(tr_epsilon(&f, eps).map_err(py_err)?.to_string())
}

/// `(phi, gamma)` with `q1` satisfying phi and `q2` violating gamma, or `None` if bisimilar.
#[pyfunction]
#[pyo3(signature = (sys1, sys2, q1, q2, eps, agents=None))]
fn distinguish(
    sys1: &AgentSystem,
    sys2: &AgentSystem,
    q1: &str,
    q2: &str,
    eps: f64,
    agents: Option<Vec<u32>>,
) -> PyResult<Option<(String, String)>> {
    let ag = agents_of(&sys1.inner, agents)?;
    let (a, b) = (state_of(&sys1.inner, q1)?, state_of(&sys2.inner, q2)?);
    let r = approx_bisim(&sys1.inner, &sys2.inner, &ag, eps).map_err(py_err)?;
    Ok(match distinguish_in(&sys1.inner, &sys2.inner, &r, a, b).map_err(py_err)? {
        Distinction::Bisimilar => None,
        Distinction::Distinguished { phi, gamma } => Some((phi.to_string(), gamma.to_string())),
    })
}

/// `(realizable, horizon)` for a specification from a state.
#[pyfunction]
fn synthesize(sys: &LabeledSystem, state: &str, spec: &str) -> PyResult<(bool, Option<usize>)> {
    let t = &sys.inner;
    let q = state_of(t, state)?;
    let f = parse_ltl(spec, Some(t.space())).map_err(py_err)?;
    let r = synth_core(t, q, &f).map_err(py_err)?;
    Ok((r.realizable, r.horizon))
}

/// Number of related pairs where the abstraction enforces `spec` but the
/// sample cannot enforce its widened translation.
#[pyfunction]
fn transfer(sample: &LabeledSystem, abstraction: &LabeledSystem, eps: f64, spec: &str) -> PyResult<usize> {
    let f = parse_ltl(spec, Some(abstraction.inner.space())).map_err(py_err)?;
    Ok(transfer_harness(&sample.inner, &abstraction.inner, eps, &f).map_err(py_err)?.violations)
}

#[pymodule]
#[pyo3(name = "altbisim")]
fn altbisim_module(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("AltbisimError", m.py().get_type::<AltbisimError>())?;
    m.add("ParseError", m.py().get_type::<ParseError>())?;
    m.add_class::<AgentSystem>()?;
    m.add_class::<LabeledSystem>()?;
    m.add_class::<Bisimulation>()?;
    m.add_function(wrap_pyfunction!(parse, m)?)?;
    m.add_function(wrap_pyfunction!(load, m)?)?;
    m.add_function(wrap_pyfunction!(gen_agent, m)?)?;
    m.add_function(wrap_pyfunction!(gen_labeled, m)?)?;
    m.add_function(wrap_pyfunction!(bisim, m)?)?;
    m.add_function(wrap_pyfunction!(aea_bisimulation, m)?)?;
    m.add_function(wrap_pyfunction!(check, m)?)?;
    m.add_function(wrap_pyfunction!(partner, m)?)?;
    m.add_function(wrap_pyfunction!(tr, m)?)?;
    m.add_function(wrap_pyfunction!(distinguish, m)?)?;
    m.add_function(wrap_pyfunction!(synthesize, m)?)?;
    m.add_function(wrap_pyfunction!(transfer, m)?)?;
    Ok(())
}
