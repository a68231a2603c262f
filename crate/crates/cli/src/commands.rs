use std::fmt::Write as _;

use serde_json::{json, Value};

use altbisim::bisim::{aea_bisim, approx_bisim, distinguish_in, BisimResult, Distinction, Reason, Witness};
use altbisim::dsl::{parse_ltl, parse_path_formula, parse_state_formula, parse_system_in, print_system};
use altbisim::fixture::{gen_fixture, FixtureShape};
use altbisim::logic::{eval_bounded, eval_lasso_ltl, eval_state, tr_epsilon, ExactChecker, StateFormula};
use altbisim::model::{AgentAts, AgentSet, LabelAts, Lasso, System, TransitionSystem};
use altbisim::oracle::{bounded_game, enum_bisim_agent, enum_bisim_label, enum_strategies, unroll_eval, unroll_length};
use altbisim::relations::{e_inverse, e_partner, h_derivation, h_inverse, Pair};
use altbisim::synthesis::{synthesize, transfer_harness, verify_under_strategy};
use altbisim::Error;

use crate::{Command, FormulaSource, OracleCommand, PairArgs};

pub const SUCCESS: u8 = 0;
pub const VIOLATION: u8 = 1;
pub const INPUT_ERROR: u8 = 2;

/// What a command prints and how it exits.
pub struct Report {
    pub code: u8,
    pub json: Value,
    pub text: String,
}

impl Report {
    fn new(code: u8, json: Value, text: String) -> Self {
        Self { code, json, text }
    }
}

/// Failure before a verdict could be produced.
struct Failure(Error);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure(e)
    }
}

type Res<T> = Result<T, Failure>;

fn input(msg: impl Into<String>) -> Failure {
    Failure(Error::Input(msg.into()))
}

fn error_report(e: &Error) -> Report {
    let kind = match e {
        Error::Parse(_) => "parse",
        Error::Input(_) => "input",
        Error::UnsupportedExact(_) => "unsupported-exact",
        Error::Strategy(_) => "strategy",
        Error::InvalidLasso(_) => "invalid-lasso",
        Error::CapExceeded(_) => "cap-exceeded",
    };
    let diagnostics = match e {
        Error::Parse(ds) => serde_json::to_value(ds).expect("serializable"),
        _ => json!([]),
    };
    let text = match e {
        Error::Parse(ds) => ds.iter().map(|d| format!("{d}\n")).collect(),
        Error::UnsupportedExact(_) => format!("error: {e}\nhint: pass --bounded K for a three-valued check\n"),
        _ => format!("error: {e}\n"),
    };
    Report::new(
        INPUT_ERROR,
        json!({ "error": { "kind": kind, "message": e.to_string(), "diagnostics": diagnostics } }),
        text,
    )
}

pub fn run(cmd: &Command) -> Report {
    let out = match cmd {
        Command::Validate { file } => validate(file),
        Command::Bisim { pair, distinguish } => bisim(pair, distinguish.as_deref()),
        Command::AeaBisim { sys1, sys2, eps } => aea(sys1, sys2, *eps),
        Command::Check {
            sys,
            state,
            formula,
            eps,
            bounded,
            witness,
        } => check(sys, state, formula, *eps, *bounded, *witness),
        Command::Partner {
            formula,
            agents,
            eps,
            path,
            inverse,
            derivation,
        } => partner(formula, agents, *eps, *path, *inverse, *derivation),
        Command::Tr { formula, eps } => tr(formula, *eps),
        Command::Distinguish { pair, q1, q2 } => distinguish_cmd(pair, q1, q2),
        Command::Synth { sys, state, formula } => synth(sys, state, formula),
        Command::Transfer {
            sample,
            abstraction,
            eps,
            formula,
        } => transfer(sample, abstraction, *eps, formula),
        Command::Oracle { which } => oracle(which),
        Command::Gen {
            kind,
            seed,
            states,
            observations,
            agents,
            max_choices,
            controls,
            disturbances,
            max_successors,
        } => {
            let shape = if kind == "ats" {
                FixtureShape::Agent {
                    states: *states,
                    agents: *agents,
                    observations: *observations,
                    max_choices: *max_choices,
                }
            } else {
                FixtureShape::Labeled {
                    states: *states,
                    controls: *controls,
                    disturbances: *disturbances,
                    observations: *observations,
                    max_successors: *max_successors,
                }
            };
            gen(*seed, &shape)
        }
    };
    out.unwrap_or_else(|Failure(e)| error_report(&e))
}

fn read_system(path: &str) -> Res<System> {
    let text = std::fs::read_to_string(path).map_err(|e| input(format!("cannot read `{path}`: {e}")))?;
    Ok(parse_system_in(&text, Some(path))?)
}

/// Reads a system and rejects it when it breaks a structural invariant.
fn load(path: &str) -> Res<System> {
    let sys = read_system(path)?;
    let violations = sys.validate();
    if let Some(v) = violations.first() {
        return Err(input(format!(
            "`{path}` is not a valid system ({} violations, first: {v}); run `validate` for details",
            violations.len()
        )));
    }
    Ok(sys)
}

fn load_agent(path: &str) -> Res<AgentAts> {
    match load(path)? {
        System::Agent(t) => Ok(t),
        System::Labeled(_) => Err(input(format!("`{path}` is a labeled system; an agent system is needed"))),
    }
}

fn load_labeled(path: &str) -> Res<LabelAts> {
    match load(path)? {
        System::Labeled(t) => Ok(t),
        System::Agent(_) => Err(input(format!("`{path}` is an agent system; a labeled system is needed"))),
    }
}

fn formula_text(src: &FormulaSource) -> Res<String> {
    match (&src.formula, &src.spec_file) {
        (Some(f), _) => Ok(f.clone()),
        (None, Some(path)) => std::fs::read_to_string(path).map_err(|e| input(format!("cannot read `{path}`: {e}"))),
        (None, None) => Err(input("give a formula with --formula or --spec-file")),
    }
}

fn parse_agents(text: &str) -> Res<AgentSet> {
    let mut out = Vec::new();
    for part in text.split(',').map(str::trim).filter(|s| !s.is_empty()) {
        let a: u32 = part
            .parse()
            .ok()
            .filter(|&a| a >= 1)
            .ok_or_else(|| input(format!("`{part}` is not an agent number")))?;
        out.push(a);
    }
    Ok(AgentSet::new(out))
}

fn agents_or_all(text: &Option<String>, sys: &AgentAts) -> Res<AgentSet> {
    match text {
        Some(t) => parse_agents(t),
        None => Ok(sys.agents().clone()),
    }
}

fn check_eps(eps: f64) -> Res<()> {
    if eps.is_finite() && eps >= 0.0 {
        Ok(())
    } else {
        Err(input(format!("epsilon must be a nonnegative real, got {eps}")))
    }
}

fn state_of(sys: &dyn TransitionSystem, name: &str) -> Res<usize> {
    Ok(sys.require_state(name)?)
}

fn agents_json(ag: &AgentSet) -> Value {
    json!(ag.iter().collect::<Vec<_>>())
}

fn validate(file: &str) -> Res<Report> {
    let sys = read_system(file)?;
    let violations = sys.validate();
    let t = sys.as_dyn();
    let kind = match sys {
        System::Agent(_) => "ats",
        System::Labeled(_) => "lats",
    };
    let mut text = format!("{kind} {}: {} states\n", t.name(), t.num_states());
    for v in &violations {
        let _ = writeln!(text, "violation: {v}");
    }
    if violations.is_empty() {
        text.push_str("valid\n");
    }
    let code = if violations.is_empty() { SUCCESS } else { VIOLATION };
    Ok(Report::new(
        code,
        json!({
            "command": "validate",
            "file": file,
            "kind": kind,
            "name": t.name(),
            "states": t.num_states(),
            "valid": violations.is_empty(),
            "violations": violations,
        }),
        text,
    ))
}

fn witness_json(w: &Witness, reason: Reason, left: &dyn TransitionSystem, right: &dyn TransitionSystem) -> Value {
    let side = if reason == Reason::Back { right } else { left };
    match w {
        Witness::None => Value::Null,
        Witness::Choice(set) => json!({ "choice": set.iter().map(|&q| side.state_name(q)).collect::<Vec<_>>() }),
        Witness::Action(a) => json!({ "action": *a }),
    }
}

fn relation_report(
    command: &str,
    r: &BisimResult,
    left: &dyn TransitionSystem,
    right: &dyn TransitionSystem,
    action_names: Option<(&LabelAts, &LabelAts)>,
) -> (Value, String) {
    let relation: Vec<Value> = r
        .relation
        .iter()
        .map(|&(a, b)| json!([left.state_name(a), right.state_name(b)]))
        .collect();
    let refutations: Vec<Value> = r
        .refutations
        .iter()
        .map(|(&(a, b), f)| {
            let witness = match (&f.witness, action_names) {
                (Witness::Action(x), Some((l, rr))) => {
                    let sys = if f.reason == Reason::Back { rr } else { l };
                    json!({ "action": sys.controls()[*x] })
                }
                (w, _) => witness_json(w, f.reason, left, right),
            };
            json!({
                "left": left.state_name(a),
                "right": right.state_name(b),
                "round": f.round,
                "reason": f.reason,
                "witness": witness,
            })
        })
        .collect();
    let mut text = format!(
        "relation at epsilon {}{}: {} pairs, {} refinement rounds, systems {}bisimilar\n",
        r.epsilon,
        r.agents.as_ref().map_or(String::new(), |a| format!(" for agents {{{a}}}")),
        r.relation.len(),
        r.rounds,
        if r.systems_bisimilar { "" } else { "not " }
    );
    for &(a, b) in &r.relation {
        let _ = writeln!(text, "  {} ~ {}", left.state_name(a), right.state_name(b));
    }
    if !r.refutations.is_empty() {
        text.push_str("removed:\n");
        for (&(a, b), f) in &r.refutations {
            let reason = serde_json::to_value(f.reason).expect("serializable");
            let _ = writeln!(
                text,
                "  ({}, {}) round {} {}",
                left.state_name(a),
                right.state_name(b),
                f.round,
                reason.as_str().unwrap_or_default()
            );
        }
    }
    let json = json!({
        "command": command,
        "epsilon": r.epsilon,
        "agents": r.agents.as_ref().map(agents_json),
        "rounds": r.rounds,
        "systems_bisimilar": r.systems_bisimilar,
        "relation": relation,
        "refutations": refutations,
    });
    (json, text)
}

fn distinction_parts(
    t1: &AgentAts,
    t2: &AgentAts,
    r: &BisimResult,
    q1: usize,
    q2: usize,
) -> Res<(Value, String, bool)> {
    let eps = r.epsilon;
    match distinguish_in(t1, t2, r, q1, q2)? {
        Distinction::Bisimilar => Ok((
            json!({ "left": t1.state_name(q1), "right": t2.state_name(q2), "bisimilar": true }),
            format!("{} and {} are bisimilar\n", t1.state_name(q1), t2.state_name(q2)),
            false,
        )),
        Distinction::Distinguished { phi, gamma } => {
            let holds = eval_state(t1, q1, &phi, eps)?;
            let partner_fails = !eval_state(t2, q2, &gamma, eps)?;
            let (a, b) = (t1.state_name(q1), t2.state_name(q2));
            let text = format!(
                "{a} and {b} are distinguished:\n  phi   = {phi}\n  gamma = {gamma}\n  {a} satisfies phi: {holds}; {b} violates gamma: {partner_fails}\n"
            );
            Ok((
                json!({
                    "left": a,
                    "right": b,
                    "bisimilar": false,
                    "phi": phi.to_string(),
                    "gamma": gamma.to_string(),
                    "phi_holds": holds,
                    "gamma_fails": partner_fails,
                }),
                text,
                true,
            ))
        }
    }
}

fn bisim(pair: &PairArgs, dist: Option<&[String]>) -> Res<Report> {
    check_eps(pair.eps)?;
    let t1 = load_agent(&pair.sys1)?;
    let t2 = load_agent(&pair.sys2)?;
    let ag = agents_or_all(&pair.agents, &t1)?;
    let r = approx_bisim(&t1, &t2, &ag, pair.eps)?;
    let (mut json, mut text) = relation_report("bisim", &r, &t1, &t2, None);
    if let Some([a, b]) = dist {
        let (q1, q2) = (state_of(&t1, a)?, state_of(&t2, b)?);
        let (dj, dt, _) = distinction_parts(&t1, &t2, &r, q1, q2)?;
        json["distinguish"] = dj;
        text.push_str(&dt);
    }
    Ok(Report::new(SUCCESS, json, text))
}

fn aea(sys1: &str, sys2: &str, eps: f64) -> Res<Report> {
    check_eps(eps)?;
    let t1 = load_labeled(sys1)?;
    let t2 = load_labeled(sys2)?;
    let r = aea_bisim(&t1, &t2, eps)?;
    let (json, text) = relation_report("aea-bisim", &r, &t1, &t2, Some((&t1, &t2)));
    Ok(Report::new(SUCCESS, json, text))
}

fn check(sys: &str, state: &str, src: &FormulaSource, eps: f64, bounded: Option<usize>, witness: bool) -> Res<Report> {
    check_eps(eps)?;
    let t = load_agent(sys)?;
    let q = state_of(&t, state)?;
    let f = parse_state_formula(&formula_text(src)?, Some(t.space()))?;
    let mut json = json!({
        "command": "check",
        "state": state,
        "formula": f.to_string(),
        "epsilon": eps,
    });
    let verdict = match bounded {
        Some(k) => {
            json["mode"] = json!("bounded");
            json["k"] = json!(k);
            eval_bounded(&t, q, &f, k, eps)?
        }
        None => {
            json["mode"] = json!("exact");
            altbisim::logic::Verdict::from_bool(eval_state(&t, q, &f, eps)?)
        }
    };
    json["verdict"] = json!(verdict);
    let mut text = format!("{state} |= {f}: {verdict}\n");
    if witness {
        if bounded.is_some() {
            return Err(input("--witness needs the exact checker"));
        }
        let strategy = ExactChecker::new(&t, eps).witness(&f)?;
        let table: Option<Vec<Value>> = strategy.as_ref().map(|s| {
            s.entries()
                .map(|(&(_, st), set)| {
                    json!({ "state": t.state_name(st), "choice": t.set_names(set) })
                })
                .collect()
        });
        if let Some(s) = &strategy {
            let _ = writeln!(text, "strategy for agents {{{}}}:", s.agents());
            for (&(_, st), set) in s.entries() {
                let _ = writeln!(text, "  {} -> {{{}}}", t.state_name(st), t.set_names(set).join(","));
            }
        }
        json["witness"] = json!(table);
    }
    let code = if verdict == altbisim::logic::Verdict::False { VIOLATION } else { SUCCESS };
    Ok(Report::new(code, json, text))
}

fn partner(src: &FormulaSource, agents: &str, eps: f64, path: bool, inverse: bool, derivation: bool) -> Res<Report> {
    check_eps(eps)?;
    let ag = parse_agents(agents)?;
    let text_in = formula_text(src)?;
    let mut json = json!({ "command": "partner", "agents": agents_json(&ag), "epsilon": eps, "inverse": inverse });
    let (input_str, found, steps) = if path {
        if derivation {
            return Err(input("--derivation is available for state formulas only"));
        }
        let f = parse_path_formula(&text_in, None)?;
        let p = if inverse { e_inverse(&f, &ag, eps)? } else { e_partner(&f, &ag, eps)? };
        (f.to_string(), p.map(|x| x.to_string()), None)
    } else {
        let f = parse_state_formula(&text_in, None)?;
        if inverse {
            (f.to_string(), h_inverse(&f, &ag, eps)?.map(|x| x.to_string()), None)
        } else {
            let d = h_derivation(&f, &ag, eps)?;
            let steps = if derivation {
                d.as_ref().map(|d| {
                    d.derivation
                        .iter()
                        .map(|s| {
                            let (l, r) = match &s.conclusion {
                                Pair::State(a, b) => (a.to_string(), b.to_string()),
                                Pair::Path(a, b) => (a.to_string(), b.to_string()),
                            };
                            (s.rule, l, r)
                        })
                        .collect::<Vec<_>>()
                })
            } else {
                None
            };
            (f.to_string(), d.map(|d| d.right.to_string()), steps)
        }
    };
    json["formula"] = json!(input_str);
    json["partner"] = json!(found);
    let mut text = match &found {
        Some(p) => format!("{input_str}  =>  {p}\n"),
        None => format!("{input_str} has no partner (not-in-domain)\n"),
    };
    if let Some(steps) = steps {
        let list: Vec<Value> = steps
            .iter()
            .map(|(rule, l, r)| json!({ "rule": rule, "left": l, "right": r }))
            .collect();
        for (rule, l, r) in &steps {
            let name = serde_json::to_value(rule).expect("serializable");
            let _ = writeln!(text, "  [{}] ({l}, {r})", name.as_str().unwrap_or_default());
        }
        json["derivation"] = json!(list);
    }
    let code = if found.is_some() { SUCCESS } else { VIOLATION };
    Ok(Report::new(code, json, text))
}

fn tr(src: &FormulaSource, eps: f64) -> Res<Report> {
    check_eps(eps)?;
    let f = parse_ltl(&formula_text(src)?, None)?;
    let g = tr_epsilon(&f, eps)?;
    Ok(Report::new(
        SUCCESS,
        json!({ "command": "tr", "epsilon": eps, "formula": f.to_string(), "translated": g.to_string() }),
        format!("{g}\n"),
    ))
}

fn distinguish_cmd(pair: &PairArgs, a: &str, b: &str) -> Res<Report> {
    check_eps(pair.eps)?;
    let t1 = load_agent(&pair.sys1)?;
    let t2 = load_agent(&pair.sys2)?;
    let ag = agents_or_all(&pair.agents, &t1)?;
    let (q1, q2) = (state_of(&t1, a)?, state_of(&t2, b)?);
    let r = approx_bisim(&t1, &t2, &ag, pair.eps)?;
    let (mut json, text, found) = distinction_parts(&t1, &t2, &r, q1, q2)?;
    json["command"] = json!("distinguish");
    json["epsilon"] = json!(pair.eps);
    json["agents"] = agents_json(&ag);
    Ok(Report::new(if found { SUCCESS } else { VIOLATION }, json, text))
}

fn synth(sys: &str, state: &str, src: &FormulaSource) -> Res<Report> {
    let t = load_labeled(sys)?;
    let q = state_of(&t, state)?;
    let spec = parse_ltl(&formula_text(src)?, Some(t.space()))?;
    let r = synthesize(&t, q, &spec)?;
    let verified = match &r.strategy {
        Some(s) => Some(verify_under_strategy(&t, q, s, &spec)?),
        None => None,
    };
    let nodes: Vec<Value> = r
        .nodes
        .iter()
        .map(|n| {
            json!({
                "state": t.state_name(n.state),
                "residual": n.residual.to_string(),
                "actions": n.actions.iter().map(|&a| t.controls()[a].clone()).collect::<Vec<_>>(),
                "rank": n.rank,
            })
        })
        .collect();
    let mut text = format!(
        "{spec} from {state}: {}\n",
        if r.realizable { "realizable" } else { "unrealizable" }
    );
    if let Some(h) = r.horizon {
        let _ = writeln!(text, "met within {h} steps");
    }
    for n in &r.nodes {
        let acts: Vec<&str> = n.actions.iter().map(|&a| t.controls()[a].as_str()).collect();
        let _ = writeln!(
            text,
            "  {} [{}] -> {{{}}} (rank {})",
            t.state_name(n.state),
            n.residual,
            acts.join(","),
            n.rank
        );
    }
    Ok(Report::new(
        if r.realizable { SUCCESS } else { VIOLATION },
        json!({
            "command": "synth",
            "state": state,
            "spec": spec.to_string(),
            "realizable": r.realizable,
            "horizon": r.horizon,
            "strategy": nodes,
            "verified": verified,
        }),
        text,
    ))
}

fn transfer(sample: &str, abs: &str, eps: f64, src: &FormulaSource) -> Res<Report> {
    check_eps(eps)?;
    let s = load_labeled(sample)?;
    let a = load_labeled(abs)?;
    let spec = parse_ltl(&formula_text(src)?, Some(a.space()))?;
    let rep = transfer_harness(&s, &a, eps, &spec)?;
    let mut text = format!(
        "spec {} widened to {}; {} related pairs, {} violations\n",
        rep.spec,
        rep.translated,
        rep.pairs.len(),
        rep.violations
    );
    for p in &rep.pairs {
        let _ = writeln!(
            text,
            "  {} ~ {}: abstract {}, sample {}{}",
            p.sample_state,
            p.abstract_state,
            p.synth_abs,
            p.synth_sample,
            if p.violation { "  VIOLATION" } else { "" }
        );
    }
    let mut json = serde_json::to_value(&rep).expect("serializable");
    json["command"] = json!("transfer");
    json["epsilon"] = json!(eps);
    Ok(Report::new(if rep.violations == 0 { SUCCESS } else { VIOLATION }, json, text))
}

fn pair_names(set: &std::collections::BTreeSet<(usize, usize)>, l: &dyn TransitionSystem, r: &dyn TransitionSystem) -> Vec<Value> {
    set.iter().map(|&(a, b)| json!([l.state_name(a), r.state_name(b)])).collect()
}

fn agreement(what: &str, agree: bool, mut json: Value, detail: String) -> Report {
    json["command"] = json!("oracle");
    json["check"] = json!(what);
    json["agree"] = json!(agree);
    let text = format!("{what}: {}\n{detail}", if agree { "agree" } else { "DISAGREE" });
    Report::new(if agree { SUCCESS } else { VIOLATION }, json, text)
}

fn names_to_states(t: &dyn TransitionSystem, list: &str) -> Res<Vec<usize>> {
    list.split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| state_of(t, s))
        .collect()
}

fn oracle(which: &OracleCommand) -> Res<Report> {
    match which {
        OracleCommand::Bisim { sys1, sys2, agents, eps } => {
            check_eps(*eps)?;
            let (main, reference, l, r): (_, _, System, System) = match (load(sys1)?, load(sys2)?) {
                (System::Agent(a), System::Agent(b)) => {
                    let ag = agents_or_all(agents, &a)?;
                    let m = approx_bisim(&a, &b, &ag, *eps)?.relation;
                    let e = enum_bisim_agent(&a, &b, &ag, *eps)?;
                    (m, e, System::Agent(a), System::Agent(b))
                }
                (System::Labeled(a), System::Labeled(b)) => {
                    let m = aea_bisim(&a, &b, *eps)?.relation;
                    let e = enum_bisim_label(&a, &b, *eps)?;
                    (m, e, System::Labeled(a), System::Labeled(b))
                }
                _ => return Err(input("both systems must be of the same kind")),
            };
            let (l, r) = (l.as_dyn(), r.as_dyn());
            let detail = format!("refinement: {} pairs; enumeration: {} pairs\n", main.len(), reference.len());
            Ok(agreement(
                "bisim",
                main == reference,
                json!({ "refinement": pair_names(&main, l, r), "enumeration": pair_names(&reference, l, r) }),
                detail,
            ))
        }
        OracleCommand::Bounded {
            sys,
            state,
            formula,
            bounded,
            eps,
        } => {
            check_eps(*eps)?;
            let t = load_agent(sys)?;
            let q = state_of(&t, state)?;
            let f: StateFormula = parse_state_formula(&formula_text(formula)?, Some(t.space()))?;
            let main = eval_bounded(&t, q, &f, *bounded, *eps)?;
            let reference = bounded_game(&t, q, &f, *bounded);
            Ok(agreement(
                "bounded",
                main == reference,
                json!({ "formula": f.to_string(), "k": bounded, "checker": main, "game_tree": reference }),
                format!("checker: {main}; game tree: {reference}\n"),
            ))
        }
        OracleCommand::Synth {
            sys,
            state,
            formula,
            horizon,
        } => {
            let t = load_labeled(sys)?;
            let q = state_of(&t, state)?;
            let spec = parse_ltl(&formula_text(formula)?, Some(t.space()))?;
            let main = synthesize(&t, q, &spec)?.realizable;
            let reference = enum_strategies(&t, q, &spec, *horizon)?;
            Ok(agreement(
                "synth",
                main == reference,
                json!({ "spec": spec.to_string(), "horizon": horizon, "synthesis": main, "enumeration": reference }),
                format!("synthesis: {main}; enumeration: {reference}\n"),
            ))
        }
        OracleCommand::Lasso {
            sys,
            prefix,
            cycle,
            formula,
        } => {
            let s = load(sys)?;
            let t = s.as_dyn();
            let lasso = Lasso::new(names_to_states(t, prefix)?, names_to_states(t, cycle)?)?;
            let f = parse_ltl(&formula_text(formula)?, Some(t.space()))?;
            let main = eval_lasso_ltl(t, &lasso, &f)?;
            let n = unroll_length(&lasso, &f);
            let reference = unroll_eval(t, &lasso, &f, n)?;
            Ok(agreement(
                "lasso",
                main == reference,
                json!({ "formula": f.to_string(), "unrolled_length": n, "lasso": main, "unrolled": reference }),
                format!("lasso: {main}; unrolled ({n} states): {reference}\n"),
            ))
        }
    }
}

fn gen(seed: u64, shape: &FixtureShape) -> Res<Report> {
    let seed = match std::env::var("ALTBISIM_SEED") {
        Ok(v) => v
            .trim()
            .parse::<u64>()
            .map_err(|_| input(format!("ALTBISIM_SEED must be an unsigned integer, got `{v}`")))?,
        Err(_) => seed,
    };
    let sys = gen_fixture(seed, shape)?;
    let text = print_system(&sys);
    Ok(Report::new(
        SUCCESS,
        json!({ "command": "gen", "seed": seed, "valid": sys.validate().is_empty(), "system": text }),
        text,
    ))
}
