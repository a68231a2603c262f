//! Acceptance suite: one line per criterion, nonzero exit if any fails.

use std::collections::{BTreeSet, HashMap, HashSet};
use std::process::Command;
use std::time::{Duration, Instant};

use altbisim::bisim::{aea_bisim, approx_bisim, distinguish_in, BisimResult, Distinction};
use altbisim::dsl::parse_system;
use altbisim::fixture::{aea_pair, gen_agent, gen_labeled, perturbed_agent};
use altbisim::logic::{
    core_path, eval_bounded, eval_lasso, eval_lasso_ltl, eval_state, rank_p, tr_epsilon, ExactChecker, PathFormula,
    PositiveLtl, StateFormula,
};
use altbisim::model::{AgentAts, AgentSet, LabelAts, Lasso, StateId, System, TransitionSystem};
use altbisim::oracle::{
    bounded_game, enum_bisim_agent, enum_bisim_label, enum_strategies, unroll_eval, unroll_length,
    ENUM_STRATEGIES_HORIZON,
};
use altbisim::relations::{decide_e, decide_h, h_partner};
use altbisim::synthesis::{synthesize, transfer_harness, verify_under_strategy};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;

const EPSILONS: [f64; 4] = [0.0, 0.5, 1.0, 2.0];

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn err<E: std::fmt::Display>(e: E) -> String {
    e.to_string()
}

fn example_one() -> AgentAts {
    match parse_system(include_str!("../../../fixtures/example1.ats")).expect("fixture parses") {
        System::Agent(t) => t,
        System::Labeled(_) => panic!("fixture is an agent system"),
    }
}

/// All coalitions over agents `1..=k`.
fn coalitions(k: u32) -> Vec<AgentSet> {
    (0..1u32 << k)
        .map(|m| AgentSet::new((1..=k).filter(|i| m & (1 << (i - 1)) != 0)))
        .collect()
}

/// Seeded agent-system pairs with at most three states per side; every
/// third pair is a perturbed copy, the rest are independent draws.
struct AgentCase {
    seed: u64,
    t1: AgentAts,
    t2: AgentAts,
    ag: AgentSet,
}

fn agent_cases() -> Vec<AgentCase> {
    (0..240u64)
        .map(|seed| {
            let agents = 1 + (seed % 2) as u32;
            let observations = 2 + ((seed / 2) % 2) as usize;
            let n1 = 1 + (seed % 3) as usize;
            let t1 = gen_agent(seed, n1, agents, observations, 2).expect("generator");
            let t2 = if seed % 3 == 0 {
                perturbed_agent(seed, &t1, 1).expect("perturbation").0
            } else {
                let n2 = 1 + ((seed / 3) % 3) as usize;
                gen_agent(seed + 10_000, n2, agents, observations, 2).expect("generator")
            };
            let all = coalitions(agents);
            let ag = all[(seed / 5) as usize % all.len()].clone();
            AgentCase { seed, t1, t2, ag }
        })
        .collect()
}

struct LabelCase {
    seed: u64,
    t1: LabelAts,
    t2: LabelAts,
}

fn label_cases() -> Vec<LabelCase> {
    (0..120u64)
        .map(|seed| {
            let controls = 1 + (seed % 2) as usize;
            let disturbances = 1 + ((seed / 2) % 2) as usize;
            let (t1, t2) = if seed % 3 == 0 {
                aea_pair(seed, 2, controls, disturbances, 1).expect("generator")
            } else {
                let n1 = 1 + (seed % 3) as usize;
                let n2 = 1 + ((seed / 3) % 3) as usize;
                (
                    gen_labeled(seed, n1, controls, disturbances, 3, 2).expect("generator"),
                    gen_labeled(seed + 10_000, n2, controls, disturbances, 3, 2).expect("generator"),
                )
            };
            LabelCase { seed, t1, t2 }
        })
        .collect()
}

/// Greatest relations of every agent case at every epsilon.
fn agent_relations(cases: &[AgentCase]) -> Result<Vec<Vec<BisimResult>>, String> {
    cases
        .iter()
        .map(|c| EPSILONS.iter().map(|&e| approx_bisim(&c.t1, &c.t2, &c.ag, e).map_err(err)).collect())
        .collect()
}

fn atoms(n: usize) -> Vec<String> {
    (1..=n).map(|i| format!("p{i}")).collect()
}

fn random_ltl(r: &mut ChaCha8Rng, depth: usize, names: &[String]) -> PositiveLtl {
    if depth == 0 || r.gen_bool(0.2) {
        return PositiveLtl::atom(names.choose(r).expect("atoms").clone());
    }
    let sub = |r: &mut ChaCha8Rng| random_ltl(r, depth - 1, names);
    match r.gen_range(0..4) {
        0 => PositiveLtl::next(sub(r)),
        1 => PositiveLtl::or(sub(r), sub(r)),
        2 => PositiveLtl::and(sub(r), sub(r)),
        _ => PositiveLtl::until(sub(r), sub(r)),
    }
}

fn random_coalition(r: &mut ChaCha8Rng, agents: u32) -> AgentSet {
    coalitions(agents).choose(r).expect("coalitions").clone()
}

/// Random state formula; with `core` set, coalition bodies stay within the
/// exactly checkable shapes.
fn random_state(r: &mut ChaCha8Rng, depth: usize, agents: u32, eps: f64, core: bool) -> StateFormula {
    if depth == 0 || r.gen_bool(0.25) {
        let p = if r.gen_bool(0.5) { "p1" } else { "p2" };
        return if r.gen_bool(0.5) {
            StateFormula::atom(p)
        } else {
            StateFormula::diamond(eps, p)
        };
    }
    match r.gen_range(0..4) {
        0 => StateFormula::not(random_state(r, depth - 1, agents, eps, core)),
        1 => StateFormula::and(
            random_state(r, depth - 1, agents, eps, core),
            random_state(r, depth - 1, agents, eps, core),
        ),
        _ => {
            let ag = random_coalition(r, agents);
            StateFormula::coalition(ag, random_path(r, depth - 1, agents, eps, core))
        }
    }
}

fn random_path(r: &mut ChaCha8Rng, depth: usize, agents: u32, eps: f64, core: bool) -> PathFormula {
    let lift = |r: &mut ChaCha8Rng| PathFormula::state(random_state(r, depth.saturating_sub(1), agents, eps, core));
    if core {
        return match r.gen_range(0..5) {
            0 => lift(r),
            1 => PathFormula::next(lift(r)),
            2 => PathFormula::until(lift(r), lift(r)),
            3 => PathFormula::not(PathFormula::next(lift(r))),
            _ => PathFormula::not(PathFormula::until(lift(r), lift(r))),
        };
    }
    if depth <= 1 || r.gen_bool(0.25) {
        return lift(r);
    }
    let sub = |r: &mut ChaCha8Rng| random_path(r, depth - 1, agents, eps, false);
    match r.gen_range(0..4) {
        0 => PathFormula::not(sub(r)),
        1 => PathFormula::and(sub(r), sub(r)),
        2 => PathFormula::next(sub(r)),
        _ => PathFormula::until(sub(r), sub(r)),
    }
}

/// A random lasso path: walk along edges until a state repeats.
fn random_lasso<S: TransitionSystem + ?Sized>(r: &mut ChaCha8Rng, sys: &S) -> Lasso {
    let n = sys.num_states();
    let mut walk = vec![r.gen_range(0..n)];
    loop {
        let here = *walk.last().expect("nonempty walk");
        let next: Vec<StateId> = (0..n).filter(|&t| sys.has_edge(here, t)).collect();
        let t = *next.choose(r).expect("every state has a successor");
        if let Some(pos) = walk.iter().position(|&s| s == t) {
            let cycle = walk.split_off(pos);
            return Lasso::new(walk, cycle).expect("nonempty cycle");
        }
        walk.push(t);
    }
}

fn example_one_relation(pairs: impl IntoIterator<Item = (StateId, StateId)>) -> BTreeSet<(String, String)> {
    pairs.into_iter().map(|(a, b)| (format!("q{}", a + 1), format!("q{}", b + 1))).collect()
}

fn criterion_1() -> Outcome {
    let t = example_one();
    let ag = AgentSet::new([1]);
    let one = approx_bisim(&t, &t, &ag, 1.0).map_err(err)?;
    let mut expected: BTreeSet<(StateId, StateId)> = (0..3).flat_map(|a| (0..3).map(move |b| (a, b))).collect();
    expected.remove(&(0, 2));
    expected.remove(&(2, 0));
    ensure(one.relation == expected, || format!("eps 1 relation {:?}", one.relation))?;
    let zero = approx_bisim(&t, &t, &ag, 0.0).map_err(err)?;
    let identity: BTreeSet<(StateId, StateId)> = (0..3).map(|q| (q, q)).collect();
    ensure(zero.relation == identity, || format!("eps 0 relation {:?}", zero.relation))?;

    let path = concat!(env!("CARGO_MANIFEST_DIR"), "/../../fixtures/example1.ats");
    for (eps, want) in [("1", &expected), ("0", &identity)] {
        let out = Command::new(env!("CARGO_BIN_EXE_altbisim"))
            .args(["--json", "bisim", "--sys1", path, "--sys2", path, "--eps", eps])
            .output()
            .map_err(err)?;
        ensure(out.status.code() == Some(0), || format!("cli exit {:?}", out.status.code()))?;
        let v: serde_json::Value = serde_json::from_slice(&out.stdout).map_err(err)?;
        let got: BTreeSet<(String, String)> = v["relation"]
            .as_array()
            .ok_or("cli output lacks a relation")?
            .iter()
            .map(|p| (p[0].as_str().unwrap_or("").to_string(), p[1].as_str().unwrap_or("").to_string()))
            .collect();
        ensure(got == example_one_relation(want.iter().copied()), || format!("cli relation at eps {eps}: {got:?}"))?;
    }
    Ok("library and cli agree on eps 0 and 1".into())
}

fn criterion_2(cases: &[AgentCase], rels: &[Vec<BisimResult>], labels: &[LabelCase]) -> Outcome {
    let mut compared = 0;
    let mut nonempty = 0;
    for (c, rs) in cases.iter().zip(rels) {
        for (&eps, res) in EPSILONS.iter().zip(rs) {
            let brute = enum_bisim_agent(&c.t1, &c.t2, &c.ag, eps).map_err(err)?;
            ensure(res.relation == brute, || {
                format!("agent seed {} eps {eps}: refinement {:?} enumeration {:?}", c.seed, res.relation, brute)
            })?;
            compared += 1;
            nonempty += usize::from(!brute.is_empty());
        }
    }
    let mut labeled = 0;
    for c in labels {
        for &eps in &EPSILONS {
            let fast = aea_bisim(&c.t1, &c.t2, eps).map_err(err)?;
            let brute = enum_bisim_label(&c.t1, &c.t2, eps).map_err(err)?;
            ensure(fast.relation == brute, || format!("labeled seed {} eps {eps}", c.seed))?;
            labeled += 1;
        }
    }
    Ok(format!(
        "{} agent pairs ({compared} comparisons, {nonempty} nonempty), {} labeled pairs ({labeled} comparisons)",
        cases.len(),
        labels.len()
    ))
}

fn is_equivalence(rel: &BTreeSet<(StateId, StateId)>, n: usize) -> bool {
    let reflexive = (0..n).all(|q| rel.contains(&(q, q)));
    let symmetric = rel.iter().all(|&(a, b)| rel.contains(&(b, a)));
    let transitive = rel
        .iter()
        .all(|&(a, b)| rel.iter().filter(|&&(c, _)| c == b).all(|&(_, d)| rel.contains(&(a, d))));
    reflexive && symmetric && transitive
}

fn criterion_3(cases: &[AgentCase], rels: &[Vec<BisimResult>], labels: &[LabelCase]) -> Outcome {
    for (c, rs) in cases.iter().zip(rels) {
        for w in rs.windows(2) {
            ensure(w[0].relation.is_subset(&w[1].relation), || format!("agent seed {} not monotone", c.seed))?;
        }
        let own = approx_bisim(&c.t1, &c.t1, &c.ag, 0.0).map_err(err)?;
        ensure(is_equivalence(&own.relation, c.t1.num_states()), || format!("agent seed {}: not an equivalence", c.seed))?;
    }
    for c in labels {
        let mut prev: Option<BTreeSet<(StateId, StateId)>> = None;
        for &eps in &EPSILONS {
            let rel = aea_bisim(&c.t1, &c.t2, eps).map_err(err)?.relation;
            if let Some(p) = &prev {
                ensure(p.is_subset(&rel), || format!("labeled seed {} not monotone", c.seed))?;
            }
            prev = Some(rel);
        }
        let own = aea_bisim(&c.t1, &c.t1, 0.0).map_err(err)?;
        ensure(is_equivalence(&own.relation, c.t1.num_states()), || format!("labeled seed {}: not an equivalence", c.seed))?;
    }
    let t = example_one();
    let r = approx_bisim(&t, &t, &AgentSet::new([1]), 1.0).map_err(err)?;
    ensure(r.related(0, 1) && r.related(1, 2) && !r.related(0, 2), || "example one is transitive".into())?;
    Ok(format!(
        "{} agent and {} labeled cases; eps 1 on example one relates q1~q2, q2~q3 but not q1~q3",
        cases.len(),
        labels.len()
    ))
}

/// Left and right state and path formulas of one rank.
#[derive(Default)]
struct Level {
    left: Vec<StateFormula>,
    right: Vec<StateFormula>,
    left_path: Vec<PathFormula>,
    right_path: Vec<PathFormula>,
}

fn push_new<T: Clone + Eq + std::hash::Hash>(out: &mut Vec<T>, seen: &mut HashSet<T>, f: T) {
    if seen.insert(f.clone()) {
        out.push(f);
    }
}

/// Conjunctions of unordered pairs with at least one conjunct at rank `r - 1`.
fn conjunctions<T: Clone + Ord>(levels: &[Vec<T>], r: usize, mk: impl Fn(T, T) -> T, out: &mut Vec<T>) {
    let below: Vec<&T> = levels[1..r - 1].iter().flatten().collect();
    let top = &levels[r - 1];
    for (i, a) in top.iter().enumerate() {
        for b in &top[i..] {
            out.push(mk(a.clone(), b.clone()));
        }
        for b in &below {
            let (x, y) = if a <= *b { (a, *b) } else { (*b, a) };
            out.push(mk(x.clone(), y.clone()));
        }
    }
}

/// Every core left formula over `{p1, p2}` up to rank `max`, built bottom-up.
/// State conjunctions stop one rank early to keep the family tractable.
fn left_formulas(ag: &AgentSet, eps: f64, max: usize) -> Vec<StateFormula> {
    let mut levels: Vec<Level> = vec![Level::default(), Level::default()];
    for p in ["p1", "p2"] {
        levels[1].left.push(StateFormula::atom(p));
        levels[1].right.push(StateFormula::diamond(eps, p));
    }
    let (mut seen_s, mut seen_p) = (HashSet::new(), HashSet::new());
    for f in levels[1].left.iter().chain(&levels[1].right) {
        seen_s.insert(f.clone());
    }
    let core_lift = |side: &[PathFormula]| -> Vec<StateFormula> {
        side.iter()
            .filter(|p| core_path(p).is_some())
            .map(|p| StateFormula::coalition(ag.clone(), p.clone()))
            .collect()
    };
    for r in 2..=max {
        let prev = &levels[r - 1];
        let mut lvl = Level::default();
        let mut cand_l: Vec<StateFormula> = prev.right.iter().cloned().map(StateFormula::not).collect();
        let mut cand_r: Vec<StateFormula> = prev.left.iter().cloned().map(StateFormula::not).collect();
        if r < max {
            let ls: Vec<Vec<StateFormula>> = levels.iter().map(|l| l.left.clone()).collect();
            let rs: Vec<Vec<StateFormula>> = levels.iter().map(|l| l.right.clone()).collect();
            conjunctions(&ls, r, StateFormula::and, &mut cand_l);
            conjunctions(&rs, r, StateFormula::and, &mut cand_r);
        }
        cand_l.extend(core_lift(&prev.left_path));
        cand_r.extend(core_lift(&prev.right_path));

        let lift = |v: &[StateFormula]| v.iter().cloned().map(PathFormula::state).collect::<Vec<_>>();
        let mut pl = lift(&prev.left);
        let mut pr = lift(&prev.right);
        pl.extend(prev.left_path.iter().cloned().map(PathFormula::next));
        pr.extend(prev.right_path.iter().cloned().map(PathFormula::next));
        pl.extend(prev.right_path.iter().cloned().map(PathFormula::not));
        pr.extend(prev.left_path.iter().cloned().map(PathFormula::not));
        let below_l: Vec<PathFormula> = levels[..r].iter().flat_map(|l| l.left_path.clone()).collect();
        let below_r: Vec<PathFormula> = levels[..r].iter().flat_map(|l| l.right_path.clone()).collect();
        for a in &below_l {
            for b in &below_l {
                if rank_p(a).max(rank_p(b)) == r - 1 {
                    pl.push(PathFormula::until(a.clone(), b.clone()));
                }
            }
        }
        for a in &below_r {
            for b in &below_r {
                if rank_p(a).max(rank_p(b)) == r - 1 {
                    pr.push(PathFormula::until(a.clone(), b.clone()));
                }
            }
        }
        for f in cand_l {
            push_new(&mut lvl.left, &mut seen_s, f);
        }
        for f in cand_r {
            push_new(&mut lvl.right, &mut seen_s, f);
        }
        for f in pl.into_iter().filter(|p| rank_p(p) == r) {
            push_new(&mut lvl.left_path, &mut seen_p, f);
        }
        for f in pr.into_iter().filter(|p| rank_p(p) == r) {
            push_new(&mut lvl.right_path, &mut seen_p, f);
        }
        levels.push(lvl);
    }
    levels.into_iter().flat_map(|l| l.left).collect()
}

fn criterion_4(cases: &[AgentCase], rels: &[Vec<BisimResult>]) -> Outcome {
    let mut families: HashMap<(AgentSet, u64), Vec<(StateFormula, StateFormula)>> = HashMap::new();
    let (mut checks, mut largest) = (0usize, 0usize);
    for (c, rs) in cases.iter().zip(rels) {
        for (&eps, res) in EPSILONS.iter().zip(rs) {
            if res.relation.is_empty() {
                continue;
            }
            let family = families.entry((c.ag.clone(), eps.to_bits())).or_insert_with(|| {
                left_formulas(&c.ag, eps, 5)
                    .into_iter()
                    .map(|phi| {
                        let gamma = h_partner(&phi, &c.ag, eps).ok().flatten().unwrap_or_else(|| phi.clone());
                        (phi, gamma)
                    })
                    .collect()
            });
            largest = largest.max(family.len());
            let mut k1 = ExactChecker::new(&c.t1, eps);
            let mut k2 = ExactChecker::new(&c.t2, eps);
            for (phi, gamma) in family.iter() {
                ensure(decide_h(phi, gamma, &c.ag, eps), || format!("no partner for {phi}"))?;
                let (s1, g2) = (k1.sat(phi).map_err(err)?, k2.sat(gamma).map_err(err)?);
                let (s2, g1) = (k2.sat(phi).map_err(err)?, k1.sat(gamma).map_err(err)?);
                for &(a, b) in &res.relation {
                    ensure(!s1[a] || g2[b], || format!("seed {} eps {eps}: {phi} / {gamma} at ({a},{b})", c.seed))?;
                    ensure(!s2[b] || g1[a], || format!("seed {} eps {eps}: reverse {phi} / {gamma} at ({a},{b})", c.seed))?;
                    checks += 2;
                }
            }
        }
    }
    ensure(largest >= 500, || format!("formula family has only {largest} members"))?;
    Ok(format!("{largest} formulas per coalition and epsilon, {checks} implications"))
}

fn criterion_5(cases: &[AgentCase], rels: &[Vec<BisimResult>]) -> Outcome {
    let mut count = 0;
    for (c, rs) in cases.iter().zip(rels) {
        for (&eps, res) in EPSILONS.iter().zip(rs) {
            for q1 in 0..c.t1.num_states() {
                for q2 in 0..c.t2.num_states() {
                    if res.related(q1, q2) {
                        continue;
                    }
                    let Distinction::Distinguished { phi, gamma } = distinguish_in(&c.t1, &c.t2, res, q1, q2).map_err(err)?
                    else {
                        return Err(format!("seed {} eps {eps}: ({q1},{q2}) reported bisimilar", c.seed));
                    };
                    let ok = decide_h(&phi, &gamma, &c.ag, eps)
                        && eval_state(&c.t1, q1, &phi, eps).map_err(err)?
                        && !eval_state(&c.t2, q2, &gamma, eps).map_err(err)?;
                    ensure(ok, || format!("seed {} eps {eps} ({q1},{q2}): {phi} / {gamma}", c.seed))?;
                    count += 1;
                }
            }
        }
    }
    Ok(format!("{count} non-bisimilar pairs separated"))
}

/// All formulas over `names` up to `depth` exactly, then a seeded sample up to depth 5.
fn ltl_family(names: &[String]) -> Vec<PositiveLtl> {
    let mut by_depth: Vec<Vec<PositiveLtl>> = vec![names.iter().map(PositiveLtl::atom).collect()];
    for d in 1..=2 {
        let below: Vec<PositiveLtl> = by_depth.iter().flatten().cloned().collect();
        let mut next: Vec<PositiveLtl> = by_depth[d - 1].iter().cloned().map(PositiveLtl::next).collect();
        for a in &below {
            for b in &below {
                if a.depth().max(b.depth()) == d - 1 {
                    next.push(PositiveLtl::or(a.clone(), b.clone()));
                    next.push(PositiveLtl::and(a.clone(), b.clone()));
                    next.push(PositiveLtl::until(a.clone(), b.clone()));
                }
            }
        }
        by_depth.push(next);
    }
    let mut all: Vec<PositiveLtl> = by_depth.into_iter().flatten().collect();
    let mut r = ChaCha8Rng::seed_from_u64(6);
    while all.len() < 4_500 {
        let depth = r.gen_range(3..=5);
        let f = random_ltl(&mut r, depth, names);
        if f.depth() >= 3 {
            all.push(f);
        }
    }
    all
}

fn criterion_6() -> Outcome {
    let family = ltl_family(&atoms(3));
    let ag = AgentSet::new([1]);
    for f in &family {
        ensure(f.depth() <= 5, || format!("{f} too deep"))?;
        for eps in [0.5, 1.0] {
            let t = tr_epsilon(f, eps).map_err(err)?;
            let (a, b) = (f.to_path(), t.to_path());
            ensure(decide_e(&a, &b, &ag, eps), || format!("{f} and {t} not related at {eps}"))?;
            ensure(rank_p(&a) == rank_p(&b), || format!("rank changed for {f}"))?;
        }
    }
    Ok(format!("{} formulas, 2 epsilons", family.len()))
}

fn criterion_7() -> Outcome {
    let mut r = ChaCha8Rng::seed_from_u64(7);
    let names = atoms(3);
    let mut samples = 0;
    for seed in 0..60u64 {
        let sys = gen_agent(seed, 1 + (seed % 4) as usize, 1 + (seed % 2) as u32, 3, 2).map_err(err)?;
        for _ in 0..10 {
            let lasso = random_lasso(&mut r, &sys);
            let f = random_ltl(&mut r, 4, &names);
            let base = eval_lasso_ltl(&sys, &lasso, &f).map_err(err)?;
            let unrolled = unroll_eval(&sys, &lasso, &f, unroll_length(&lasso, &f)).map_err(err)?;
            ensure(base == unrolled, || format!("seed {seed}: lasso and unrolling disagree on {f}"))?;
            for eps in [0.0, 0.5, 1.0] {
                let t = tr_epsilon(&f, eps).map_err(err)?;
                let widened = eval_lasso(&sys, &lasso, &t.to_path(), eps).map_err(err)?;
                ensure(!base || widened, || format!("seed {seed} eps {eps}: {f} holds but {t} fails"))?;
                if eps == 0.0 {
                    ensure(base == widened, || format!("seed {seed}: {f} and {t} differ at eps 0"))?;
                }
            }
            samples += 1;
        }
    }
    Ok(format!("{samples} lasso/formula samples, 3 epsilons each"))
}

fn criterion_8() -> Outcome {
    let mut r = ChaCha8Rng::seed_from_u64(8);
    let names = atoms(3);
    let (mut runs, mut realizable) = (0, 0);
    for seed in 0..100u64 {
        let states = 1 + (seed % 5) as usize;
        let sys = gen_labeled(seed, states, 1 + (seed % 2) as usize, 1 + ((seed / 2) % 2) as usize, 3, 2).map_err(err)?;
        for _ in 0..3 {
            let spec = random_ltl(&mut r, 3, &names);
            for q in 0..states {
                let res = synthesize(&sys, q, &spec).map_err(err)?;
                if res.realizable {
                    let strategy = res.strategy.as_ref().ok_or("realizable without a strategy")?;
                    ensure(verify_under_strategy(&sys, q, strategy, &spec).map_err(err)?, || {
                        format!("seed {seed} state {q}: strategy fails {spec}")
                    })?;
                    realizable += 1;
                }
                let brute = enum_strategies(&sys, q, &spec, ENUM_STRATEGIES_HORIZON).map_err(err)?;
                ensure(brute == res.realizable, || {
                    format!("seed {seed} state {q} {spec}: synthesis {} search {brute}", res.realizable)
                })?;
                runs += 1;
            }
        }
    }
    Ok(format!("{runs} synthesis runs on 100 systems, {realizable} realizable and verified"))
}

fn criterion_9() -> Outcome {
    let mut r = ChaCha8Rng::seed_from_u64(9);
    let names = atoms(4);
    let (mut pairs, mut enforced) = (0, 0);
    for seed in 0..24u64 {
        let (sample, abs) = aea_pair(seed, 3, 2, 2, 1).map_err(err)?;
        for _ in 0..6 {
            let spec = random_ltl(&mut r, 3, &names);
            let report = transfer_harness(&sample, &abs, 1.0, &spec).map_err(err)?;
            ensure(report.violations == 0, || format!("seed {seed} {spec}: {} violations", report.violations))?;
            ensure(!report.pairs.is_empty(), || format!("seed {seed}: no related pairs"))?;
            pairs += report.pairs.len();
            enforced += report.pairs.iter().filter(|p| p.synth_abs).count();
        }
    }
    Ok(format!("24 fixtures x 6 specs, {pairs} related pairs, {enforced} enforceable on the abstraction"))
}

fn criterion_10() -> Outcome {
    let mut r = ChaCha8Rng::seed_from_u64(10);
    let (mut definite, mut game) = (0, 0);
    for seed in 0..150u64 {
        let agents = 1 + (seed % 2) as u32;
        let sys = gen_agent(seed, 1 + (seed % 3) as usize, agents, 2, 2).map_err(err)?;
        let eps = [0.0, 1.0][(seed % 2) as usize];
        let q = r.gen_range(0..sys.num_states());
        let core = random_state(&mut r, 3, agents, eps, true);
        let exact = eval_state(&sys, q, &core, eps).map_err(err)?;
        for k in 1..=4 {
            if let Some(v) = eval_bounded(&sys, q, &core, k, eps).map_err(err)?.definite() {
                ensure(v == exact, || format!("seed {seed} k {k}: {core} bounded {v} exact {exact}"))?;
                definite += 1;
            }
        }
        for core_only in [true, false] {
            let f = random_state(&mut r, 3, agents, eps, core_only);
            for k in 1..=3 {
                let a = eval_bounded(&sys, q, &f, k, eps).map_err(err)?;
                let b = bounded_game(&sys, q, &f, k);
                ensure(a == b, || format!("seed {seed} k {k}: {f} bounded {a:?} game {b:?}"))?;
                game += 1;
            }
        }
    }
    ensure(game >= 300, || format!("only {game} game comparisons"))?;
    Ok(format!("{definite} definite bounded verdicts match exact, {game} game comparisons agree"))
}

fn main() {
    let cases = agent_cases();
    let labels = label_cases();
    let mut rels: Option<Vec<Vec<BisimResult>>> = None;
    let mut failed = 0;
    type Run<'a> = Box<dyn FnMut(&mut Option<Vec<Vec<BisimResult>>>) -> Outcome + 'a>;
    let with_rels = |rels: &mut Option<Vec<Vec<BisimResult>>>| -> Result<Vec<Vec<BisimResult>>, String> {
        if rels.is_none() {
            *rels = Some(agent_relations(&cases)?);
        }
        Ok(rels.clone().expect("computed"))
    };
    let criteria: Vec<(&str, u64, Run)> = vec![
        ("example one relations", 1, Box::new(|_| criterion_1())),
        (
            "refinement matches enumeration",
            60,
            Box::new(|r| criterion_2(&cases, &with_rels(r)?, &labels)),
        ),
        (
            "monotone in epsilon, exact case is an equivalence",
            10,
            Box::new(|r| criterion_3(&cases, &with_rels(r)?, &labels)),
        ),
        ("bisimilar states agree on partner formulas", 120, Box::new(|r| criterion_4(&cases, &with_rels(r)?))),
        ("distinguishing pairs separate", 30, Box::new(|r| criterion_5(&cases, &with_rels(r)?))),
        ("widening is a path partner", 30, Box::new(|_| criterion_6())),
        ("widening preserves truth on lassos", 30, Box::new(|_| criterion_7())),
        ("synthesis is sound and complete", 120, Box::new(|_| criterion_8())),
        ("enforceability transfers", 60, Box::new(|_| criterion_9())),
        ("bounded checker agrees", 60, Box::new(|_| criterion_10())),
    ];
    for (i, (name, limit, mut run)) in criteria.into_iter().enumerate() {
        let start = Instant::now();
        let outcome = run(&mut rels);
        let took = start.elapsed();
        let outcome = outcome.and_then(|d| {
            if took > Duration::from_secs(limit) {
                Err(format!("took {:.1}s, limit {limit}s ({d})", took.as_secs_f64()))
            } else {
                Ok(d)
            }
        });
        match outcome {
            Ok(detail) => println!("criterion {:>2} PASS {name}: {detail} [{:.2}s]", i + 1, took.as_secs_f64()),
            Err(e) => {
                failed += 1;
                println!("criterion {:>2} FAIL {name}: {e} [{:.2}s]", i + 1, took.as_secs_f64());
            }
        }
    }
    if failed > 0 {
        println!("{failed} acceptance criteria failed");
        std::process::exit(1);
    }
}
