//! Seeded random systems for property tests and the `gen` command.

use std::collections::BTreeSet;
use std::sync::Arc;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::model::{
    AgentAts, AgentAtsBuilder, LabelAts, LabelAtsBuilder, MetricObsSpace, StateSet, System, TransitionSystem,
};

/// Size parameters of a generated system.
#[derive(Debug, Clone, PartialEq)]
pub enum FixtureShape {
    Agent {
        states: usize,
        agents: u32,
        observations: usize,
        max_choices: usize,
    },
    Labeled {
        states: usize,
        controls: usize,
        disturbances: usize,
        observations: usize,
        max_successors: usize,
    },
}

/// Observations `p1..pn` on a line, `d(pi, pj) = |i - j|`.
pub fn line_space(n: usize) -> Result<MetricObsSpace> {
    if n == 0 {
        return Err(Error::input("at least one observation is needed"));
    }
    let names: Vec<String> = (1..=n).map(|i| format!("p{i}")).collect();
    let mut entries = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            entries.push((names[i].clone(), names[j].clone(), (j - i) as f64));
        }
    }
    MetricObsSpace::from_table(names, &entries)
}

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// A box `[lo_i, hi_i)` in the grid of joint choices.
type Cell = Vec<(usize, usize)>;

/// Choice sets at one state: the joint-choice grid is cut into boxes, each
/// box leads to a distinct successor, and an agent's option collects the
/// successors of all boxes that allow it. Every joint selection then meets
/// in exactly its box's successor.
fn choices_at(r: &mut ChaCha8Rng, n: usize, agents: u32, max_choices: usize) -> Vec<Vec<StateSet>> {
    let counts: Vec<usize> = (0..agents).map(|_| r.gen_range(1..=max_choices)).collect();
    let cells: usize = counts.iter().product();
    let target = r.gen_range(1..=n.min(cells));
    let mut boxes: Vec<Cell> = vec![counts.iter().map(|&m| (0, m)).collect()];
    while boxes.len() < target {
        let splittable: Vec<usize> = (0..boxes.len())
            .filter(|&b| boxes[b].iter().any(|&(lo, hi)| hi - lo > 1))
            .collect();
        let Some(&b) = splittable.choose(r) else { break };
        let dims: Vec<usize> = (0..boxes[b].len()).filter(|&d| boxes[b][d].1 - boxes[b][d].0 > 1).collect();
        let d = *dims.choose(r).expect("splittable box");
        let (lo, hi) = boxes[b][d];
        let cut = r.gen_range(lo + 1..hi);
        let mut other = boxes[b].clone();
        boxes[b][d] = (lo, cut);
        other[d] = (cut, hi);
        boxes.push(other);
    }
    let mut states: Vec<usize> = (0..n).collect();
    states.shuffle(r);
    (0..agents as usize)
        .map(|i| {
            (0..counts[i])
                .map(|c| {
                    boxes
                        .iter()
                        .zip(&states)
                        .filter(|(bx, _)| bx[i].0 <= c && c < bx[i].1)
                        .map(|(_, &s)| s)
                        .collect()
                })
                .collect()
        })
        .collect()
}

fn check_sizes(states: usize, observations: usize, other: &[usize]) -> Result<()> {
    if states == 0 || observations == 0 || other.contains(&0) {
        return Err(Error::input("fixture sizes must be positive"));
    }
    Ok(())
}

pub fn gen_agent(seed: u64, states: usize, agents: u32, observations: usize, max_choices: usize) -> Result<AgentAts> {
    check_sizes(states, observations, &[agents as usize, max_choices])?;
    let mut r = rng(seed);
    let space = Arc::new(line_space(observations)?);
    let mut b = AgentAtsBuilder::new(format!("gen{seed}"), space, agents);
    for q in 0..states {
        let o = r.gen_range(1..=observations);
        b.add_state(&format!("q{q}"), &format!("p{o}"))?;
    }
    for q in 0..states {
        for (i, sets) in choices_at(&mut r, states, agents, max_choices).into_iter().enumerate() {
            b.set_choice(q, i as u32 + 1, sets)?;
        }
    }
    let t = b.build();
    debug_assert!(t.validate().is_empty());
    Ok(t)
}

pub fn gen_labeled(
    seed: u64,
    states: usize,
    controls: usize,
    disturbances: usize,
    observations: usize,
    max_successors: usize,
) -> Result<LabelAts> {
    check_sizes(states, observations, &[controls, disturbances, max_successors])?;
    let mut r = rng(seed);
    let space = Arc::new(line_space(observations)?);
    let ctrl: Vec<String> = (1..=controls).map(|i| format!("a{i}")).collect();
    let dist: Vec<String> = (1..=disturbances).map(|i| format!("b{i}")).collect();
    let mut b = LabelAtsBuilder::new(format!("gen{seed}"), space, ctrl, dist)?;
    for q in 0..states {
        let o = r.gen_range(1..=observations);
        b.add_state(&format!("q{q}"), &format!("p{o}"))?;
    }
    let all: Vec<usize> = (0..states).collect();
    for q in 0..states {
        for a in 0..controls {
            for d in 0..disturbances {
                let k = r.gen_range(1..=max_successors.min(states));
                for &t in all.choose_multiple(&mut r, k) {
                    b.add_transition(q, a, d, t)?;
                }
            }
        }
    }
    Ok(b.build())
}

/// A deterministic-per-seed system of the requested shape.
pub fn gen_fixture(seed: u64, shape: &FixtureShape) -> Result<System> {
    Ok(match *shape {
        FixtureShape::Agent {
            states,
            agents,
            observations,
            max_choices,
        } => System::Agent(gen_agent(seed, states, agents, observations, max_choices)?),
        FixtureShape::Labeled {
            states,
            controls,
            disturbances,
            observations,
            max_successors,
        } => System::Labeled(gen_labeled(seed, states, controls, disturbances, observations, max_successors)?),
    })
}

/// Moves an observation index by at most `radius` steps along the line.
fn nudge(r: &mut ChaCha8Rng, o: usize, n: usize, radius: usize) -> usize {
    let lo = o.saturating_sub(radius);
    let hi = (o + radius).min(n - 1);
    r.gen_range(lo..=hi)
}

/// A system with the same choice structure as `t`, states renamed and
/// shuffled, and observations moved by at most `radius` line steps. Also
/// returns where each state of `t` went.
pub fn perturbed_agent(seed: u64, t: &AgentAts, radius: usize) -> Result<(AgentAts, Vec<usize>)> {
    let mut r = rng(seed);
    let n = t.num_states();
    let mut perm: Vec<usize> = (0..n).collect();
    perm.shuffle(&mut r);
    let mut inv = vec![0; n];
    for (q, &p) in perm.iter().enumerate() {
        inv[p] = q;
    }
    let space = t.space_arc().clone();
    let mut b = AgentAtsBuilder::new(format!("{}-perturbed", t.name()), space.clone(), t.agents().len() as u32);
    for &q in &inv {
        let o = nudge(&mut r, t.observation(q), space.len(), radius);
        b.add_state(&format!("s{}", perm[q]), space.name(o))?;
    }
    for &q in &inv {
        for a in t.agents().iter() {
            let sets = t.choices(q, a).iter().map(|s| s.iter().map(|&x| perm[x]).collect()).collect();
            b.set_choice(perm[q], a, sets)?;
        }
    }
    Ok((b.build(), perm))
}

/// A pair `(sample, abstraction)` of labeled systems on one space that are
/// AεA-bisimilar at `radius`: every abstract state is split into one or two
/// copies whose observations lie within `radius` line steps, and each copy
/// reaches a nonempty subset of the copies of every abstract successor.
pub fn aea_pair(seed: u64, states: usize, controls: usize, disturbances: usize, radius: usize) -> Result<(LabelAts, LabelAts)> {
    let observations = states + 1;
    let abs = gen_labeled(seed, states, controls, disturbances, observations, 2)?;
    let mut r = rng(seed ^ 0x5_eed0_fa11);
    let space = abs.space_arc().clone();
    let copies: Vec<usize> = (0..states).map(|_| r.gen_range(1..=2)).collect();
    let mut b = LabelAtsBuilder::new(
        format!("{}-sample", abs.name()),
        space.clone(),
        abs.controls().to_vec(),
        abs.disturbances().to_vec(),
    )?;
    let mut ids: Vec<Vec<usize>> = Vec::new();
    for q in 0..states {
        let mut v = Vec::new();
        for k in 0..copies[q] {
            let o = nudge(&mut r, abs.observation(q), space.len(), radius);
            v.push(b.add_state(&format!("{}_{k}", abs.state_name(q)), space.name(o))?);
        }
        ids.push(v);
    }
    for q in 0..states {
        for &from in &ids[q] {
            for a in 0..controls {
                for d in 0..disturbances {
                    for &t in abs.post(q, a, d) {
                        let k = r.gen_range(1..=ids[t].len());
                        for &to in ids[t].choose_multiple(&mut r, k) {
                            b.add_transition(from, a, d, to)?;
                        }
                    }
                }
            }
        }
    }
    Ok((b.build(), abs))
}

/// Pairs `(sample state, abstract state)` linked by [`aea_pair`].
pub fn aea_pair_links(sample: &LabelAts, abs: &LabelAts) -> BTreeSet<(usize, usize)> {
    (0..sample.num_states())
        .filter_map(|s| {
            let name = sample.state_name(s);
            let base = &name[..name.rfind('_')?];
            abs.state_index(base).map(|q| (s, q))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bisim::{aea_bisim, approx_bisim};
    use crate::dsl::print_system;
    use crate::model::AgentSet;

    #[test]
    fn generated_systems_are_valid() {
        for seed in 0..200 {
            let a = gen_agent(seed, 1 + (seed as usize % 4), 1 + (seed % 3) as u32, 3, 3).unwrap();
            assert!(a.validate().is_empty(), "seed {seed}: {:?}", a.validate());
            let l = gen_labeled(seed, 1 + (seed as usize % 5), 2, 2, 3, 2).unwrap();
            assert!(l.validate().is_empty());
        }
    }

    #[test]
    fn same_seed_same_output() {
        let shape = FixtureShape::Agent {
            states: 3,
            agents: 2,
            observations: 2,
            max_choices: 2,
        };
        let a = print_system(&gen_fixture(7, &shape).unwrap());
        assert_eq!(a, print_system(&gen_fixture(7, &shape).unwrap()));
        let c = gen_fixture(0, &FixtureShape::Agent { states: 2, agents: 1, observations: 2, max_choices: 2 }).unwrap();
        assert!(c.validate().is_empty());
    }

    #[test]
    fn perturbation_keeps_bisimilarity_at_radius() {
        for seed in 0..30 {
            let t = gen_agent(seed, 3, 2, 3, 2).unwrap();
            let (u, image) = perturbed_agent(seed, &t, 1).unwrap();
            assert!(u.validate().is_empty());
            let r = approx_bisim(&t, &u, &AgentSet::new([1]), 1.0).unwrap();
            for q in 0..3 {
                assert!(r.related(q, image[q]), "seed {seed} state {q}");
            }
        }
    }

    #[test]
    fn aea_pairs_are_bisimilar() {
        for seed in 0..20 {
            let (s, a) = aea_pair(seed, 3, 2, 2, 1).unwrap();
            assert!(s.validate().is_empty() && a.validate().is_empty());
            let r = aea_bisim(&s, &a, 1.0).unwrap();
            for (x, y) in aea_pair_links(&s, &a) {
                assert!(r.related(x, y), "seed {seed}: {x} {y}");
            }
        }
    }
}
