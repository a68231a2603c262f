//! Syntactic partner relations between formulas that transfer truth along
//! approximate bisimulations.
//!
//! A left formula is built from exact atoms, negated right formulas,
//! conjunctions and coalitions over left path formulas; right formulas are
//! the mirror image with approximate atoms. Every formula belongs to at most
//! one side, so partners are unique and computed by structural recursion.

use std::collections::HashSet;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::logic::{eval_state, Eps, PathFormula, StateFormula};
use crate::model::{AgentAts, AgentSet, StateId};

/// Rule used by one derivation step.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Rule {
    /// `(p, <eps> p)`.
    AtomLoosen,
    /// From `(a, b)` conclude `(!b, !a)` on state formulas.
    NegationSwap,
    /// Componentwise conjunction of state pairs.
    Conjunction,
    /// From a path pair conclude the pair of coalition formulas.
    Coalition,
    /// A state pair is also a path pair.
    StateLift,
    /// From `(a, b)` conclude `(!b, !a)` on path formulas.
    PathNegationSwap,
    /// Componentwise conjunction of path pairs.
    PathConjunction,
    Next,
    Until,
}

/// A related pair of state or path formulas, always oriented left to right.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Pair {
    State(StateFormula, StateFormula),
    Path(PathFormula, PathFormula),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Step {
    pub rule: Rule,
    pub conclusion: Pair,
}

/// A state formula, its partner, and the rule applications relating them
/// (premises before conclusions; the last step concludes the pair).
#[derive(Debug, Clone, PartialEq)]
pub struct HPartner {
    pub left: StateFormula,
    pub right: StateFormula,
    pub derivation: Vec<Step>,
}

impl HPartner {
    /// Rechecks every step against the rule it names, using only earlier
    /// conclusions as premises.
    pub fn replays(&self, ag: &AgentSet, eps: f64) -> bool {
        let mut known: HashSet<Pair> = HashSet::new();
        let have_state = |known: &HashSet<Pair>, a: &StateFormula, b: &StateFormula| {
            known.contains(&Pair::State(a.clone(), b.clone()))
        };
        // a path premise may also be a state pair read through the lift rule
        let have_path = |known: &HashSet<Pair>, a: &PathFormula, b: &PathFormula| {
            known.contains(&Pair::Path(a.clone(), b.clone()))
                || matches!((a, b), (PathFormula::State(x), PathFormula::State(y))
                    if known.contains(&Pair::State((**x).clone(), (**y).clone())))
        };
        for step in &self.derivation {
            let ok = match (&step.rule, &step.conclusion) {
                (Rule::AtomLoosen, Pair::State(StateFormula::Atom(p), StateFormula::Diamond(e, q))) => {
                    p == q && e.matches(eps)
                }
                (Rule::NegationSwap, Pair::State(StateFormula::Not(a), StateFormula::Not(b))) => {
                    have_state(&known, b, a)
                }
                (Rule::Conjunction, Pair::State(StateFormula::And(a1, a2), StateFormula::And(b1, b2))) => {
                    have_state(&known, a1, b1) && have_state(&known, a2, b2)
                }
                (
                    Rule::Coalition,
                    Pair::State(StateFormula::Coalition(g1, a), StateFormula::Coalition(g2, b)),
                ) => g1 == ag && g2 == ag && have_path(&known, a, b),
                (Rule::StateLift, Pair::Path(PathFormula::State(a), PathFormula::State(b))) => {
                    have_state(&known, a, b)
                }
                (Rule::PathNegationSwap, Pair::Path(PathFormula::Not(a), PathFormula::Not(b))) => {
                    have_path(&known, b, a)
                }
                (Rule::PathConjunction, Pair::Path(PathFormula::And(a1, a2), PathFormula::And(b1, b2)))
                | (Rule::Until, Pair::Path(PathFormula::Until(a1, a2), PathFormula::Until(b1, b2))) => {
                    have_path(&known, a1, b1) && have_path(&known, a2, b2)
                }
                (Rule::Next, Pair::Path(PathFormula::Next(a), PathFormula::Next(b))) => have_path(&known, a, b),
                _ => false,
            };
            if !ok {
                return false;
            }
            known.insert(step.conclusion.clone());
        }
        known.contains(&Pair::State(self.left.clone(), self.right.clone()))
    }
}

struct Deriver<'a> {
    ag: &'a AgentSet,
    eps: f64,
    steps: Vec<Step>,
}

// Each function returns Ok(None) when the input is outside its grammar.
impl Deriver<'_> {
    fn push(&mut self, rule: Rule, conclusion: Pair) {
        self.steps.push(Step { rule, conclusion });
    }

    fn check_agents(&self, g: &AgentSet) -> Result<()> {
        if g != self.ag {
            return Err(Error::input(format!(
                "coalition {{{g}}} differs from the fixed coalition {{{}}}",
                self.ag
            )));
        }
        Ok(())
    }

    /// Partner of a left state formula.
    fn right_of(&mut self, f: &StateFormula) -> Result<Option<StateFormula>> {
        let out = match f {
            StateFormula::Atom(p) => {
                let g = StateFormula::Diamond(Eps(self.eps), p.clone());
                self.push(Rule::AtomLoosen, Pair::State(f.clone(), g.clone()));
                return Ok(Some(g));
            }
            StateFormula::Diamond(..) => return Ok(None),
            StateFormula::Not(x) => {
                let Some(l) = self.left_of(x)? else { return Ok(None) };
                (Rule::NegationSwap, StateFormula::not(l))
            }
            StateFormula::And(a, b) => {
                let Some(ra) = self.right_of(a)? else { return Ok(None) };
                let Some(rb) = self.right_of(b)? else { return Ok(None) };
                (Rule::Conjunction, StateFormula::and(ra, rb))
            }
            StateFormula::Coalition(g, p) => {
                self.check_agents(g)?;
                let Some(rp) = self.path_right_of(p)? else { return Ok(None) };
                (Rule::Coalition, StateFormula::coalition(g.clone(), rp))
            }
        };
        self.push(out.0, Pair::State(f.clone(), out.1.clone()));
        Ok(Some(out.1))
    }

    /// The left formula whose partner is the right state formula `g`.
    fn left_of(&mut self, g: &StateFormula) -> Result<Option<StateFormula>> {
        let out = match g {
            StateFormula::Atom(_) => return Ok(None),
            StateFormula::Diamond(e, p) => {
                if !e.matches(self.eps) {
                    return Ok(None);
                }
                let f = StateFormula::atom(p.clone());
                self.push(Rule::AtomLoosen, Pair::State(f.clone(), g.clone()));
                return Ok(Some(f));
            }
            StateFormula::Not(x) => {
                let Some(r) = self.right_of(x)? else { return Ok(None) };
                (Rule::NegationSwap, StateFormula::not(r))
            }
            StateFormula::And(a, b) => {
                let Some(la) = self.left_of(a)? else { return Ok(None) };
                let Some(lb) = self.left_of(b)? else { return Ok(None) };
                (Rule::Conjunction, StateFormula::and(la, lb))
            }
            StateFormula::Coalition(ag, p) => {
                self.check_agents(ag)?;
                let Some(lp) = self.path_left_of(p)? else { return Ok(None) };
                (Rule::Coalition, StateFormula::coalition(ag.clone(), lp))
            }
        };
        self.push(out.0, Pair::State(out.1.clone(), g.clone()));
        Ok(Some(out.1))
    }

    fn path_right_of(&mut self, f: &PathFormula) -> Result<Option<PathFormula>> {
        let out = match f {
            PathFormula::State(s) => {
                let Some(r) = self.right_of(s)? else { return Ok(None) };
                (Rule::StateLift, PathFormula::State(Box::new(r)))
            }
            PathFormula::Not(x) => {
                let Some(l) = self.path_left_of(x)? else { return Ok(None) };
                (Rule::PathNegationSwap, PathFormula::Not(Box::new(l)))
            }
            PathFormula::And(a, b) => {
                let Some(ra) = self.path_right_of(a)? else { return Ok(None) };
                let Some(rb) = self.path_right_of(b)? else { return Ok(None) };
                (Rule::PathConjunction, PathFormula::And(Box::new(ra), Box::new(rb)))
            }
            PathFormula::Next(x) => {
                let Some(r) = self.path_right_of(x)? else { return Ok(None) };
                (Rule::Next, PathFormula::next(r))
            }
            PathFormula::Until(a, b) => {
                let Some(ra) = self.path_right_of(a)? else { return Ok(None) };
                let Some(rb) = self.path_right_of(b)? else { return Ok(None) };
                (Rule::Until, PathFormula::until(ra, rb))
            }
        };
        self.push(out.0, Pair::Path(f.clone(), out.1.clone()));
        Ok(Some(out.1))
    }

    fn path_left_of(&mut self, g: &PathFormula) -> Result<Option<PathFormula>> {
        let out = match g {
            PathFormula::State(s) => {
                let Some(l) = self.left_of(s)? else { return Ok(None) };
                (Rule::StateLift, PathFormula::State(Box::new(l)))
            }
            PathFormula::Not(x) => {
                let Some(r) = self.path_right_of(x)? else { return Ok(None) };
                (Rule::PathNegationSwap, PathFormula::Not(Box::new(r)))
            }
            PathFormula::And(a, b) => {
                let Some(la) = self.path_left_of(a)? else { return Ok(None) };
                let Some(lb) = self.path_left_of(b)? else { return Ok(None) };
                (Rule::PathConjunction, PathFormula::And(Box::new(la), Box::new(lb)))
            }
            PathFormula::Next(x) => {
                let Some(l) = self.path_left_of(x)? else { return Ok(None) };
                (Rule::Next, PathFormula::next(l))
            }
            PathFormula::Until(a, b) => {
                let Some(la) = self.path_left_of(a)? else { return Ok(None) };
                let Some(lb) = self.path_left_of(b)? else { return Ok(None) };
                (Rule::Until, PathFormula::until(la, lb))
            }
        };
        self.push(out.0, Pair::Path(out.1.clone(), g.clone()));
        Ok(Some(out.1))
    }
}

fn deriver<'a>(ag: &'a AgentSet, eps: f64) -> Result<Deriver<'a>> {
    if !eps.is_finite() || eps < 0.0 {
        return Err(Error::input(format!("radius must be a finite nonnegative number, got {eps}")));
    }
    Ok(Deriver { ag, eps, steps: Vec::new() })
}

/// The partner of a left state formula with its derivation; `None` when
/// `phi` is not a left formula.
pub fn h_derivation(phi: &StateFormula, ag: &AgentSet, eps: f64) -> Result<Option<HPartner>> {
    let mut d = deriver(ag, eps)?;
    Ok(d.right_of(phi)?.map(|right| HPartner {
        left: phi.clone(),
        right,
        derivation: d.steps,
    }))
}

/// The unique `gamma` related to `phi`, or `None` when `phi` is not a left formula.
pub fn h_partner(phi: &StateFormula, ag: &AgentSet, eps: f64) -> Result<Option<StateFormula>> {
    deriver(ag, eps)?.right_of(phi)
}

/// The unique `phi` related to `gamma`, or `None` when `gamma` is not a right formula.
pub fn h_inverse(gamma: &StateFormula, ag: &AgentSet, eps: f64) -> Result<Option<StateFormula>> {
    deriver(ag, eps)?.left_of(gamma)
}

/// Path-level partner of a left path formula.
pub fn e_partner(psi: &PathFormula, ag: &AgentSet, eps: f64) -> Result<Option<PathFormula>> {
    deriver(ag, eps)?.path_right_of(psi)
}

/// Path-level inverse partner.
pub fn e_inverse(phi: &PathFormula, ag: &AgentSet, eps: f64) -> Result<Option<PathFormula>> {
    deriver(ag, eps)?.path_left_of(phi)
}

/// Membership of `(phi, gamma)` in the state relation. Malformed input counts as non-membership.
pub fn decide_h(phi: &StateFormula, gamma: &StateFormula, ag: &AgentSet, eps: f64) -> bool {
    matches!(h_partner(phi, ag, eps), Ok(Some(g)) if &g == gamma)
}

/// Membership of `(psi, phi)` in the path relation.
pub fn decide_e(psi: &PathFormula, phi: &PathFormula, ag: &AgentSet, eps: f64) -> bool {
    matches!(e_partner(psi, ag, eps), Ok(Some(g)) if &g == phi)
}

/// Outcome of checking that truth of a left formula carries over to its
/// partner at the same state.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TransferCheck {
    pub formula: String,
    pub partner: String,
    pub formula_holds: bool,
    pub partner_holds: bool,
    pub consistent: bool,
}

pub fn check_transfer(sys: &AgentAts, q: StateId, phi: &StateFormula, ag: &AgentSet, eps: f64) -> Result<TransferCheck> {
    let gamma = h_partner(phi, ag, eps)?
        .ok_or_else(|| Error::input(format!("`{phi}` has no partner (not a left formula)")))?;
    let formula_holds = eval_state(sys, q, phi, eps)?;
    let partner_holds = eval_state(sys, q, &gamma, eps)?;
    Ok(TransferCheck {
        formula: phi.to_string(),
        partner: gamma.to_string(),
        formula_holds,
        partner_holds,
        consistent: !formula_holds || partner_holds,
    })
}
