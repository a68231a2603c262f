use super::{ExactChecker, PathFormula, PositiveLtl};
use crate::error::{Error, Result};
use crate::model::{lasso_check, within, AgentAts, Lasso, TransitionSystem};

fn check<S: TransitionSystem + ?Sized>(sys: &S, lasso: &Lasso) -> Result<()> {
    if lasso_check(sys, lasso) {
        Ok(())
    } else {
        Err(Error::InvalidLasso(format!("the lasso is not a path of `{}`", sys.name())))
    }
}

/// Least fixpoint of `b ∨ (a ∧ X z)` over the folded lasso positions.
fn until_positions(lasso: &Lasso, a: &[bool], b: &[bool]) -> Vec<bool> {
    let n = lasso.len();
    let mut z = b.to_vec();
    loop {
        let mut changed = false;
        for i in 0..n {
            if !z[i] && a[i] && z[lasso.next_position(i)] {
                z[i] = true;
                changed = true;
            }
        }
        if !changed {
            return z;
        }
    }
}

/// Truth of a path formula on the infinite word of `lasso`, from its first
/// position. Nested state formulas are checked exactly, so they must lie in
/// the exact fragment; `eps` is the analysis radius.
pub fn eval_lasso(sys: &AgentAts, lasso: &Lasso, f: &PathFormula, eps: f64) -> Result<bool> {
    check(sys, lasso)?;
    let mut ck = ExactChecker::new(sys, eps);
    fn go(ck: &mut ExactChecker<'_>, lasso: &Lasso, f: &PathFormula) -> Result<Vec<bool>> {
        let n = lasso.len();
        Ok(match f {
            PathFormula::State(s) => {
                let sat = ck.sat(s)?;
                (0..n).map(|i| sat[lasso.state_at(i)]).collect()
            }
            PathFormula::Not(x) => go(ck, lasso, x)?.into_iter().map(|b| !b).collect(),
            PathFormula::And(a, b) => {
                let va = go(ck, lasso, a)?;
                let vb = go(ck, lasso, b)?;
                va.into_iter().zip(vb).map(|(x, y)| x && y).collect()
            }
            PathFormula::Next(x) => {
                let vx = go(ck, lasso, x)?;
                (0..n).map(|i| vx[lasso.next_position(i)]).collect()
            }
            PathFormula::Until(a, b) => {
                let va = go(ck, lasso, a)?;
                let vb = go(ck, lasso, b)?;
                until_positions(lasso, &va, &vb)
            }
        })
    }
    Ok(go(&mut ck, lasso, f)?[0])
}

/// Truth of a negation-free LTL formula on the lasso of any system; each
/// approximate atom uses its own radius.
pub fn eval_lasso_ltl<S: TransitionSystem + ?Sized>(sys: &S, lasso: &Lasso, f: &PositiveLtl) -> Result<bool> {
    check(sys, lasso)?;
    fn go<S: TransitionSystem + ?Sized>(sys: &S, lasso: &Lasso, f: &PositiveLtl) -> Result<Vec<bool>> {
        let n = lasso.len();
        let space = sys.space();
        Ok(match f {
            PositiveLtl::Atom(p) => {
                let o = space.require(p)?;
                (0..n).map(|i| sys.observation(lasso.state_at(i)) == o).collect()
            }
            PositiveLtl::Diamond(e, p) => {
                let o = space.require(p)?;
                (0..n)
                    .map(|i| within(space.distance(o, sys.observation(lasso.state_at(i))), e.value()))
                    .collect()
            }
            PositiveLtl::Or(a, b) => {
                let va = go(sys, lasso, a)?;
                let vb = go(sys, lasso, b)?;
                va.into_iter().zip(vb).map(|(x, y)| x || y).collect()
            }
            PositiveLtl::And(a, b) => {
                let va = go(sys, lasso, a)?;
                let vb = go(sys, lasso, b)?;
                va.into_iter().zip(vb).map(|(x, y)| x && y).collect()
            }
            PositiveLtl::Next(x) => {
                let vx = go(sys, lasso, x)?;
                (0..n).map(|i| vx[lasso.next_position(i)]).collect()
            }
            PositiveLtl::Until(a, b) => {
                let va = go(sys, lasso, a)?;
                let vb = go(sys, lasso, b)?;
                until_positions(lasso, &va, &vb)
            }
        })
    }
    Ok(go(sys, lasso, f)?[0])
}
