use super::{StateId, TransitionSystem};
use crate::error::{Error, Result};

/// An ultimately periodic trace `prefix · cycle^ω`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Lasso {
    prefix: Vec<StateId>,
    cycle: Vec<StateId>,
}

impl Lasso {
    pub fn new(prefix: Vec<StateId>, cycle: Vec<StateId>) -> Result<Self> {
        if cycle.is_empty() {
            return Err(Error::InvalidLasso("cycle must be nonempty".into()));
        }
        Ok(Self { prefix, cycle })
    }

    pub fn prefix(&self) -> &[StateId] {
        &self.prefix
    }

    pub fn cycle(&self) -> &[StateId] {
        &self.cycle
    }

    /// Number of distinct positions in the folded representation.
    pub fn len(&self) -> usize {
        self.prefix.len() + self.cycle.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// State at folded position `i`.
    pub fn state_at(&self, i: usize) -> StateId {
        if i < self.prefix.len() {
            self.prefix[i]
        } else {
            self.cycle[i - self.prefix.len()]
        }
    }

    /// Folded position following `i`; the last cycle position wraps.
    pub fn next_position(&self, i: usize) -> usize {
        if i + 1 < self.len() {
            i + 1
        } else {
            self.prefix.len()
        }
    }

    /// The `k`-th state of the infinite word (0-based).
    pub fn unrolled(&self, k: usize) -> StateId {
        if k < self.prefix.len() {
            self.prefix[k]
        } else {
            self.cycle[(k - self.prefix.len()) % self.cycle.len()]
        }
    }

    /// The lasso for the suffix starting one step later.
    pub fn tail(&self) -> Lasso {
        if self.prefix.is_empty() {
            let mut cycle = self.cycle.clone();
            cycle.rotate_left(1);
            Lasso { prefix: Vec::new(), cycle }
        } else {
            Lasso {
                prefix: self.prefix[1..].to_vec(),
                cycle: self.cycle.clone(),
            }
        }
    }
}

/// True iff every step of the lasso, including the wrap-around, is a
/// transition of `sys`.
pub fn lasso_check<S: TransitionSystem + ?Sized>(sys: &S, lasso: &Lasso) -> bool {
    let n = sys.num_states();
    if (0..lasso.len()).any(|i| lasso.state_at(i) >= n) {
        return false;
    }
    (0..lasso.len()).all(|i| sys.has_edge(lasso.state_at(i), lasso.state_at(lasso.next_position(i))))
}
