use std::collections::HashMap;

use crate::error::{Error, Result};

/// Absolute tolerance used for every comparison of parsed reals.
pub const TOLERANCE: f64 = 1e-9;

/// `a <= b` up to [`TOLERANCE`].
pub fn within(a: f64, b: f64) -> bool {
    a <= b + TOLERANCE
}

#[derive(Debug, Clone, PartialEq)]
pub enum MetricKind {
    /// Explicit symmetric distance table.
    Table,
    /// Each observation carries a vector; distance is the max-norm of the difference.
    Chebyshev { dim: usize, vectors: Vec<Vec<f64>> },
}

/// A finite observation set together with a metric over it.
///
/// Distances are materialized into a dense matrix at construction time.
#[derive(Debug, Clone, PartialEq)]
pub struct MetricObsSpace {
    names: Vec<String>,
    index: HashMap<String, usize>,
    kind: MetricKind,
    dist: Vec<Vec<f64>>,
}

impl MetricObsSpace {
    /// Builds a table metric. Missing off-diagonal entries are an error; the
    /// diagonal is implicitly zero.
    pub fn from_table(names: Vec<String>, entries: &[(String, String, f64)]) -> Result<Self> {
        let index = index_names(&names)?;
        let n = names.len();
        let mut dist: Vec<Vec<Option<f64>>> = vec![vec![None; n]; n];
        for i in 0..n {
            dist[i][i] = Some(0.0);
        }
        for (a, b, v) in entries {
            let i = *index
                .get(a)
                .ok_or_else(|| Error::input(format!("unknown observation `{a}` in metric table")))?;
            let j = *index
                .get(b)
                .ok_or_else(|| Error::input(format!("unknown observation `{b}` in metric table")))?;
            if !v.is_finite() || *v < 0.0 {
                return Err(Error::input(format!("distance {a} {b} = {v} is not a nonnegative real")));
            }
            for (x, y) in [(i, j), (j, i)] {
                match dist[x][y] {
                    Some(old) if old != *v => {
                        return Err(Error::input(format!(
                            "metric table is not symmetric as written: d({a},{b}) given as {old} and {v}"
                        )))
                    }
                    _ => dist[x][y] = Some(*v),
                }
            }
        }
        let mut full = vec![vec![0.0; n]; n];
        for i in 0..n {
            for j in 0..n {
                full[i][j] = dist[i][j].ok_or_else(|| {
                    Error::input(format!("metric table has no entry for {} {}", names[i], names[j]))
                })?;
            }
        }
        Ok(Self {
            names,
            index,
            kind: MetricKind::Table,
            dist: full,
        })
    }

    pub fn chebyshev(dim: usize, named: Vec<(String, Vec<f64>)>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::input("chebyshev metric needs dim >= 1"));
        }
        for (name, v) in &named {
            if v.len() != dim {
                return Err(Error::input(format!(
                    "observation `{name}` has {} coordinates, expected {dim}",
                    v.len()
                )));
            }
            if v.iter().any(|x| !x.is_finite()) {
                return Err(Error::input(format!("observation `{name}` has a non-finite coordinate")));
            }
        }
        let names: Vec<String> = named.iter().map(|(n, _)| n.clone()).collect();
        let vectors: Vec<Vec<f64>> = named.into_iter().map(|(_, v)| v).collect();
        let index = index_names(&names)?;
        let n = names.len();
        let mut dist = vec![vec![0.0; n]; n];
        for i in 0..n {
            for j in 0..n {
                dist[i][j] = vectors[i]
                    .iter()
                    .zip(&vectors[j])
                    .map(|(x, y)| (x - y).abs())
                    .fold(0.0, f64::max);
            }
        }
        Ok(Self {
            names,
            index,
            kind: MetricKind::Chebyshev { dim, vectors },
            dist,
        })
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn name(&self, obs: usize) -> &str {
        &self.names[obs]
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.index.get(name).copied()
    }

    pub fn kind(&self) -> &MetricKind {
        &self.kind
    }

    pub fn distance(&self, a: usize, b: usize) -> f64 {
        self.dist[a][b]
    }

    /// Index lookup that reports unknown names as input errors.
    pub fn require(&self, name: &str) -> Result<usize> {
        self.index_of(name)
            .ok_or_else(|| Error::input(format!("unknown observation `{name}`")))
    }

    /// Checks the metric axioms; returns one message per violated instance.
    pub fn axiom_violations(&self) -> Vec<String> {
        let n = self.len();
        let mut out = Vec::new();
        for i in 0..n {
            for j in 0..n {
                let d = self.dist[i][j];
                if i == j && d.abs() > TOLERANCE {
                    out.push(format!("d({0},{0}) = {d} is not zero", self.names[i]));
                }
                if i != j && d <= TOLERANCE {
                    out.push(format!(
                        "d({},{}) = {d} but the observations are distinct",
                        self.names[i], self.names[j]
                    ));
                }
                if (d - self.dist[j][i]).abs() > TOLERANCE {
                    out.push(format!("d({},{}) is not symmetric", self.names[i], self.names[j]));
                }
                for k in 0..n {
                    if !within(d, self.dist[i][k] + self.dist[k][j]) {
                        out.push(format!(
                            "triangle inequality fails for {}, {}, {}",
                            self.names[i], self.names[k], self.names[j]
                        ));
                    }
                }
            }
        }
        out
    }

    /// Two spaces are interchangeable when they name the same observations in
    /// the same order with the same distances.
    pub fn same_space(&self, other: &MetricObsSpace) -> bool {
        self.names == other.names
            && self
                .dist
                .iter()
                .flatten()
                .zip(other.dist.iter().flatten())
                .all(|(a, b)| (a - b).abs() <= TOLERANCE)
    }
}

fn index_names(names: &[String]) -> Result<HashMap<String, usize>> {
    let mut index = HashMap::new();
    for (i, n) in names.iter().enumerate() {
        if index.insert(n.clone(), i).is_some() {
            return Err(Error::input(format!("observation `{n}` declared twice")));
        }
    }
    Ok(index)
}
