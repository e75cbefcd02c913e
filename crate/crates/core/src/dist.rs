//! Categorical distributions, joint tables and entropy functionals.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::SUM_TOL;

/// A probability vector on `{0, .., n-1}`.
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(transparent)]
pub struct Dist {
    probs: Vec<f64>,
}

impl Dist {
    /// Validates `probs`: non-empty, finite, non-negative, summing to one within [`SUM_TOL`].
    pub fn new(probs: Vec<f64>) -> Result<Self> {
        if probs.is_empty() {
            return Err(Error::InvalidDist("empty support".into()));
        }
        if let Some((i, p)) = probs
            .iter()
            .enumerate()
            .find(|(_, p)| !p.is_finite() || **p < 0.0)
        {
            return Err(Error::InvalidDist(format!("entry {i} is {p}")));
        }
        let total = stable_sum(probs.iter().copied());
        if (total - 1.0).abs() > SUM_TOL {
            return Err(Error::InvalidDist(format!("entries sum to {total}")));
        }
        Ok(Dist { probs })
    }

    /// Normalizes non-negative weights into a distribution.
    pub fn from_weights(weights: Vec<f64>) -> Result<Self> {
        if weights.iter().any(|w| !w.is_finite() || *w < 0.0) {
            return Err(Error::InvalidDist("weights must be finite and non-negative".into()));
        }
        let total = stable_sum(weights.iter().copied());
        if !(total > 0.0) {
            return Err(Error::InvalidDist("weights sum to zero".into()));
        }
        Dist::new(weights.into_iter().map(|w| w / total).collect())
    }

    pub fn uniform(n: usize) -> Self {
        assert!(n >= 1, "uniform distribution needs at least one state");
        Dist {
            probs: vec![1.0 / n as f64; n],
        }
    }

    /// Point mass on `state`.
    pub fn point(n: usize, state: usize) -> Self {
        assert!(state < n, "state {state} outside support of size {n}");
        let mut probs = vec![0.0; n];
        probs[state] = 1.0;
        Dist { probs }
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn len(&self) -> usize {
        self.probs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probs.is_empty()
    }

    pub fn entropy(&self) -> f64 {
        entropy_of_masses(&self.probs)
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.probs
    }
}

impl<'de> Deserialize<'de> for Dist {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let probs = Vec::<f64>::deserialize(d)?;
        Dist::new(probs).map_err(serde::de::Error::custom)
    }
}

/// A vector of masses in `[0, 1]` whose total may fall short of one.
#[derive(Clone, Debug, PartialEq)]
pub struct SubDist {
    masses: Vec<f64>,
}

impl SubDist {
    pub fn new(masses: Vec<f64>) -> Result<Self> {
        if let Some((i, m)) = masses
            .iter()
            .enumerate()
            .find(|(_, m)| !(0.0..=1.0).contains(*m))
        {
            return Err(Error::InvalidDist(format!("sub-distribution entry {i} is {m}")));
        }
        let total = stable_sum(masses.iter().copied());
        if total > 1.0 + SUM_TOL {
            return Err(Error::InvalidDist(format!("sub-distribution sums to {total}")));
        }
        Ok(SubDist { masses })
    }

    pub fn masses(&self) -> &[f64] {
        &self.masses
    }
}

/// Shannon entropy in bits, `0 log 0 = 0`.
pub fn entropy(d: &Dist) -> f64 {
    d.entropy()
}

/// `-sum m log2 m` over the non-zero entries, for vectors off the simplex.
pub fn extended_entropy(s: &SubDist) -> f64 {
    entropy_of_masses(&s.masses)
}

/// `-sum m log2 m` over raw masses.
///
/// Terms are summed in sorted order, so the result does not depend on the
/// order of `masses`.
pub fn entropy_of_masses(masses: &[f64]) -> f64 {
    let mut terms: Vec<f64> = masses
        .iter()
        .filter(|m| **m > 0.0)
        .map(|&m| -m * m.log2())
        .collect();
    terms.sort_unstable_by(f64::total_cmp);
    stable_sum(terms.into_iter()).max(0.0)
}

/// Neumaier-compensated summation.
pub(crate) fn stable_sum(values: impl Iterator<Item = f64>) -> f64 {
    let mut sum = 0.0f64;
    let mut comp = 0.0f64;
    for v in values {
        let t = sum + v;
        if sum.abs() >= v.abs() {
            comp += (sum - t) + v;
        } else {
            comp += (v - t) + sum;
        }
        sum = t;
    }
    sum + comp
}

/// An `n x m` joint probability table over `(X, Y)`, stored row-major
/// (rows index `X`).
#[derive(Clone, Debug, PartialEq)]
pub struct Joint {
    rows: usize,
    cols: usize,
    table: Vec<f64>,
}

impl Joint {
    pub fn new(rows: usize, cols: usize, table: Vec<f64>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::InvalidJoint("empty support".into()));
        }
        if table.len() != rows * cols {
            return Err(Error::InvalidJoint(format!(
                "table has {} entries, expected {rows}x{cols}",
                table.len()
            )));
        }
        if table.iter().any(|p| !p.is_finite() || *p < 0.0) {
            return Err(Error::InvalidJoint("entries must be finite and non-negative".into()));
        }
        let total = stable_sum(table.iter().copied());
        if (total - 1.0).abs() > SUM_TOL {
            return Err(Error::InvalidJoint(format!("entries sum to {total}")));
        }
        Ok(Joint { rows, cols, table })
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let n = rows.len();
        let m = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != m) {
            return Err(Error::InvalidJoint("ragged rows".into()));
        }
        Joint::new(n, m, rows.concat())
    }

    /// The product table `p(x) p(y)`.
    pub fn independent(px: &Dist, py: &Dist) -> Self {
        let table = px
            .probs()
            .iter()
            .flat_map(|a| py.probs().iter().map(move |b| a * b))
            .collect();
        Joint {
            rows: px.len(),
            cols: py.len(),
            table,
        }
    }

    /// Number of states of `X`.
    pub fn rows(&self) -> usize {
        self.rows
    }

    /// Number of states of `Y`.
    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, x: usize, y: usize) -> f64 {
        self.table[x * self.cols + y]
    }

    pub fn table(&self) -> &[f64] {
        &self.table
    }

    pub fn row(&self, x: usize) -> &[f64] {
        &self.table[x * self.cols..(x + 1) * self.cols]
    }

    /// Row sums, `p(X)`.
    pub fn x_marginal(&self) -> Vec<f64> {
        (0..self.rows)
            .map(|x| stable_sum(self.row(x).iter().copied()))
            .collect()
    }

    /// Column sums, `p(Y)`.
    pub fn y_marginal(&self) -> Vec<f64> {
        (0..self.cols)
            .map(|y| stable_sum((0..self.rows).map(|x| self.get(x, y))))
            .collect()
    }

    pub fn h_x(&self) -> f64 {
        entropy_of_masses(&self.x_marginal())
    }

    pub fn h_y(&self) -> f64 {
        entropy_of_masses(&self.y_marginal())
    }

    pub fn transpose(&self) -> Joint {
        let mut table = Vec::with_capacity(self.table.len());
        for y in 0..self.cols {
            for x in 0..self.rows {
                table.push(self.get(x, y));
            }
        }
        Joint {
            rows: self.cols,
            cols: self.rows,
            table,
        }
    }

    /// Relabels states: entry `(x, y)` moves to `(row_perm[x], col_perm[y])`.
    pub fn permuted(&self, row_perm: &[usize], col_perm: &[usize]) -> Joint {
        assert_eq!(row_perm.len(), self.rows);
        assert_eq!(col_perm.len(), self.cols);
        let mut table = vec![0.0; self.table.len()];
        for x in 0..self.rows {
            for y in 0..self.cols {
                table[row_perm[x] * self.cols + col_perm[y]] = self.get(x, y);
            }
        }
        Joint {
            rows: self.rows,
            cols: self.cols,
            table,
        }
    }

    pub(crate) fn from_parts_unchecked(rows: usize, cols: usize, table: Vec<f64>) -> Joint {
        debug_assert_eq!(table.len(), rows * cols);
        Joint { rows, cols, table }
    }
}

/// Which variable a conditional family conditions on.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Axis {
    /// Slices `p(Y | X = x)`, one per state of `X`.
    X,
    /// Slices `p(X | Y = y)`, one per state of `Y`.
    Y,
}

/// A family of slice conditionals together with the mixing weights of the
/// conditioning variable. Zero-weight slices are `None`.
#[derive(Clone, Debug, PartialEq)]
pub struct CondFamily {
    pub axis: Axis,
    pub conds: Vec<Option<Dist>>,
    pub weights: Dist,
}

impl CondFamily {
    /// The slices that carry positive weight.
    pub fn present(&self) -> impl Iterator<Item = &Dist> {
        self.conds.iter().flatten()
    }

    /// Mixes the slices back into a joint table.
    pub fn reconstruct(&self) -> Joint {
        let k = self.conds.len();
        let other = self.present().next().map_or(1, Dist::len);
        let mut slices = vec![0.0; k * other];
        for (i, cond) in self.conds.iter().enumerate() {
            if let Some(c) = cond {
                let w = self.weights.probs()[i];
                for (j, p) in c.probs().iter().enumerate() {
                    slices[i * other + j] = w * p;
                }
            }
        }
        let j = Joint::from_parts_unchecked(k, other, slices);
        match self.axis {
            Axis::X => j,
            Axis::Y => j.transpose(),
        }
    }
}

/// Slice conditionals along `axis` and the entropies of the non-empty slices.
pub fn conditional_profile(j: &Joint, axis: Axis) -> (CondFamily, Vec<f64>) {
    let oriented = match axis {
        Axis::X => j.clone(),
        Axis::Y => j.transpose(),
    };
    let weights = oriented.x_marginal();
    let mut conds = Vec::with_capacity(oriented.rows());
    let mut entropies = Vec::new();
    for (i, &w) in weights.iter().enumerate() {
        if w > 0.0 {
            let slice: Vec<f64> = oriented.row(i).iter().map(|p| p / w).collect();
            let d = Dist { probs: slice };
            entropies.push(d.entropy());
            conds.push(Some(d));
        } else {
            conds.push(None);
        }
    }
    let total = stable_sum(weights.iter().copied());
    let weights = Dist {
        probs: weights.into_iter().map(|w| w / total).collect(),
    };
    (
        CondFamily {
            axis,
            conds,
            weights,
        },
        entropies,
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    #[test]
    fn entropy_examples() {
        assert_eq!(entropy(&Dist::new(vec![0.5, 0.5]).unwrap()), 1.0);
        assert_eq!(entropy(&Dist::new(vec![1.0, 0.0, 0.0]).unwrap()), 0.0);
        // -0.6 log2 0.6 - 0.4 log2 0.4
        let h = entropy(&Dist::new(vec![0.6, 0.4]).unwrap());
        assert!(close(h, 0.970951, 1e-6), "{h}");
    }

    #[test]
    fn uniform_entropy_is_log_n() {
        for n in [1usize, 2, 3, 7, 100, 1000, 65535, 1 << 16] {
            let h = Dist::uniform(n).entropy();
            assert!(close(h, (n as f64).log2(), 1e-12), "n={n}: {h}");
        }
    }

    #[test]
    fn rejects_invalid_dists() {
        assert!(Dist::new(vec![]).is_err());
        assert!(Dist::new(vec![0.5, 0.6]).is_err());
        assert!(Dist::new(vec![1.5, -0.5]).is_err());
        assert!(Dist::new(vec![f64::NAN, 1.0]).is_err());
        assert!(Dist::new(vec![0.5, 0.5 + 5e-10]).is_ok());
    }

    #[test]
    fn extended_entropy_examples() {
        let full = SubDist::new(vec![0.5, 0.5]).unwrap();
        assert_eq!(extended_entropy(&full), 1.0);
        let quarter = SubDist::new(vec![0.25]).unwrap();
        assert!(close(extended_entropy(&quarter), 0.5, 1e-15));
        assert_eq!(extended_entropy(&SubDist::new(vec![]).unwrap()), 0.0);
        assert!(SubDist::new(vec![1.2]).is_err());
        assert!(SubDist::new(vec![-0.1]).is_err());
        assert!(SubDist::new(vec![0.7, 0.7]).is_err());
    }

    #[test]
    fn profile_on_y_slices() {
        let j = Joint::from_rows(&[vec![0.25, 0.25], vec![0.25, 0.25]]).unwrap();
        let (fam, h) = conditional_profile(&j, Axis::Y);
        assert_eq!(h, vec![1.0, 1.0]);
        assert_eq!(fam.conds.len(), 2);

        let diag = Joint::from_rows(&[
            vec![1.0 / 3.0, 0.0, 0.0],
            vec![0.0, 1.0 / 3.0, 0.0],
            vec![0.0, 0.0, 1.0 / 3.0],
        ])
        .unwrap();
        let (_, h) = conditional_profile(&diag, Axis::Y);
        assert_eq!(h, vec![0.0, 0.0, 0.0]);
    }

    #[test]
    fn zero_weight_slices_are_marked_empty() {
        let j = Joint::from_rows(&[vec![0.5, 0.0, 0.0], vec![0.0, 0.5, 0.0]]).unwrap();
        let (fam, h) = conditional_profile(&j, Axis::Y);
        assert!(fam.conds[2].is_none());
        assert_eq!(h.len(), 2);
        assert_eq!(fam.present().count(), 2);
        assert_eq!(fam.reconstruct(), j);
    }

    #[test]
    fn transpose_and_marginals() {
        let j = Joint::from_rows(&[vec![0.1, 0.2, 0.3], vec![0.0, 0.25, 0.15]]).unwrap();
        let t = j.transpose();
        assert_eq!(t.rows(), 3);
        assert_eq!(t.get(2, 1), 0.15);
        assert_eq!(j.x_marginal(), t.y_marginal());
        assert_eq!(t.transpose(), j);
    }
}
