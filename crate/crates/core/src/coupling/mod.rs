//! Couplings of categorical marginals.
//!
//! A [`Coupling`] is a sparse joint distribution over `t` coordinates. The
//! greedy construction here repeatedly takes, for every marginal, its largest
//! residual entry, places the smallest of those maxima on the tuple of argmax
//! indices and subtracts it from each marginal. Each step exhausts at least one
//! residual entry, so the support is at most `t (n - 1) + 1`.

mod oracle;
mod transfer;

use std::cmp::{Ordering, Reverse};
use std::collections::{BinaryHeap, HashSet};

use serde::{Deserialize, Serialize};

use crate::dist::{entropy_of_masses, stable_sum, Dist};
use crate::error::{Error, Result};

pub use oracle::brute_force_mec_small;
pub use transfer::transfer_coupling;

/// Residual entries below this are treated as exhausted.
pub(crate) const RESIDUAL_EPS: f64 = 1e-12;

/// One support point of a coupling.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Cell {
    pub idx: Vec<usize>,
    pub mass: f64,
}

/// A sparse joint distribution over `shape.len()` coordinates.
#[derive(Clone, Debug, PartialEq)]
pub struct Coupling {
    shape: Vec<usize>,
    cells: Vec<Cell>,
}

impl Coupling {
    /// Checks the structural invariants: in-range indices, non-negative
    /// masses, no repeated tuple. Total mass is checked by [`validate_coupling`].
    pub fn new(shape: Vec<usize>, cells: Vec<Cell>) -> Result<Self> {
        if shape.is_empty() || shape.contains(&0) {
            return Err(Error::InvalidCoupling(format!("bad shape {shape:?}")));
        }
        let mut seen = HashSet::with_capacity(cells.len());
        for cell in &cells {
            if cell.idx.len() != shape.len() {
                return Err(Error::InvalidCoupling(format!(
                    "cell {:?} has {} coordinates, shape has {}",
                    cell.idx,
                    cell.idx.len(),
                    shape.len()
                )));
            }
            if let Some((i, &u)) = cell.idx.iter().enumerate().find(|(i, u)| **u >= shape[*i]) {
                return Err(Error::InvalidCoupling(format!(
                    "coordinate {i} of {:?} is {u}, support is {}",
                    cell.idx, shape[i]
                )));
            }
            if !cell.mass.is_finite() || cell.mass < 0.0 {
                return Err(Error::InvalidCoupling(format!("mass {} at {:?}", cell.mass, cell.idx)));
            }
            if !seen.insert(cell.idx.as_slice()) {
                return Err(Error::InvalidCoupling(format!("duplicate cell {:?}", cell.idx)));
            }
        }
        Ok(Coupling { shape, cells })
    }

    pub(crate) fn from_parts_unchecked(shape: Vec<usize>, cells: Vec<Cell>) -> Self {
        Coupling { shape, cells }
    }

    pub fn shape(&self) -> &[usize] {
        &self.shape
    }

    pub fn cells(&self) -> &[Cell] {
        &self.cells
    }

    pub fn into_cells(self) -> Vec<Cell> {
        self.cells
    }

    pub fn support_size(&self) -> usize {
        self.cells.iter().filter(|c| c.mass > 0.0).count()
    }

    pub fn total_mass(&self) -> f64 {
        stable_sum(self.cells.iter().map(|c| c.mass))
    }

    pub fn entropy(&self) -> f64 {
        let masses: Vec<f64> = self.cells.iter().map(|c| c.mass).collect();
        entropy_of_masses(&masses)
    }

    /// Projection onto coordinate `i`.
    pub fn projection(&self, i: usize) -> Vec<f64> {
        let mut out = vec![0.0; self.shape[i]];
        for cell in &self.cells {
            out[cell.idx[i]] += cell.mass;
        }
        out
    }
}

/// Shannon entropy of the cell masses, in bits.
pub fn coupling_entropy(c: &Coupling) -> f64 {
    c.entropy()
}

/// Projection errors of a coupling against target marginals.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ValidationReport {
    /// `errors[i][u] = |projection_i(u) - marginal_i(u)|`.
    pub errors: Vec<Vec<f64>>,
    pub max_error: f64,
    pub total_mass: f64,
    pub tol: f64,
    pub passed: bool,
}

pub fn validate_coupling(c: &Coupling, marginals: &[Dist], tol: f64) -> Result<ValidationReport> {
    if marginals.len() != c.shape.len() {
        return Err(Error::ShapeMismatch(format!(
            "coupling has {} coordinates, {} marginals given",
            c.shape.len(),
            marginals.len()
        )));
    }
    for (i, (m, &s)) in marginals.iter().zip(&c.shape).enumerate() {
        if m.len() != s {
            return Err(Error::ShapeMismatch(format!(
                "marginal {i} has {} states, coupling coordinate has {s}",
                m.len()
            )));
        }
    }
    let errors: Vec<Vec<f64>> = marginals
        .iter()
        .enumerate()
        .map(|(i, m)| {
            c.projection(i)
                .iter()
                .zip(m.probs())
                .map(|(a, b)| (a - b).abs())
                .collect()
        })
        .collect();
    let max_error = errors.iter().flatten().copied().fold(0.0, f64::max);
    let total_mass = c.total_mass();
    let passed = max_error <= tol && (total_mass - 1.0).abs() <= tol;
    Ok(ValidationReport {
        errors,
        max_error,
        total_mass,
        tol,
        passed,
    })
}

/// Greedy approximate minimum-entropy coupling.
///
/// Ties between equal residual maxima go to the lowest index.
pub fn greedy_mec(marginals: &[Dist]) -> Result<Coupling> {
    let rows = check_marginals(marginals)?;
    let shape: Vec<usize> = marginals.iter().map(Dist::len).collect();
    let mut cells = Vec::new();
    greedy_run(&rows, |idx, mass| {
        cells.push(Cell {
            idx: idx.to_vec(),
            mass,
        })
    });
    Ok(Coupling { shape, cells })
}

/// Entropy of [`greedy_mec`]'s output without materializing the cells.
pub fn greedy_mec_entropy(marginals: &[Dist]) -> Result<f64> {
    let rows = check_marginals(marginals)?;
    Ok(greedy_entropy_of_rows(&rows))
}

pub(crate) fn greedy_entropy_of_rows(rows: &[Vec<f64>]) -> f64 {
    let mut masses = Vec::new();
    greedy_run(rows, |_, mass| masses.push(mass));
    entropy_of_masses(&masses)
}

fn check_marginals(marginals: &[Dist]) -> Result<Vec<Vec<f64>>> {
    if marginals.is_empty() {
        return Err(Error::InvalidParameter("coupling needs at least one marginal".into()));
    }
    // Renormalize so every residual vector starts with exactly the same total.
    Ok(marginals
        .iter()
        .map(|m| {
            let total = stable_sum(m.probs().iter().copied());
            m.probs().iter().map(|p| p / total).collect()
        })
        .collect())
}

#[derive(Clone, Copy, PartialEq)]
struct Entry {
    value: f64,
    index: usize,
}

impl Eq for Entry {}

impl Ord for Entry {
    fn cmp(&self, other: &Self) -> Ordering {
        self.value
            .total_cmp(&other.value)
            .then_with(|| Reverse(self.index).cmp(&Reverse(other.index)))
    }
}

impl PartialOrd for Entry {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Core greedy loop; calls `emit(argmax tuple, mass)` once per placed cell.
pub(crate) fn greedy_run(rows: &[Vec<f64>], mut emit: impl FnMut(&[usize], f64)) {
    let mut heaps: Vec<BinaryHeap<Entry>> = rows
        .iter()
        .map(|r| {
            r.iter()
                .enumerate()
                .filter(|(_, v)| **v >= RESIDUAL_EPS)
                .map(|(index, &value)| Entry { value, index })
                .collect()
        })
        .collect();
    let mut idx = vec![0usize; rows.len()];
    while heaps.iter().all(|h| !h.is_empty()) {
        let mut step = f64::INFINITY;
        for (slot, heap) in idx.iter_mut().zip(&heaps) {
            let top = heap.peek().expect("checked non-empty");
            *slot = top.index;
            step = step.min(top.value);
        }
        emit(&idx, step);
        for heap in &mut heaps {
            let mut top = heap.pop().expect("checked non-empty");
            top.value -= step;
            if top.value >= RESIDUAL_EPS {
                heap.push(top);
            }
        }
    }
}
