//! Converts a coupling of some marginals into a coupling of nearby marginals.
//!
//! Phase I shrinks the cells feeding every coordinate whose projected mass
//! exceeds the new target, until no coordinate is over-full. Phase II couples
//! the per-marginal leftover mass with the greedy algorithm and adds it back.
//! The entropy grows by at most `log2(e)/e + 2 + o(1)` bits when every target
//! moved by at most `1 / (n^2 log n)`.

use std::collections::HashMap;

use super::{greedy_run, Cell, Coupling, RESIDUAL_EPS};
use crate::dist::{stable_sum, Dist};
use crate::error::{Error, Result};

/// Slack allowed when deciding that a coordinate is over-full.
const OVERFULL_EPS: f64 = 1e-13;

pub fn transfer_coupling(p: &Coupling, noisy: &[Dist], delta: f64) -> Result<Coupling> {
    let shape = p.shape().to_vec();
    if noisy.len() != shape.len() {
        return Err(Error::ShapeMismatch(format!(
            "coupling has {} coordinates, {} noisy marginals given",
            shape.len(),
            noisy.len()
        )));
    }
    for (i, (m, &s)) in noisy.iter().zip(&shape).enumerate() {
        if m.len() != s {
            return Err(Error::ShapeMismatch(format!(
                "noisy marginal {i} has {} states, coordinate has {s}",
                m.len()
            )));
        }
    }
    if !(delta >= 0.0) {
        return Err(Error::InvalidParameter(format!("delta must be non-negative, got {delta}")));
    }
    for (i, target) in noisy.iter().enumerate() {
        for (u, (proj, want)) in p.projection(i).iter().zip(target.probs()).enumerate() {
            let gap = (proj - want).abs();
            if gap > delta + OVERFULL_EPS {
                return Err(Error::DeltaExceeded {
                    marginal: i,
                    coord: u,
                    gap,
                    delta,
                });
            }
        }
    }

    let mut cells: Vec<Cell> = p.cells().to_vec();
    // contributors[i][u]: cells whose i-th coordinate is u
    let mut contributors: Vec<Vec<Vec<usize>>> = shape.iter().map(|&s| vec![Vec::new(); s]).collect();
    for (c, cell) in cells.iter().enumerate() {
        for (i, &u) in cell.idx.iter().enumerate() {
            contributors[i][u].push(c);
        }
    }

    // Phase I: marginals in ascending order, coordinates ascending; repeat
    // until no coordinate is over-full. Shrinking cells never creates a new
    // over-full coordinate, so one sweep normally suffices.
    let max_sweeps = shape.iter().sum::<usize>() + 1;
    for _ in 0..max_sweeps {
        let mut changed = false;
        for (i, target) in noisy.iter().enumerate() {
            for (u, &want) in target.probs().iter().enumerate() {
                let have = stable_sum(contributors[i][u].iter().map(|&c| cells[c].mass));
                if have > want + OVERFULL_EPS {
                    let scale = want / have;
                    for &c in &contributors[i][u] {
                        cells[c].mass *= scale;
                    }
                    changed = true;
                }
            }
        }
        if !changed {
            break;
        }
    }

    // Phase II: couple the leftover mass of every marginal.
    let residuals: Vec<Vec<f64>> = noisy
        .iter()
        .enumerate()
        .map(|(i, target)| {
            target
                .probs()
                .iter()
                .enumerate()
                .map(|(u, &want)| {
                    let have = stable_sum(contributors[i][u].iter().map(|&c| cells[c].mass));
                    (want - have).max(0.0)
                })
                .collect()
        })
        .collect();
    let kept = stable_sum(cells.iter().map(|c| c.mass));
    let leftover = (1.0 - kept).max(0.0);
    let any_residual = residuals.iter().flatten().any(|r| *r >= RESIDUAL_EPS);
    if any_residual && leftover >= RESIDUAL_EPS {
        let normalized: Vec<Vec<f64>> = residuals
            .iter()
            .map(|r| {
                let total = stable_sum(r.iter().copied());
                r.iter().map(|x| x / total).collect()
            })
            .collect();
        let mut position: HashMap<Vec<usize>, usize> = cells
            .iter()
            .enumerate()
            .map(|(c, cell)| (cell.idx.clone(), c))
            .collect();
        greedy_run(&normalized, |idx, mass| {
            let mass = mass * leftover;
            match position.get(idx) {
                Some(&c) => cells[c].mass += mass,
                None => {
                    position.insert(idx.to_vec(), cells.len());
                    cells.push(Cell {
                        idx: idx.to_vec(),
                        mass,
                    });
                }
            }
        });
    }
    cells.retain(|c| c.mass > 0.0);
    Ok(Coupling::from_parts_unchecked(shape, cells))
}
