//! Finite-sample machinery: i.i.d. draws, plug-in estimates and entropy
//! estimation from counts.

use rand::Rng;
use rand_distr::{Binomial, Distribution};
use serde::{Deserialize, Serialize};

use crate::dist::{conditional_profile, entropy_of_masses, Axis, Joint};
use crate::error::{Error, Result};

/// Observed `(x, y)` pairs with 0-based states.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SampleSet {
    x_states: usize,
    y_states: usize,
    pairs: Vec<(usize, usize)>,
}

impl SampleSet {
    pub fn new(x_states: usize, y_states: usize, pairs: Vec<(usize, usize)>) -> Result<Self> {
        if let Some((x, y)) = pairs.iter().find(|(x, y)| *x >= x_states || *y >= y_states) {
            return Err(Error::InvalidParameter(format!(
                "sample ({}, {}) outside declared supports {x_states}x{y_states}",
                x + 1,
                y + 1
            )));
        }
        Ok(SampleSet {
            x_states,
            y_states,
            pairs,
        })
    }

    pub fn x_states(&self) -> usize {
        self.x_states
    }

    pub fn y_states(&self) -> usize {
        self.y_states
    }

    pub fn pairs(&self) -> &[(usize, usize)] {
        &self.pairs
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }
}

/// `N` i.i.d. draws from `j`.
pub fn draw_samples<R: Rng + ?Sized>(j: &Joint, n_samples: usize, rng: &mut R) -> SampleSet {
    let mut cdf = Vec::with_capacity(j.table().len());
    let mut acc = 0.0;
    for p in j.table() {
        acc += p;
        cdf.push(acc);
    }
    let last_positive = j.table().iter().rposition(|p| *p > 0.0).unwrap_or(0);
    let pairs = (0..n_samples)
        .map(|_| {
            let u = rng.random::<f64>() * acc;
            let cell = cdf.partition_point(|c| *c <= u).min(last_positive);
            (cell / j.cols(), cell % j.cols())
        })
        .collect();
    SampleSet {
        x_states: j.rows(),
        y_states: j.cols(),
        pairs,
    }
}

/// A contingency table of counts, rows indexing `X`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CountTable {
    rows: usize,
    cols: usize,
    counts: Vec<u64>,
    total: u64,
}

impl CountTable {
    pub fn new(rows: usize, cols: usize, counts: Vec<u64>) -> Result<Self> {
        if rows == 0 || cols == 0 || counts.len() != rows * cols {
            return Err(Error::ShapeMismatch(format!(
                "{} counts for a {rows}x{cols} table",
                counts.len()
            )));
        }
        let total = counts.iter().sum();
        Ok(CountTable {
            rows,
            cols,
            counts,
            total,
        })
    }

    pub fn from_samples(s: &SampleSet) -> Self {
        let mut counts = vec![0u64; s.x_states * s.y_states];
        for &(x, y) in &s.pairs {
            counts[x * s.y_states + y] += 1;
        }
        CountTable {
            rows: s.x_states,
            cols: s.y_states,
            total: s.pairs.len() as u64,
            counts,
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn total(&self) -> u64 {
        self.total
    }

    pub fn get(&self, x: usize, y: usize) -> u64 {
        self.counts[x * self.cols + y]
    }

    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    /// Counts of the slice conditioned on state `i` of `axis`.
    pub fn slice(&self, axis: Axis, i: usize) -> Vec<u64> {
        match axis {
            Axis::X => self.counts[i * self.cols..(i + 1) * self.cols].to_vec(),
            Axis::Y => (0..self.rows).map(|x| self.get(x, i)).collect(),
        }
    }

    /// Number of slices along `axis`.
    pub fn slices(&self, axis: Axis) -> usize {
        match axis {
            Axis::X => self.rows,
            Axis::Y => self.cols,
        }
    }

    /// `counts / N`.
    pub fn to_joint(&self) -> Result<Joint> {
        if self.total == 0 {
            return Err(Error::EmptySamples);
        }
        let n = self.total as f64;
        Joint::new(
            self.rows,
            self.cols,
            self.counts.iter().map(|c| *c as f64 / n).collect(),
        )
    }
}

/// Multinomial counts of `N` i.i.d. draws from `j`, via sequential binomials.
///
/// Distributed exactly as `CountTable::from_samples(&draw_samples(j, N, rng))`
/// but costs `O(cells)` rather than `O(N)`.
pub fn sample_counts<R: Rng + ?Sized>(j: &Joint, n_samples: u64, rng: &mut R) -> CountTable {
    let mut counts = vec![0u64; j.table().len()];
    let mut left = n_samples;
    let mut mass_left: f64 = j.table().iter().sum();
    for (slot, &p) in counts.iter_mut().zip(j.table()) {
        if left == 0 {
            break;
        }
        if p <= 0.0 {
            continue;
        }
        let prob = if mass_left <= p { 1.0 } else { p / mass_left };
        let k = if prob >= 1.0 {
            left
        } else {
            Binomial::new(left, prob)
                .expect("probability in [0, 1)")
                .sample(rng)
        };
        *slot = k;
        left -= k;
        mass_left -= p;
    }
    CountTable {
        rows: j.rows(),
        cols: j.cols(),
        counts,
        total: n_samples - left,
    }
}

/// Counts and the plug-in joint `counts / N`.
pub fn plugin_joint(s: &SampleSet) -> Result<(CountTable, Joint)> {
    if s.is_empty() {
        return Err(Error::EmptySamples);
    }
    let counts = CountTable::from_samples(s);
    let joint = counts.to_joint()?;
    Ok((counts, joint))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EntropyMethod {
    #[default]
    Plugin,
    /// Plug-in plus `(K - 1) / (2 N ln 2)` bits, `K` the number of non-zero counts.
    MillerMadow,
}

pub fn entropy_estimate(counts: &[u64], method: EntropyMethod) -> Result<f64> {
    let n: u64 = counts.iter().sum();
    if n == 0 {
        return Err(Error::EmptySamples);
    }
    let nf = n as f64;
    let freqs: Vec<f64> = counts.iter().map(|c| *c as f64 / nf).collect();
    let plugin = entropy_of_masses(&freqs);
    Ok(match method {
        EntropyMethod::Plugin => plugin,
        EntropyMethod::MillerMadow => {
            let support = counts.iter().filter(|c| **c > 0).count() as f64;
            plugin + (support - 1.0) / (2.0 * nf * std::f64::consts::LN_2)
        }
    })
}

/// Largest absolute error between the conditionals of `est` and `truth`
/// along `axis`. Slices absent from `truth` are skipped; a slice present in
/// `truth` but empty in `est` yields `f64::INFINITY`.
pub fn conditional_linf_error(truth: &Joint, est: &Joint, axis: Axis) -> Result<f64> {
    if truth.rows() != est.rows() || truth.cols() != est.cols() {
        return Err(Error::ShapeMismatch(format!(
            "{}x{} vs {}x{}",
            truth.rows(),
            truth.cols(),
            est.rows(),
            est.cols()
        )));
    }
    let (t, _) = conditional_profile(truth, axis);
    let (e, _) = conditional_profile(est, axis);
    let mut worst = 0.0f64;
    for (tc, ec) in t.conds.iter().zip(&e.conds) {
        match (tc, ec) {
            (None, _) => {}
            (Some(_), None) => return Ok(f64::INFINITY),
            (Some(a), Some(b)) => {
                for (p, q) in a.probs().iter().zip(b.probs()) {
                    worst = worst.max((p - q).abs());
                }
            }
        }
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn empty_and_point_mass_draws() {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let j = Joint::from_rows(&[vec![0.25, 0.25], vec![0.25, 0.25]]).unwrap();
        assert!(draw_samples(&j, 0, &mut rng).is_empty());

        let mut table = vec![0.0; 12];
        table[4 + 2] = 1.0; // (x=2, y=3) in 1-based labels
        let point = Joint::new(3, 4, table).unwrap();
        let s = draw_samples(&point, 50, &mut rng);
        assert!(s.pairs().iter().all(|p| *p == (1, 2)));
    }

    #[test]
    fn uniform_frequencies() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let j = Joint::from_rows(&[vec![0.25, 0.25], vec![0.25, 0.25]]).unwrap();
        let (_, est) = plugin_joint(&draw_samples(&j, 100_000, &mut rng)).unwrap();
        for p in est.table() {
            assert!((p - 0.25).abs() < 0.01);
        }
    }

    #[test]
    fn plugin_definitions() {
        let s = SampleSet::new(2, 2, vec![(0, 0), (0, 1), (1, 1), (1, 1)]).unwrap();
        let (counts, j) = plugin_joint(&s).unwrap();
        assert_eq!(counts.total(), 4);
        assert_eq!(j.x_marginal()[0], 0.5);
        assert_eq!(j.y_marginal()[1], 0.75);
        let (fam, _) = conditional_profile(&j, Axis::Y);
        let p = fam.conds[1].as_ref().unwrap().probs()[1];
        assert!((p - 2.0 / 3.0).abs() < 1e-15);

        let single = SampleSet::new(2, 2, vec![(0, 0)]).unwrap();
        assert_eq!(plugin_joint(&single).unwrap().1.get(0, 0), 1.0);
        assert!(matches!(
            plugin_joint(&SampleSet::new(2, 2, vec![]).unwrap()),
            Err(Error::EmptySamples)
        ));
        assert!(SampleSet::new(2, 2, vec![(2, 0)]).is_err());
    }

    #[test]
    fn entropy_estimates() {
        assert_eq!(entropy_estimate(&[5, 5], EntropyMethod::Plugin).unwrap(), 1.0);
        let mm = entropy_estimate(&[5, 5], EntropyMethod::MillerMadow).unwrap();
        assert!((mm - 1.072135).abs() < 1e-6, "{mm}");
        assert_eq!(entropy_estimate(&[10, 0, 0], EntropyMethod::Plugin).unwrap(), 0.0);
        assert_eq!(entropy_estimate(&[10, 0, 0], EntropyMethod::MillerMadow).unwrap(), 0.0);
        assert!(entropy_estimate(&[0, 0], EntropyMethod::Plugin).is_err());
    }

    #[test]
    fn linf_error_cases() {
        let truth = Joint::from_rows(&[vec![0.25, 0.25], vec![0.25, 0.25]]).unwrap();
        assert_eq!(conditional_linf_error(&truth, &truth, Axis::X).unwrap(), 0.0);
        // p(Y|X=0) becomes [0.55, 0.45] while p(X) stays uniform
        let shifted = Joint::from_rows(&[vec![0.275, 0.225], vec![0.25, 0.25]]).unwrap();
        let e = conditional_linf_error(&truth, &shifted, Axis::X).unwrap();
        assert!((e - 0.05).abs() < 1e-12);
        let missing = Joint::from_rows(&[vec![0.5, 0.5], vec![0.0, 0.0]]).unwrap();
        assert_eq!(conditional_linf_error(&truth, &missing, Axis::X).unwrap(), f64::INFINITY);
        let other = Joint::from_rows(&[vec![1.0]]).unwrap();
        assert!(conditional_linf_error(&truth, &other, Axis::X).is_err());
    }

    #[test]
    fn multinomial_counts_match_totals() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let j = Joint::from_rows(&[vec![0.1, 0.2, 0.0], vec![0.3, 0.0, 0.4]]).unwrap();
        let c = sample_counts(&j, 1_000_000, &mut rng);
        assert_eq!(c.total(), 1_000_000);
        assert_eq!(c.get(0, 2), 0);
        assert_eq!(c.get(1, 1), 0);
        let est = c.to_joint().unwrap();
        for (p, q) in est.table().iter().zip(j.table()) {
            assert!((p - q).abs() < 3e-3);
        }
    }
}
