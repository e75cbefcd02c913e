//! Causal-direction criteria for a pair of categorical variables.
//!
//! Every criterion produces a forward score (for `X -> Y`) and a backward
//! score (for `Y -> X`) and picks the direction with the smaller one:
//!
//! - **exogenous**: entropy of the greedy coupling of `{p(Y|x)}` against that of `{p(X|y)}`;
//! - **total**: `H(X) + H(E)` against `H(Y) + H(E~)`;
//! - **conditional**: `max_x H(Y|X=x)` against `max_y H(X|Y=y)`;
//! - **observed**: `H(Y)` against `H(X)`, i.e. the higher-entropy variable is the cause.

use serde::{Deserialize, Serialize};

use crate::coupling::greedy_entropy_of_rows;
use crate::dist::{conditional_profile, Axis, Joint};
use crate::error::{Error, Result};
use crate::estimation::{entropy_estimate, CountTable, EntropyMethod};

/// Score differences at or below this are ties.
pub const TIE_EPS: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Direction {
    XtoY,
    YtoX,
    Undecided,
}

impl Direction {
    pub fn reversed(self) -> Direction {
        match self {
            Direction::XtoY => Direction::YtoX,
            Direction::YtoX => Direction::XtoY,
            Direction::Undecided => Direction::Undecided,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Direction::XtoY => "XtoY",
            Direction::YtoX => "YtoX",
            Direction::Undecided => "Undecided",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Criterion {
    Exogenous,
    Total,
    Conditional,
    Observed,
}

impl Criterion {
    pub const ALL: [Criterion; 4] = [
        Criterion::Exogenous,
        Criterion::Total,
        Criterion::Conditional,
        Criterion::Observed,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Criterion::Exogenous => "exogenous",
            Criterion::Total => "total",
            Criterion::Conditional => "conditional",
            Criterion::Observed => "observed",
        }
    }
}

impl std::str::FromStr for Criterion {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Criterion::ALL
            .into_iter()
            .find(|c| c.as_str() == s)
            .ok_or_else(|| Error::InvalidParameter(format!("unknown criterion {s:?}")))
    }
}

/// A decision and the scores behind it. Entropies are in bits.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Verdict {
    pub criterion: Criterion,
    pub direction: Direction,
    pub h_exo_fwd: f64,
    pub h_exo_bwd: f64,
    pub h_x: f64,
    pub h_y: f64,
    pub max_cond_fwd: f64,
    pub max_cond_bwd: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub threshold_used: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub diagnostic: Option<String>,
}

impl Verdict {
    /// The forward and backward scores the criterion compares.
    pub fn scores(&self) -> (f64, f64) {
        match self.criterion {
            Criterion::Exogenous => (self.h_exo_fwd, self.h_exo_bwd),
            Criterion::Total => (self.h_x + self.h_exo_fwd, self.h_y + self.h_exo_bwd),
            Criterion::Conditional => (self.max_cond_fwd, self.max_cond_bwd),
            Criterion::Observed => (self.h_y, self.h_x),
        }
    }
}

/// All scores of a joint, computed once and shared by the criteria.
#[derive(Clone, Debug, PartialEq)]
pub struct Scores {
    pub h_exo_fwd: f64,
    pub h_exo_bwd: f64,
    pub h_x: f64,
    pub h_y: f64,
    /// `None` when no slice on that side passed the sample-count filter.
    pub max_cond_fwd: Option<f64>,
    pub max_cond_bwd: Option<f64>,
}

impl Scores {
    pub fn from_joint(j: &Joint) -> Scores {
        let (fwd, fwd_h) = conditional_profile(j, Axis::X);
        let (bwd, bwd_h) = conditional_profile(j, Axis::Y);
        let rows = |fam: &crate::dist::CondFamily| -> Vec<Vec<f64>> {
            fam.present().map(|d| d.probs().to_vec()).collect()
        };
        Scores {
            h_exo_fwd: greedy_entropy_of_rows(&rows(&fwd)),
            h_exo_bwd: greedy_entropy_of_rows(&rows(&bwd)),
            h_x: j.h_x(),
            h_y: j.h_y(),
            max_cond_fwd: fwd_h.into_iter().reduce(f64::max),
            max_cond_bwd: bwd_h.into_iter().reduce(f64::max),
        }
    }

    /// Scores from counts: couplings use the plug-in conditionals; the
    /// conditional maxima only use slices with at least `min_slice` samples,
    /// each estimated with `method`.
    pub fn from_counts(counts: &CountTable, min_slice: u64, method: EntropyMethod) -> Result<Scores> {
        let joint = counts.to_joint()?;
        let mut s = Scores::from_joint(&joint);
        let slice_max = |axis: Axis| -> Result<Option<f64>> {
            let mut best: Option<f64> = None;
            for i in 0..counts.slices(axis) {
                let slice = counts.slice(axis, i);
                let n: u64 = slice.iter().sum();
                if n == 0 || n < min_slice {
                    continue;
                }
                let h = entropy_estimate(&slice, method)?;
                best = Some(best.map_or(h, |b| b.max(h)));
            }
            Ok(best)
        };
        s.max_cond_fwd = slice_max(Axis::X)?;
        s.max_cond_bwd = slice_max(Axis::Y)?;
        Ok(s)
    }

    pub fn verdict(&self, criterion: Criterion) -> Verdict {
        let mut v = Verdict {
            criterion,
            direction: Direction::Undecided,
            h_exo_fwd: self.h_exo_fwd,
            h_exo_bwd: self.h_exo_bwd,
            h_x: self.h_x,
            h_y: self.h_y,
            max_cond_fwd: self.max_cond_fwd.unwrap_or(0.0),
            max_cond_bwd: self.max_cond_bwd.unwrap_or(0.0),
            threshold_used: None,
            diagnostic: None,
        };
        if criterion == Criterion::Conditional
            && (self.max_cond_fwd.is_none() || self.max_cond_bwd.is_none())
        {
            v.diagnostic = Some("no slice with enough samples on at least one side".into());
            return v;
        }
        let (fwd, bwd) = v.scores();
        v.direction = decide(fwd, bwd);
        v
    }
}

fn decide(fwd: f64, bwd: f64) -> Direction {
    if (fwd - bwd).abs() <= TIE_EPS {
        Direction::Undecided
    } else if fwd < bwd {
        Direction::XtoY
    } else {
        Direction::YtoX
    }
}

/// Compares greedy-coupling exogenous entropies in both directions.
pub fn infer_exogenous(j: &Joint) -> Verdict {
    Scores::from_joint(j).verdict(Criterion::Exogenous)
}

/// Compares `H(X) + H(E)` with `H(Y) + H(E~)`.
pub fn infer_total(j: &Joint) -> Verdict {
    Scores::from_joint(j).verdict(Criterion::Total)
}

/// Compares the largest slice entropies; `X -> Y` when `max_y H(X|Y=y)` is the larger.
pub fn infer_conditional(j: &Joint) -> Verdict {
    Scores::from_joint(j).verdict(Criterion::Conditional)
}

/// [`infer_conditional`] on counts, keeping slices with at least `min_slice` samples.
pub fn infer_conditional_counts(
    counts: &CountTable,
    min_slice: u64,
    method: EntropyMethod,
) -> Result<Verdict> {
    if min_slice == 0 {
        return Err(Error::InvalidParameter("min_slice must be at least 1".into()));
    }
    Ok(Scores::from_counts(counts, min_slice, method)?.verdict(Criterion::Conditional))
}

/// `X -> Y` iff `H(X) > H(Y)`.
pub fn infer_observed(j: &Joint) -> Verdict {
    Scores::from_joint(j).verdict(Criterion::Observed)
}

/// Withholds the decision unless one direction's exogenous entropy is at most
/// `t * log2(n_states)` bits.
pub fn thresholded_decision(v: &Verdict, t: f64, n_states: usize) -> Result<Verdict> {
    if !(t >= 0.0) {
        return Err(Error::InvalidParameter(format!("threshold must be non-negative, got {t}")));
    }
    if n_states == 0 {
        return Err(Error::InvalidParameter("n_states must be positive".into()));
    }
    let mut out = v.clone();
    out.threshold_used = Some(t);
    let limit = t * (n_states as f64).log2();
    if v.h_exo_fwd.min(v.h_exo_bwd) > limit {
        out.direction = Direction::Undecided;
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    /// f(1) = f(2) = 1, f(3) = 2 with uniform p(X); no exogenous noise.
    fn many_to_one() -> Joint {
        let t = 1.0 / 3.0;
        Joint::from_rows(&[vec![t, 0.0], vec![t, 0.0], vec![0.0, t]]).unwrap()
    }

    #[test]
    fn exogenous_on_deterministic_map() {
        let v = infer_exogenous(&many_to_one());
        assert_eq!(v.h_exo_fwd, 0.0);
        assert!((v.h_exo_bwd - 1.0).abs() < 1e-12);
        assert_eq!(v.direction, Direction::XtoY);
    }

    #[test]
    fn total_on_deterministic_map() {
        let v = infer_total(&many_to_one());
        assert!((v.h_x - 3f64.log2()).abs() < 1e-12);
        assert!((v.h_y - 0.918296).abs() < 1e-6);
        assert_eq!(v.direction, Direction::XtoY);
        let (f, b) = v.scores();
        assert!((f - 1.584963).abs() < 1e-6 && (b - 1.918296).abs() < 1e-6);
    }

    #[test]
    fn conditional_and_observed_on_deterministic_map() {
        let v = infer_conditional(&many_to_one());
        assert_eq!((v.max_cond_fwd, v.direction), (0.0, Direction::XtoY));
        assert!((v.max_cond_bwd - 1.0).abs() < 1e-12);
        assert_eq!(infer_observed(&many_to_one()).direction, Direction::XtoY);
    }

    #[test]
    fn independent_joint() {
        let px = crate::Dist::new(vec![0.2, 0.3, 0.5]).unwrap();
        let py = crate::Dist::new(vec![0.6, 0.4]).unwrap();
        let j = Joint::independent(&px, &py);
        let v = infer_exogenous(&j);
        assert!((v.h_exo_fwd - py.entropy()).abs() < 1e-12);
        assert!((v.h_exo_bwd - px.entropy()).abs() < 1e-12);
        assert_eq!(infer_total(&j).direction, Direction::Undecided);

        let u = Joint::independent(&crate::Dist::uniform(2), &crate::Dist::uniform(2));
        assert_eq!(infer_conditional(&u).direction, Direction::Undecided);
        assert_eq!(infer_observed(&u).direction, Direction::Undecided);
    }

    #[test]
    fn symmetric_joint_is_undecided() {
        let j = Joint::from_rows(&[
            vec![0.2, 0.05, 0.05],
            vec![0.05, 0.3, 0.1],
            vec![0.05, 0.1, 0.1],
        ])
        .unwrap();
        for c in Criterion::ALL {
            assert_eq!(Scores::from_joint(&j).verdict(c).direction, Direction::Undecided, "{c:?}");
        }
    }

    #[test]
    fn single_cell_joint_is_undecided() {
        let j = Joint::from_rows(&[vec![0.0, 1.0], vec![0.0, 0.0]]).unwrap();
        let v = infer_exogenous(&j);
        assert_eq!((v.h_exo_fwd, v.h_exo_bwd), (0.0, 0.0));
        assert_eq!(v.direction, Direction::Undecided);
    }

    #[test]
    fn observed_rule() {
        // H(X) = 2, H(Y) = 1
        let px = crate::Dist::uniform(4);
        let j = Joint::independent(&px, &crate::Dist::uniform(2));
        assert_eq!(infer_observed(&j).direction, Direction::XtoY);
        assert_eq!(infer_observed(&j.transpose()).direction, Direction::YtoX);
    }

    #[test]
    fn conditional_counts_filter() {
        // Every column holds fewer than 3 samples, so the backward side is empty.
        let counts = CountTable::new(2, 3, vec![1, 2, 0, 1, 0, 2]).unwrap();
        let v = infer_conditional_counts(&counts, 3, EntropyMethod::MillerMadow).unwrap();
        assert_eq!(v.direction, Direction::Undecided);
        assert!(v.diagnostic.is_some());
        assert!(infer_conditional_counts(&counts, 0, EntropyMethod::Plugin).is_err());
    }

    #[test]
    fn thresholds() {
        let n = 16usize;
        let log_n = (n as f64).log2();
        let mut v = infer_exogenous(&many_to_one());
        v.h_exo_fwd = 0.5 * log_n;
        v.h_exo_bwd = 0.9 * log_n;
        let kept = thresholded_decision(&v, 0.7, n).unwrap();
        assert_eq!(kept.direction, v.direction);
        assert_eq!(kept.threshold_used, Some(0.7));

        v.h_exo_fwd = 0.9 * log_n;
        let dropped = thresholded_decision(&v, 0.7, n).unwrap();
        assert_eq!(dropped.direction, Direction::Undecided);
        assert!(thresholded_decision(&v, -0.1, n).is_err());
    }

    #[test]
    fn verdict_json_round_trip() {
        let v = infer_total(&many_to_one());
        let s = serde_json::to_string(&v).unwrap();
        assert!(s.contains("\"direction\":\"XtoY\""));
        let back: Verdict = serde_json::from_str(&s).unwrap();
        assert_eq!(back, v);
    }
}
