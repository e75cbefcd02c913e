//! Synthetic studies on random structural models.
//!
//! Each run takes a config and an [`Exec`]; trial `k` at grid point `g`
//! draws from `trial_rng(seed, [tag, g, k])`, so the numbers only depend on
//! the config.

use entropic_core::{
    confounded_joint, sample_confounded_pruned, sample_counts, scm_joint, ConfoundedDims, Criterion,
    Direction, EntropyMethod, MechanismKind, Scm, ScmSampling, Scores, XPrior,
};
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{BenchError, Result};
use crate::exec::{trial_rng, Exec};

const TAG_ACCURACY: u64 = 1;
const TAG_HISTOGRAM: u64 = 2;
const TAG_FINITE: u64 = 3;
const TAG_CONFOUND: u64 = 4;

fn default_criteria() -> Vec<Criterion> {
    Criterion::ALL.to_vec()
}

fn check_sorted_non_negative(name: &str, values: &[f64]) -> Result<()> {
    if values.is_empty() {
        return Err(BenchError::Config(format!("{name} must not be empty")));
    }
    if values.iter().any(|v| !(*v >= 0.0) || !v.is_finite()) {
        return Err(BenchError::Config(format!("{name} must be finite and non-negative")));
    }
    if values.windows(2).any(|w| w[0] > w[1]) {
        return Err(BenchError::Config(format!("{name} must be sorted")));
    }
    Ok(())
}

fn check_common(n: usize, m: usize, trials: usize, criteria: &[Criterion]) -> Result<()> {
    if n < 2 || m < 2 {
        return Err(BenchError::Config(format!("need at least 2 states per variable, got {n}x{m}")));
    }
    if trials == 0 {
        return Err(BenchError::Config("trials must be at least 1".into()));
    }
    if criteria.is_empty() {
        return Err(BenchError::Config("no criteria selected".into()));
    }
    Ok(())
}

/// `count` thresholds evenly spaced in `[0, max]`, with the zero replaced by
/// `max / (2 count)` since a zero-entropy sampler target is degenerate.
pub fn threshold_grid(count: usize, max: f64) -> Vec<f64> {
    (0..count)
        .map(|i| {
            if count == 1 {
                max
            } else if i == 0 {
                max / (2 * count) as f64
            } else {
                max * i as f64 / (count - 1) as f64
            }
        })
        .collect()
}

/// Tallies for one grid point and criterion.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub n: usize,
    pub m: usize,
    /// Threshold in bits, sample count or confounder entropy, depending on the run.
    pub param: f64,
    pub criterion: Criterion,
    pub trials: usize,
    pub correct: usize,
    pub wrong: usize,
    pub undecided: usize,
    pub mean_h_exo_fwd: f64,
    pub mean_h_exo_bwd: f64,
}

impl SweepRow {
    /// Correct over decided trials; `None` when nothing was decided.
    pub fn accuracy(&self) -> Option<f64> {
        let decided = self.correct + self.wrong;
        (decided > 0).then(|| self.correct as f64 / decided as f64)
    }

    pub fn correct_frac(&self) -> f64 {
        self.correct as f64 / self.trials as f64
    }

    pub fn error_frac(&self) -> f64 {
        self.wrong as f64 / self.trials as f64
    }

    pub fn undecided_frac(&self) -> f64 {
        self.undecided as f64 / self.trials as f64
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepResult {
    /// Column name of [`SweepRow::param`].
    pub param: String,
    pub rows: Vec<SweepRow>,
}

impl SweepResult {
    pub fn row(&self, param: f64, criterion: Criterion) -> Option<&SweepRow> {
        self.rows.iter().find(|r| r.param == param && r.criterion == criterion)
    }

    pub fn rows_for(&self, criterion: Criterion) -> impl Iterator<Item = &SweepRow> {
        self.rows.iter().filter(move |r| r.criterion == criterion)
    }

    pub fn to_csv(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record([
            "n",
            "m",
            self.param.as_str(),
            "criterion",
            "trials",
            "correct",
            "wrong",
            "undecided",
            "accuracy",
            "correct_frac",
            "error_frac",
            "undecided_frac",
            "mean_h_exo_fwd",
            "mean_h_exo_bwd",
        ])?;
        for r in &self.rows {
            w.write_record([
                r.n.to_string(),
                r.m.to_string(),
                r.param.to_string(),
                r.criterion.as_str().to_string(),
                r.trials.to_string(),
                r.correct.to_string(),
                r.wrong.to_string(),
                r.undecided.to_string(),
                r.accuracy().map(|a| a.to_string()).unwrap_or_default(),
                r.correct_frac().to_string(),
                r.error_frac().to_string(),
                r.undecided_frac().to_string(),
                r.mean_h_exo_fwd.to_string(),
                r.mean_h_exo_bwd.to_string(),
            ])?;
        }
        into_string(w)
    }
}

fn into_string(w: csv::Writer<Vec<u8>>) -> Result<String> {
    let bytes = w.into_inner().map_err(|e| BenchError::Config(e.to_string()))?;
    Ok(String::from_utf8(bytes).expect("csv output is UTF-8"))
}

/// The outcome of one trial: the scores and the generating direction.
struct Trial {
    scores: Scores,
    truth: Direction,
}

/// Reduces trials, in order, into one row per criterion.
fn tally(n: usize, m: usize, param: f64, criteria: &[Criterion], trials: &[Trial]) -> Vec<SweepRow> {
    let count = trials.len() as f64;
    let mean_fwd = trials.iter().map(|t| t.scores.h_exo_fwd).sum::<f64>() / count;
    let mean_bwd = trials.iter().map(|t| t.scores.h_exo_bwd).sum::<f64>() / count;
    criteria
        .iter()
        .map(|&criterion| {
            let mut row = SweepRow {
                n,
                m,
                param,
                criterion,
                trials: trials.len(),
                correct: 0,
                wrong: 0,
                undecided: 0,
                mean_h_exo_fwd: mean_fwd,
                mean_h_exo_bwd: mean_bwd,
            };
            for t in trials {
                match t.scores.verdict(criterion).direction {
                    Direction::Undecided => row.undecided += 1,
                    d if d == t.truth => row.correct += 1,
                    _ => row.wrong += 1,
                }
            }
            row
        })
        .collect()
}

/// Samples `X -> Y` (or `Y -> X` when `reversed`) with `H(E) <= theta` and
/// returns the joint with `X` on the rows.
fn sample_pair_joint<R: Rng>(
    n: usize,
    m: usize,
    theta: f64,
    reversed: bool,
    rng: &mut R,
) -> Result<(entropic_core::Joint, Direction)> {
    if reversed {
        let scm = Scm::sample(m, n, theta, rng)?;
        Ok((scm_joint(&scm).transpose(), Direction::YtoX))
    } else {
        let scm = Scm::sample(n, m, theta, rng)?;
        Ok((scm_joint(&scm), Direction::XtoY))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SweepConfig {
    /// States of `X`.
    pub n: usize,
    /// States of `Y`.
    pub m: usize,
    /// Upper bounds on `H(E)`, in bits.
    pub entropy_thresholds: Vec<f64>,
    pub trials: usize,
    pub criteria: Vec<Criterion>,
    /// Alternate the generating direction between trials.
    pub mixture: bool,
    pub seed: u64,
}

impl Default for SweepConfig {
    fn default() -> Self {
        SweepConfig {
            n: 40,
            m: 40,
            entropy_thresholds: threshold_grid(20, 40f64.log2()),
            trials: 200,
            criteria: default_criteria(),
            mixture: false,
            seed: 0,
        }
    }
}

impl SweepConfig {
    pub fn validate(&self) -> Result<()> {
        check_common(self.n, self.m, self.trials, &self.criteria)?;
        check_sorted_non_negative("entropy_thresholds", &self.entropy_thresholds)?;
        if self.entropy_thresholds.contains(&0.0) {
            return Err(BenchError::Config("entropy thresholds must be positive".into()));
        }
        Ok(())
    }
}

/// Accuracy of each criterion against the exogenous-entropy bound.
///
/// Per threshold and trial: `p(cause) ~ Dirichlet(1)`, `p(E)` on `n m`
/// states with entropy at most the threshold, and a uniform mechanism.
/// In mixture mode odd trials are generated as `Y -> X`.
pub fn run_accuracy_sweep(cfg: &SweepConfig, exec: &Exec) -> Result<SweepResult> {
    cfg.validate()?;
    let mut rows = Vec::new();
    for (g, &theta) in cfg.entropy_thresholds.iter().enumerate() {
        let trials = exec.try_map(cfg.trials, |k| {
            let mut rng = trial_rng(cfg.seed, &[TAG_ACCURACY, g as u64, k as u64]);
            let reversed = cfg.mixture && k % 2 == 1;
            let (joint, truth) = sample_pair_joint(cfg.n, cfg.m, theta, reversed, &mut rng)?;
            Ok(Trial {
                scores: Scores::from_joint(&joint),
                truth,
            })
        })?;
        rows.extend(tally(cfg.n, cfg.m, theta, &cfg.criteria, &trials));
    }
    Ok(SweepResult {
        param: "theta_bits".into(),
        rows,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct HistogramConfig {
    pub n: usize,
    /// `H(E)` is bounded by `alpha_frac * log2(n)`.
    pub alpha_frac: f64,
    pub trials: usize,
    pub seed: u64,
}

impl Default for HistogramConfig {
    fn default() -> Self {
        HistogramConfig {
            n: 64,
            alpha_frac: 0.8,
            trials: 1000,
            seed: 0,
        }
    }
}

impl HistogramConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n < 2 {
            return Err(BenchError::Config(format!("need n >= 2, got {}", self.n)));
        }
        if !(self.alpha_frac > 0.0 && self.alpha_frac < 1.0) {
            return Err(BenchError::Config(format!("alpha_frac must be in (0, 1), got {}", self.alpha_frac)));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HistogramRow {
    pub h_e: f64,
    pub h_exo_fwd: f64,
    pub h_exo_bwd: f64,
}

/// Backward exogenous entropies of `X -> Y` models with `H(E) <= alpha log2 n`.
pub fn run_backward_entropy_histogram(cfg: &HistogramConfig, exec: &Exec) -> Result<Vec<HistogramRow>> {
    cfg.validate()?;
    let theta = cfg.alpha_frac * (cfg.n as f64).log2();
    exec.try_map(cfg.trials, |k| {
        let mut rng = trial_rng(cfg.seed, &[TAG_HISTOGRAM, k as u64]);
        let scm = Scm::sample(cfg.n, cfg.n, theta, &mut rng)?;
        let scores = Scores::from_joint(&scm_joint(&scm));
        Ok(HistogramRow {
            h_e: scm.pe.entropy(),
            h_exo_fwd: scores.h_exo_fwd,
            h_exo_bwd: scores.h_exo_bwd,
        })
    })
}

pub fn histogram_csv(rows: &[HistogramRow]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["trial", "h_e", "h_exo_fwd", "h_exo_bwd"])?;
    for (k, r) in rows.iter().enumerate() {
        w.write_record([
            k.to_string(),
            r.h_e.to_string(),
            r.h_exo_fwd.to_string(),
            r.h_exo_bwd.to_string(),
        ])?;
    }
    into_string(w)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FiniteSampleConfig {
    /// Support sizes, `|X| = |Y| = n`.
    pub ns: Vec<usize>,
    /// Sample counts, ascending.
    pub sample_counts: Vec<u64>,
    /// Upper bound on `H(E)` in bits, shared by every `n`.
    pub exo_entropy_bits: f64,
    pub trials: usize,
    pub criteria: Vec<Criterion>,
    /// Smallest slice admitted by the conditional criterion; `None` means `n`.
    pub min_slice: Option<u64>,
    pub estimator: EntropyMethod,
    /// Prior of the cause distribution.
    pub x_prior: XPrior,
    /// When set, `H(E)` is held within this many bits below the bound.
    pub exo_entropy_band: Option<f64>,
    /// Accuracy that defines the required sample count.
    pub target_accuracy: f64,
    pub seed: u64,
}

impl Default for FiniteSampleConfig {
    fn default() -> Self {
        FiniteSampleConfig {
            ns: vec![20, 50, 80, 110],
            sample_counts: log_grid(1_000, 10_000_000, 4),
            exo_entropy_bits: 40f64.log2(),
            trials: 200,
            criteria: vec![Criterion::Exogenous, Criterion::Conditional],
            min_slice: None,
            estimator: EntropyMethod::MillerMadow,
            x_prior: XPrior::Uniform,
            exo_entropy_band: Some(0.1),
            target_accuracy: 0.95,
            seed: 0,
        }
    }
}

/// Rounded log-spaced integers from `lo` to `hi` with `per_decade` points per decade.
pub fn log_grid(lo: u64, hi: u64, per_decade: u32) -> Vec<u64> {
    let (a, b) = ((lo as f64).log10(), (hi as f64).log10());
    let steps = ((b - a) * per_decade as f64).round() as u32;
    let mut out: Vec<u64> = (0..=steps)
        .map(|i| 10f64.powf(a + i as f64 / per_decade as f64).round() as u64)
        .collect();
    out.dedup();
    out
}

impl FiniteSampleConfig {
    pub fn validate(&self) -> Result<()> {
        if self.ns.is_empty() || self.ns.iter().any(|n| *n < 2) {
            return Err(BenchError::Config("ns must be non-empty with every n >= 2".into()));
        }
        if self.sample_counts.is_empty() || self.sample_counts.contains(&0) {
            return Err(BenchError::Config("sample_counts must be non-empty and positive".into()));
        }
        if self.sample_counts.windows(2).any(|w| w[0] > w[1]) {
            return Err(BenchError::Config("sample_counts must be sorted".into()));
        }
        if !(self.exo_entropy_bits > 0.0) {
            return Err(BenchError::Config("exo_entropy_bits must be positive".into()));
        }
        if self.min_slice == Some(0) {
            return Err(BenchError::Config("min_slice must be at least 1".into()));
        }
        if self.exo_entropy_band.is_some_and(|b| !(b > 0.0)) {
            return Err(BenchError::Config("exo_entropy_band must be positive".into()));
        }
        if self.ns.iter().any(|&n| self.exo_entropy_bits > (n as f64 * n as f64).log2()) {
            return Err(BenchError::Config("exo_entropy_bits exceeds log2(n * n) for some n".into()));
        }
        if !(self.target_accuracy > 0.0 && self.target_accuracy <= 1.0) {
            return Err(BenchError::Config("target_accuracy must be in (0, 1]".into()));
        }
        check_common(2, 2, self.trials, &self.criteria)
    }
}

/// Least sample count whose accuracy reaches the target.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RequiredSamples {
    pub n: usize,
    pub criterion: Criterion,
    pub n_star: Option<u64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FiniteSampleResult {
    pub sweep: SweepResult,
    pub required: Vec<RequiredSamples>,
}

impl FiniteSampleResult {
    pub fn required_csv(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(["n", "criterion", "n_star"])?;
        for r in &self.required {
            w.write_record([
                r.n.to_string(),
                r.criterion.as_str().to_string(),
                r.n_star.map(|v| v.to_string()).unwrap_or_default(),
            ])?;
        }
        into_string(w)
    }
}

/// Accuracy from `N` samples as a function of `n` and `N`.
///
/// Every trial fixes one model and reuses it across the sample-count grid;
/// only the samples are redrawn. The exogenous criterion couples the plug-in
/// conditionals; the conditional criterion only uses slices with at least
/// `min_slice` samples.
pub fn run_finite_sample_sweep(cfg: &FiniteSampleConfig, exec: &Exec) -> Result<FiniteSampleResult> {
    cfg.validate()?;
    let mut rows = Vec::new();
    let mut required = Vec::new();
    for (g, &n) in cfg.ns.iter().enumerate() {
        let min_slice = cfg.min_slice.unwrap_or(n as u64);
        // per_trial[k][s]: trial k at sample count s
        let per_trial: Vec<Vec<Trial>> = exec.try_map(cfg.trials, |k| {
            let path = [TAG_FINITE, g as u64, k as u64];
            let mut rng = trial_rng(cfg.seed, &path);
            let how = ScmSampling {
                x_prior: cfg.x_prior,
                entropy_band: cfg.exo_entropy_band,
            };
            let scm = Scm::sample_with(n, n, cfg.exo_entropy_bits, how, &mut rng)?;
            let joint = scm_joint(&scm);
            cfg.sample_counts
                .iter()
                .map(|&count| {
                    let counts = sample_counts(&joint, count, &mut rng);
                    Ok(Trial {
                        scores: Scores::from_counts(&counts, min_slice, cfg.estimator)?,
                        truth: Direction::XtoY,
                    })
                })
                .collect()
        })?;
        let mut by_count: Vec<Vec<Trial>> = cfg.sample_counts.iter().map(|_| Vec::new()).collect();
        for trial in per_trial {
            for (s, t) in trial.into_iter().enumerate() {
                by_count[s].push(t);
            }
        }
        let start = rows.len();
        for (s, trials) in by_count.iter().enumerate() {
            rows.extend(tally(n, n, cfg.sample_counts[s] as f64, &cfg.criteria, trials));
        }
        for &criterion in &cfg.criteria {
            let n_star = rows[start..]
                .iter()
                .filter(|r| r.criterion == criterion)
                .find(|r| r.correct_frac() >= cfg.target_accuracy)
                .map(|r| r.param as u64);
            required.push(RequiredSamples { n, criterion, n_star });
        }
    }
    Ok(FiniteSampleResult {
        sweep: SweepResult {
            param: "samples".into(),
            rows,
        },
        required,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ConfoundingConfig {
    pub n: usize,
    pub m: usize,
    /// Upper bound on `H(E)` in bits.
    pub exo_entropy_bits: f64,
    /// Upper bounds on `H(L)` in bits.
    pub confounder_thresholds: Vec<f64>,
    /// States of `L`; `None` means `n`.
    pub l_states: Option<usize>,
    pub mechanism: MechanismKind,
    /// Latent states of `L` and `E` below this mass are dropped; 0 keeps all.
    pub min_latent_mass: f64,
    pub trials: usize,
    pub criteria: Vec<Criterion>,
    pub seed: u64,
}

impl Default for ConfoundingConfig {
    fn default() -> Self {
        ConfoundingConfig {
            n: 40,
            m: 40,
            exo_entropy_bits: 2.0,
            confounder_thresholds: vec![0.5, 1.0, 1.5, 2.0, 2.5, 3.0],
            l_states: None,
            mechanism: MechanismKind::Function,
            min_latent_mass: 1e-15,
            trials: 200,
            criteria: default_criteria(),
            seed: 0,
        }
    }
}

impl ConfoundingConfig {
    pub fn validate(&self) -> Result<()> {
        check_common(self.n, self.m, self.trials, &self.criteria)?;
        check_sorted_non_negative("confounder_thresholds", &self.confounder_thresholds)?;
        if !(self.exo_entropy_bits > 0.0) {
            return Err(BenchError::Config("exo_entropy_bits must be positive".into()));
        }
        if self.l_states == Some(0) {
            return Err(BenchError::Config("l_states must be positive".into()));
        }
        if !(0.0..1e-6).contains(&self.min_latent_mass) {
            return Err(BenchError::Config("min_latent_mass must be in [0, 1e-6)".into()));
        }
        Ok(())
    }
}

/// Accuracy of `X -> Y` detection with a latent `L -> X, L -> Y`.
pub fn run_confounding_sweep(cfg: &ConfoundingConfig, exec: &Exec) -> Result<SweepResult> {
    cfg.validate()?;
    let dims = ConfoundedDims {
        x_states: cfg.n,
        y_states: cfg.m,
        l_states: cfg.l_states.unwrap_or(cfg.n),
        e_states: cfg.n * cfg.m,
    };
    let mut rows = Vec::new();
    for (g, &theta_l) in cfg.confounder_thresholds.iter().enumerate() {
        let trials = exec.try_map(cfg.trials, |k| {
            let mut rng = trial_rng(cfg.seed, &[TAG_CONFOUND, g as u64, k as u64]);
            // A zero bound means a constant confounder.
            let model = sample_confounded_pruned(
                dims,
                cfg.exo_entropy_bits,
                theta_l.max(1e-9),
                cfg.mechanism,
                cfg.min_latent_mass,
                &mut rng,
            )?;
            Ok(Trial {
                scores: Scores::from_joint(&confounded_joint(&model)),
                truth: Direction::XtoY,
            })
        })?;
        rows.extend(tally(cfg.n, cfg.m, theta_l, &cfg.criteria, &trials));
    }
    Ok(SweepResult {
        param: "h_l_bits".into(),
        rows,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn exec() -> Exec {
        Exec::new(2).unwrap()
    }

    #[test]
    fn grids() {
        assert_eq!(log_grid(1000, 100_000, 1), vec![1000, 10_000, 100_000]);
        assert_eq!(log_grid(10, 100, 2), vec![10, 32, 100]);
        let g = threshold_grid(5, 4.0);
        assert_eq!(g, vec![0.4, 1.0, 2.0, 3.0, 4.0]);
    }

    #[test]
    fn single_trial_sweep_is_reproducible() {
        let cfg = SweepConfig {
            n: 8,
            m: 8,
            entropy_thresholds: vec![1.0],
            trials: 1,
            criteria: vec![Criterion::Exogenous],
            seed: 5,
            ..SweepConfig::default()
        };
        let a = run_accuracy_sweep(&cfg, &exec()).unwrap();
        assert_eq!(a.rows.len(), 1);
        assert_eq!(a.to_csv().unwrap(), run_accuracy_sweep(&cfg, &Exec::new(1).unwrap()).unwrap().to_csv().unwrap());
    }

    #[test]
    fn fractions_sum_to_one() {
        let cfg = SweepConfig {
            n: 6,
            m: 6,
            entropy_thresholds: vec![0.5, 2.0],
            trials: 20,
            seed: 1,
            ..SweepConfig::default()
        };
        for r in run_accuracy_sweep(&cfg, &exec()).unwrap().rows {
            let total = r.correct_frac() + r.error_frac() + r.undecided_frac();
            assert!((total - 1.0).abs() < 1e-12);
            assert!(r.accuracy().is_none_or(|a| (0.0..=1.0).contains(&a)));
        }
    }

    #[test]
    fn near_deterministic_models_are_identified() {
        let cfg = SweepConfig {
            n: 16,
            m: 16,
            entropy_thresholds: vec![0.05],
            trials: 100,
            criteria: vec![Criterion::Exogenous, Criterion::Total, Criterion::Observed],
            seed: 2,
            ..SweepConfig::default()
        };
        for r in run_accuracy_sweep(&cfg, &exec()).unwrap().rows {
            assert!(r.accuracy().unwrap() >= 0.9, "{:?}", r);
        }
    }

    #[test]
    fn mixture_is_balanced() {
        let cfg = SweepConfig {
            n: 4,
            m: 7,
            entropy_thresholds: vec![0.5],
            trials: 11,
            criteria: vec![Criterion::Exogenous],
            mixture: true,
            seed: 3,
        };
        let truths: Vec<bool> = (0..cfg.trials).map(|k| cfg.mixture && k % 2 == 1).collect();
        assert_eq!(truths.iter().filter(|r| **r).count(), cfg.trials / 2);
        let r = run_accuracy_sweep(&cfg, &exec()).unwrap();
        assert_eq!(r.rows[0].trials, 11);
    }

    #[test]
    fn reversed_models_have_rows_on_x() {
        let mut rng = trial_rng(0, &[]);
        let (j, truth) = sample_pair_joint(3, 5, 1.0, true, &mut rng).unwrap();
        assert_eq!((j.rows(), j.cols(), truth), (3, 5, Direction::YtoX));
    }

    #[test]
    fn configs_are_validated() {
        let bad = SweepConfig {
            entropy_thresholds: vec![2.0, 1.0],
            ..SweepConfig::default()
        };
        assert!(run_accuracy_sweep(&bad, &exec()).is_err());
        let bad = SweepConfig {
            trials: 0,
            ..SweepConfig::default()
        };
        assert!(bad.validate().is_err());
        assert!(HistogramConfig { alpha_frac: 1.0, ..HistogramConfig::default() }.validate().is_err());
        let bad = ConfoundingConfig {
            confounder_thresholds: vec![-1.0],
            ..ConfoundingConfig::default()
        };
        assert!(bad.validate().is_err());
        let bad = FiniteSampleConfig {
            sample_counts: vec![100, 10],
            ..FiniteSampleConfig::default()
        };
        assert!(bad.validate().is_err());
    }

    #[test]
    fn histogram_with_no_trials_is_empty() {
        let cfg = HistogramConfig {
            n: 8,
            trials: 0,
            ..HistogramConfig::default()
        };
        assert!(run_backward_entropy_histogram(&cfg, &exec()).unwrap().is_empty());
    }

    #[test]
    fn histogram_respects_bound() {
        let cfg = HistogramConfig {
            n: 16,
            alpha_frac: 0.5,
            trials: 10,
            seed: 4,
        };
        let rows = run_backward_entropy_histogram(&cfg, &exec()).unwrap();
        assert_eq!(rows.len(), 10);
        assert!(rows.iter().all(|r| r.h_e <= 2.0));
        assert!(histogram_csv(&rows).unwrap().lines().count() == 11);
    }

    #[test]
    fn many_samples_recover_low_entropy_direction() {
        let cfg = FiniteSampleConfig {
            ns: vec![16],
            sample_counts: vec![1_000_000],
            exo_entropy_bits: 2.0,
            trials: 40,
            seed: 6,
            ..FiniteSampleConfig::default()
        };
        let r = run_finite_sample_sweep(&cfg, &exec()).unwrap();
        let row = r.sweep.row(1e6, Criterion::Exogenous).unwrap();
        assert!(row.accuracy().unwrap() >= 0.95, "{row:?}");
        assert_eq!(r.required.len(), 2);
        assert!(r.required_csv().unwrap().starts_with("n,criterion,n_star\n"));
    }

    #[test]
    fn constant_confounder_matches_plain_model() {
        let cfg = ConfoundingConfig {
            n: 10,
            m: 10,
            confounder_thresholds: vec![0.0, 0.05],
            trials: 30,
            criteria: vec![Criterion::Exogenous],
            seed: 7,
            ..ConfoundingConfig::default()
        };
        let r = run_confounding_sweep(&cfg, &exec()).unwrap();
        for row in &r.rows {
            assert!(row.accuracy().unwrap() >= 0.9, "{row:?}");
        }
    }
}
