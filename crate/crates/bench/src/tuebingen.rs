//! The Tübingen cause-effect pairs.
//!
//! A dataset directory holds `pairNNNN.txt` files (whitespace-separated
//! numeric columns) and `pairmeta.txt`, whose lines read
//! `id cause_first cause_last effect_first effect_last weight` with 1-based
//! column indices. Only pairs with one cause column and one effect column
//! are used; `X` is always the first column of the file.

use std::collections::BTreeSet;
use std::path::{Path, PathBuf};

use entropic_core::{thresholded_decision, CountTable, Criterion, Direction, Scores, Verdict};
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{BenchError, Result};
use crate::exec::{trial_rng, Exec};

pub const METADATA_FILE: &str = "pairmeta.txt";

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PairRecord {
    pub id: String,
    pub x: Vec<f64>,
    pub y: Vec<f64>,
    pub truth: Direction,
    pub weight: f64,
}

impl PairRecord {
    pub fn len(&self) -> usize {
        self.x.len()
    }

    pub fn is_empty(&self) -> bool {
        self.x.is_empty()
    }

    pub fn uniq_x(&self) -> usize {
        distinct(&self.x)
    }

    pub fn uniq_y(&self) -> usize {
        distinct(&self.y)
    }
}

fn distinct(col: &[f64]) -> usize {
    col.iter().map(|v| v.to_bits()).collect::<BTreeSet<_>>().len()
}

/// A pair left out of the benchmark and why.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Skipped {
    pub id: String,
    pub reason: String,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct LoadedPairs {
    pub pairs: Vec<PairRecord>,
    pub skipped: Vec<Skipped>,
}

/// One metadata line: pair id, 1-based cause and effect column ranges, weight.
#[derive(Clone, Debug, PartialEq)]
pub struct PairMeta {
    pub id: String,
    pub cause: (usize, usize),
    pub effect: (usize, usize),
    pub weight: f64,
}

pub fn parse_metadata(text: &str) -> Result<Vec<PairMeta>> {
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let fields: Vec<&str> = line.split_whitespace().collect();
        if fields.is_empty() {
            continue;
        }
        let bad = |reason: String| BenchError::Metadata { line: i + 1, reason };
        if fields.len() != 6 {
            return Err(bad(format!("expected 6 fields, got {}", fields.len())));
        }
        let col = |s: &str| -> Result<usize> {
            s.parse::<usize>()
                .ok()
                .filter(|c| *c >= 1)
                .ok_or_else(|| bad(format!("bad column index {s:?}")))
        };
        let weight: f64 = fields[5].parse().map_err(|_| bad(format!("bad weight {:?}", fields[5])))?;
        out.push(PairMeta {
            id: fields[0].to_string(),
            cause: (col(fields[1])?, col(fields[2])?),
            effect: (col(fields[3])?, col(fields[4])?),
            weight,
        });
    }
    Ok(out)
}

/// Parses whitespace-separated numeric rows with exactly two columns.
pub fn parse_pair_data(text: &str) -> std::result::Result<(Vec<f64>, Vec<f64>), String> {
    let mut x = Vec::new();
    let mut y = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let fields: Vec<&str> = line.split_whitespace().collect();
        if fields.is_empty() {
            continue;
        }
        if fields.len() != 2 {
            return Err(format!("line {}: expected 2 columns, got {}", i + 1, fields.len()));
        }
        let parse = |s: &str| {
            s.parse::<f64>()
                .ok()
                .filter(|v| v.is_finite())
                .ok_or_else(|| format!("line {}: non-numeric token {s:?}", i + 1))
        };
        x.push(parse(fields[0])?);
        y.push(parse(fields[1])?);
    }
    if x.is_empty() {
        return Err("no data rows".into());
    }
    Ok((x, y))
}

/// Loads every scalar pair under `dir`. An empty directory gives no pairs;
/// pair files without a metadata file are an error.
pub fn load_pairs(dir: &Path) -> Result<LoadedPairs> {
    let meta_path = dir.join(METADATA_FILE);
    if !meta_path.exists() {
        let entries = std::fs::read_dir(dir).map_err(|e| BenchError::io(dir, e))?;
        let has_pairs = entries
            .filter_map(|e| e.ok())
            .any(|e| e.file_name().to_string_lossy().starts_with("pair"));
        return if has_pairs {
            Err(BenchError::MissingMetadata(dir.to_path_buf()))
        } else {
            Ok(LoadedPairs::default())
        };
    }
    let meta_text = std::fs::read_to_string(&meta_path).map_err(|e| BenchError::io(&meta_path, e))?;
    let mut loaded = LoadedPairs::default();
    for meta in parse_metadata(&meta_text)? {
        let skip = |reason: String| {
            log::info!("skipping pair {}: {reason}", meta.id);
            Skipped {
                id: meta.id.clone(),
                reason,
            }
        };
        if meta.cause.0 != meta.cause.1 || meta.effect.0 != meta.effect.1 {
            loaded.skipped.push(skip("multivariate".into()));
            continue;
        }
        let truth = match (meta.cause.0, meta.effect.0) {
            (1, 2) => Direction::XtoY,
            (2, 1) => Direction::YtoX,
            (c, e) => {
                loaded.skipped.push(skip(format!("unsupported columns cause={c} effect={e}")));
                continue;
            }
        };
        if !(meta.weight > 0.0) {
            loaded.skipped.push(skip(format!("non-positive weight {}", meta.weight)));
            continue;
        }
        let path: PathBuf = dir.join(format!("pair{}.txt", meta.id));
        let text = match std::fs::read_to_string(&path) {
            Ok(t) => t,
            Err(e) => {
                loaded.skipped.push(skip(format!("{}: {e}", path.display())));
                continue;
            }
        };
        match parse_pair_data(&text) {
            Ok((x, y)) => loaded.pairs.push(PairRecord {
                id: meta.id.clone(),
                x,
                y,
                truth,
                weight: meta.weight,
            }),
            Err(reason) => loaded.skipped.push(skip(reason)),
        }
    }
    Ok(loaded)
}

/// `min(b, floor(N / 10), uniq_x, uniq_y)`, at least 1.
pub fn choose_states(b: usize, n: usize, uniq_x: usize, uniq_y: usize) -> usize {
    b.min(n / 10).min(uniq_x).min(uniq_y).max(1)
}

/// Inner boundaries `a + (b - a) i / n`, each shifted by up to
/// `(b - a) / (8 n)` when `rng` is given.
pub fn boundaries<R: Rng + ?Sized>(lo: f64, hi: f64, n: usize, mut rng: Option<&mut R>) -> Vec<f64> {
    let width = hi - lo;
    let jitter = width / (8 * n) as f64;
    (1..n)
        .map(|i| {
            let b = lo + width * i as f64 / n as f64;
            match rng.as_deref_mut() {
                Some(r) if jitter > 0.0 => b + r.random_range(-jitter..=jitter),
                _ => b,
            }
        })
        .collect()
}

/// Uniform binning of `col` into `n` states (0-based). A value on a boundary
/// goes to the upper bin; a constant column maps to state 0.
pub fn quantize<R: Rng + ?Sized>(col: &[f64], n: usize, rng: Option<&mut R>) -> Result<Vec<usize>> {
    if n == 0 {
        return Err(BenchError::Config("quantization needs n >= 1".into()));
    }
    if col.is_empty() {
        return Err(BenchError::Config("cannot quantize an empty column".into()));
    }
    let lo = col.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = col.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if lo == hi {
        return Ok(vec![0; col.len()]);
    }
    let cuts = boundaries(lo, hi, n, rng);
    Ok(col.iter().map(|v| cuts.partition_point(|c| c <= v)).collect())
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BenchmarkConfig {
    /// Target number of states.
    pub b: usize,
    pub thresholds: Vec<f64>,
    /// 1 for plain uniform bins; otherwise majority over this many perturbed quantizations.
    pub votes: usize,
    pub seed: u64,
}

impl Default for BenchmarkConfig {
    fn default() -> Self {
        BenchmarkConfig {
            b: 10,
            thresholds: vec![0.7, 0.8, 0.9, 1.0, 1.2],
            votes: 1,
            seed: 0,
        }
    }
}

impl BenchmarkConfig {
    pub fn validate(&self) -> Result<()> {
        if self.b == 0 {
            return Err(BenchError::Config("b must be positive".into()));
        }
        if self.thresholds.is_empty() || self.thresholds.iter().any(|t| !(*t > 0.0)) {
            return Err(BenchError::Config("thresholds must be non-empty and positive".into()));
        }
        if self.votes != 1 && self.votes != 5 {
            return Err(BenchError::Config(format!("votes must be 1 or 5, got {}", self.votes)));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PairLog {
    pub id: String,
    pub n_states: usize,
    pub samples: usize,
    pub truth: Direction,
    pub weight: f64,
    /// One unthresholded exogenous verdict per quantization.
    pub votes: Vec<Verdict>,
    /// Majority decision at each threshold, in config order.
    pub decisions: Vec<Direction>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ThresholdRow {
    pub threshold: f64,
    pub decided: usize,
    pub correct: usize,
    pub accuracy: Option<f64>,
    pub weighted_accuracy: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BenchmarkResult {
    pub rows: Vec<ThresholdRow>,
    pub pairs: Vec<PairLog>,
}

impl BenchmarkResult {
    pub fn to_csv(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(["threshold", "pairs_decided", "correct", "accuracy", "weighted_accuracy"])?;
        for r in &self.rows {
            let opt = |v: Option<f64>| v.map(|a| a.to_string()).unwrap_or_default();
            w.write_record([
                r.threshold.to_string(),
                r.decided.to_string(),
                r.correct.to_string(),
                opt(r.accuracy),
                opt(r.weighted_accuracy),
            ])?;
        }
        let bytes = w.into_inner().map_err(|e| BenchError::Config(e.to_string()))?;
        Ok(String::from_utf8(bytes).expect("csv output is UTF-8"))
    }

    pub fn log_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(&self.pairs)?)
    }
}

fn majority(directions: impl Iterator<Item = Direction>) -> Direction {
    let (mut fwd, mut bwd) = (0, 0);
    for d in directions {
        match d {
            Direction::XtoY => fwd += 1,
            Direction::YtoX => bwd += 1,
            Direction::Undecided => {}
        }
    }
    match fwd.cmp(&bwd) {
        std::cmp::Ordering::Greater => Direction::XtoY,
        std::cmp::Ordering::Less => Direction::YtoX,
        std::cmp::Ordering::Equal => Direction::Undecided,
    }
}

fn evaluate_pair(index: usize, pair: &PairRecord, cfg: &BenchmarkConfig) -> Result<PairLog> {
    let n = choose_states(cfg.b, pair.len(), pair.uniq_x(), pair.uniq_y());
    let votes = (0..cfg.votes)
        .map(|v| {
            let mut rng = (cfg.votes > 1).then(|| trial_rng(cfg.seed, &[index as u64, v as u64]));
            let qx = quantize(&pair.x, n, rng.as_mut())?;
            let qy = quantize(&pair.y, n, rng.as_mut())?;
            let mut counts = vec![0u64; n * n];
            for (a, b) in qx.iter().zip(&qy) {
                counts[a * n + b] += 1;
            }
            let joint = CountTable::new(n, n, counts)?.to_joint()?;
            Ok(Scores::from_joint(&joint).verdict(Criterion::Exogenous))
        })
        .collect::<Result<Vec<Verdict>>>()?;
    let decisions = cfg
        .thresholds
        .iter()
        .map(|&t| {
            let thresholded = votes
                .iter()
                .map(|v| thresholded_decision(v, t, n).map(|d| d.direction))
                .collect::<entropic_core::Result<Vec<_>>>()?;
            Ok(majority(thresholded.into_iter()))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(PairLog {
        id: pair.id.clone(),
        n_states: n,
        samples: pair.len(),
        truth: pair.truth,
        weight: pair.weight,
        votes,
        decisions,
    })
}

/// Scores the thresholded exogenous criterion on every pair.
pub fn run_benchmark(pairs: &[PairRecord], cfg: &BenchmarkConfig, exec: &Exec) -> Result<BenchmarkResult> {
    cfg.validate()?;
    let logs = exec.try_map(pairs.len(), |i| evaluate_pair(i, &pairs[i], cfg))?;
    let rows = cfg
        .thresholds
        .iter()
        .enumerate()
        .map(|(k, &threshold)| {
            let decided: Vec<&PairLog> = logs.iter().filter(|l| l.decisions[k] != Direction::Undecided).collect();
            let correct: Vec<&PairLog> = decided.iter().copied().filter(|l| l.decisions[k] == l.truth).collect();
            let total_weight: f64 = decided.iter().map(|l| l.weight).sum();
            let correct_weight: f64 = correct.iter().map(|l| l.weight).sum();
            ThresholdRow {
                threshold,
                decided: decided.len(),
                correct: correct.len(),
                accuracy: (!decided.is_empty()).then(|| correct.len() as f64 / decided.len() as f64),
                weighted_accuracy: (total_weight > 0.0).then(|| correct_weight / total_weight),
            }
        })
        .collect();
    Ok(BenchmarkResult { rows, pairs: logs })
}
