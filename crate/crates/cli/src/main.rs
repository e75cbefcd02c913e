mod error;

use std::fs::File;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use entropic_bench::experiments::{
    histogram_csv, run_accuracy_sweep, run_backward_entropy_histogram, run_confounding_sweep,
    run_finite_sample_sweep, ConfoundingConfig, FiniteSampleConfig, HistogramConfig, SweepConfig,
};
use entropic_bench::tuebingen::{load_pairs, run_benchmark, BenchmarkConfig};
use entropic_bench::{BenchError, Exec, Manifest};
use entropic_core::io::{coupling_to_json, parse_marginals, read_samples_csv, verdict_to_json};
use entropic_core::{
    greedy_mec, thresholded_decision, CountTable, Criterion, EntropyMethod, MechanismKind, Scores,
    XPrior,
};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::CliError;

const DATA_ENV: &str = "ENTROPIC_TUEBINGEN_DIR";
const DEFAULT_DATA: &str = "data/tuebingen";

#[derive(Parser)]
#[command(name = "entropic", version, about = "Entropic causal inference for pairs of categorical variables")]
struct Cli {
    /// Master seed; every trial derives its own stream from it.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Worker threads. Defaults to the available parallelism.
    #[arg(long, global = true)]
    workers: Option<usize>,
    /// Output directory, created if missing.
    #[arg(long, global = true, default_value = ".")]
    out: PathBuf,
    /// JSON config file, or the manifest.json of an earlier run.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Greedy minimum-entropy coupling of a JSON list of distributions.
    Mec {
        input: PathBuf,
    },
    /// Decide the causal direction from a CSV of 1-based x,y samples.
    Infer(InferArgs),
    /// Accuracy of each criterion against the bound on H(E).
    Sweep(SweepArgs),
    /// Backward exogenous entropy of low-entropy models.
    Histogram(HistogramArgs),
    /// Accuracy against the number of samples.
    Finite(FiniteArgs),
    /// Accuracy under a latent confounder.
    Confound(ConfoundArgs),
    /// Quantized real cause-effect pairs.
    Tuebingen(TuebingenArgs),
}

fn parse_snake<T: DeserializeOwned>(s: &str) -> Result<T, String> {
    serde_json::from_value(Value::String(s.to_string())).map_err(|e| e.to_string())
}

#[derive(Args)]
struct InferArgs {
    input: PathBuf,
    /// exogenous, total, conditional or observed.
    #[arg(long, value_parser = parse_snake::<Criterion>)]
    criterion: Option<Criterion>,
    /// Slices with fewer samples are ignored by the conditional criterion.
    #[arg(long)]
    min_slice: Option<u64>,
    /// Abstain unless the smaller exogenous entropy is at most t * log2(n).
    #[arg(long)]
    threshold: Option<f64>,
    /// plugin or miller_madow.
    #[arg(long, value_parser = parse_snake::<EntropyMethod>)]
    estimator: Option<EntropyMethod>,
    #[arg(long)]
    x_states: Option<usize>,
    #[arg(long)]
    y_states: Option<usize>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
struct InferConfig {
    criterion: Criterion,
    min_slice: u64,
    threshold: Option<f64>,
    estimator: EntropyMethod,
    x_states: Option<usize>,
    y_states: Option<usize>,
}

impl Default for InferConfig {
    fn default() -> Self {
        InferConfig {
            criterion: Criterion::Exogenous,
            min_slice: 1,
            threshold: None,
            estimator: EntropyMethod::Plugin,
            x_states: None,
            y_states: None,
        }
    }
}

#[derive(Args)]
struct SweepArgs {
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    m: Option<usize>,
    /// Comma-separated bounds on H(E), in bits.
    #[arg(long, value_delimiter = ',')]
    thresholds: Option<Vec<f64>>,
    #[arg(long)]
    trials: Option<usize>,
    #[arg(long, value_delimiter = ',', value_parser = parse_snake::<Criterion>)]
    criteria: Option<Vec<Criterion>>,
    /// Alternate the generating direction between trials.
    #[arg(long)]
    mixture: Option<bool>,
}

#[derive(Args)]
struct HistogramArgs {
    #[arg(long)]
    n: Option<usize>,
    /// H(E) is bounded by alpha * log2(n).
    #[arg(long)]
    alpha: Option<f64>,
    #[arg(long)]
    trials: Option<usize>,
}

#[derive(Args)]
struct FiniteArgs {
    #[arg(long, value_delimiter = ',')]
    ns: Option<Vec<usize>>,
    /// Comma-separated sample counts, ascending.
    #[arg(long, value_delimiter = ',')]
    samples: Option<Vec<u64>>,
    /// Bound on H(E), in bits.
    #[arg(long)]
    exo_entropy: Option<f64>,
    #[arg(long)]
    trials: Option<usize>,
    #[arg(long, value_delimiter = ',', value_parser = parse_snake::<Criterion>)]
    criteria: Option<Vec<Criterion>>,
    #[arg(long)]
    min_slice: Option<u64>,
    #[arg(long, value_parser = parse_snake::<EntropyMethod>)]
    estimator: Option<EntropyMethod>,
    #[arg(long)]
    target: Option<f64>,
    /// Prior of p(X): dirichlet or uniform.
    #[arg(long, value_parser = parse_snake::<XPrior>)]
    x_prior: Option<XPrior>,
    /// Hold H(E) within this many bits below the bound.
    #[arg(long)]
    exo_band: Option<f64>,
}

#[derive(Args)]
struct ConfoundArgs {
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    m: Option<usize>,
    #[arg(long)]
    exo_entropy: Option<f64>,
    /// Comma-separated bounds on H(L), in bits.
    #[arg(long, value_delimiter = ',')]
    thresholds: Option<Vec<f64>>,
    #[arg(long)]
    l_states: Option<usize>,
    /// function or dirichlet.
    #[arg(long, value_parser = parse_snake::<MechanismKind>)]
    mechanism: Option<MechanismKind>,
    /// Drop latent states below this mass; 0 keeps all.
    #[arg(long)]
    min_latent_mass: Option<f64>,
    #[arg(long)]
    trials: Option<usize>,
    #[arg(long, value_delimiter = ',', value_parser = parse_snake::<Criterion>)]
    criteria: Option<Vec<Criterion>>,
}

#[derive(Args)]
struct TuebingenArgs {
    /// Directory with pairNNNN.txt files and pairmeta.txt.
    /// Defaults to $ENTROPIC_TUEBINGEN_DIR, then data/tuebingen.
    #[arg(long)]
    data: Option<PathBuf>,
    /// Target number of states per variable.
    #[arg(long)]
    b: Option<usize>,
    #[arg(long, value_delimiter = ',')]
    thresholds: Option<Vec<f64>>,
    /// Majority over this many perturbed quantizations.
    #[arg(long)]
    votes: Option<usize>,
}

fn set<T>(slot: &mut T, flag: Option<T>) {
    if let Some(v) = flag {
        *slot = v;
    }
}

fn read(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|source| CliError::Read {
        path: path.to_path_buf(),
        source,
    })
}

/// Defaults, then the config file, then flags. A manifest is accepted in place
/// of a config file so that a run can be repeated exactly.
fn load_config<T: DeserializeOwned + Default>(cli: &Cli, command: &str) -> Result<T, CliError> {
    let Some(path) = &cli.config else {
        return Ok(T::default());
    };
    let bad = |e: serde_json::Error| CliError::Usage(format!("{}: {e}", path.display()));
    let mut value: Value = serde_json::from_str(&read(path)?).map_err(bad)?;
    if let Some(obj) = value.as_object() {
        if obj.contains_key("command") && obj.contains_key("config") {
            let recorded = obj["command"].as_str().unwrap_or_default();
            if recorded != command {
                return Err(CliError::Usage(format!(
                    "{} is the manifest of `{recorded}`, not `{command}`",
                    path.display()
                )));
            }
            value = obj["config"].clone();
        }
    }
    serde_json::from_value(value).map_err(bad)
}

fn executor(cli: &Cli) -> Result<Exec, CliError> {
    Ok(match cli.workers {
        Some(w) => Exec::new(w)?,
        None => Exec::available()?,
    })
}

/// Files written into the output directory, recorded in the manifest.
struct Outputs {
    dir: PathBuf,
    names: Vec<String>,
    started: Instant,
}

impl Outputs {
    fn create(dir: &Path) -> Result<Self, CliError> {
        std::fs::create_dir_all(dir).map_err(|source| CliError::Write {
            path: dir.to_path_buf(),
            source,
        })?;
        Ok(Outputs {
            dir: dir.to_path_buf(),
            names: Vec::new(),
            started: Instant::now(),
        })
    }

    fn write(&mut self, name: &str, contents: &str) -> Result<(), CliError> {
        let path = self.dir.join(name);
        std::fs::write(&path, contents).map_err(|source| CliError::Write { path: path.clone(), source })?;
        log::info!("wrote {}", path.display());
        self.names.push(name.to_string());
        Ok(())
    }

    fn finish<C: Serialize>(self, command: &str, seed: u64, workers: usize, config: &C) -> Result<(), CliError> {
        let mut m = Manifest::new(command, seed, workers, serde_json::to_value(config).map_err(BenchError::from)?);
        m.wall_time_secs = self.started.elapsed().as_secs_f64();
        m.outputs = self.names;
        m.write(&self.dir.join("manifest.json"))?;
        Ok(())
    }
}

fn cmd_mec(cli: &Cli, input: &Path) -> Result<(), CliError> {
    if cli.config.is_some() {
        return Err(CliError::Usage("mec takes no config file".into()));
    }
    let input_err = |source| CliError::Input {
        path: input.to_path_buf(),
        source,
    };
    let marginals = parse_marginals(&read(input)?).map_err(input_err)?;
    let coupling = greedy_mec(&marginals).map_err(input_err)?;
    let mut out = Outputs::create(&cli.out)?;
    out.write("coupling.json", &(coupling_to_json(&coupling) + "\n"))?;
    println!("entropy {:.6}", coupling.entropy());
    out.finish("mec", cli.seed.unwrap_or(0), 1, &serde_json::json!({ "input": input }))
}

fn cmd_infer(cli: &Cli, args: &InferArgs) -> Result<(), CliError> {
    let mut cfg: InferConfig = load_config(cli, "infer")?;
    set(&mut cfg.criterion, args.criterion);
    set(&mut cfg.min_slice, args.min_slice);
    set(&mut cfg.estimator, args.estimator);
    if args.threshold.is_some() {
        cfg.threshold = args.threshold;
    }
    if args.x_states.is_some() {
        cfg.x_states = args.x_states;
    }
    if args.y_states.is_some() {
        cfg.y_states = args.y_states;
    }
    if cfg.min_slice == 0 {
        return Err(CliError::Usage("min_slice must be at least 1".into()));
    }
    if cfg.threshold.is_some_and(|t| t.is_nan() || t < 0.0) {
        return Err(CliError::Usage("threshold must be non-negative".into()));
    }
    let file = File::open(&args.input).map_err(|source| CliError::Read {
        path: args.input.clone(),
        source,
    })?;
    let samples = read_samples_csv(file, cfg.x_states, cfg.y_states).map_err(|source| CliError::Input {
        path: args.input.clone(),
        source,
    })?;
    let counts = CountTable::from_samples(&samples);
    let mut verdict = Scores::from_counts(&counts, cfg.min_slice, cfg.estimator)?.verdict(cfg.criterion);
    if let Some(t) = cfg.threshold {
        verdict = thresholded_decision(&verdict, t, counts.rows().max(counts.cols()))?;
    }
    let json = verdict_to_json(&verdict);
    let mut out = Outputs::create(&cli.out)?;
    println!("{json}");
    out.write("verdict.json", &(json + "\n"))?;
    out.finish("infer", cli.seed.unwrap_or(0), 1, &cfg)
}

fn cmd_sweep(cli: &Cli, args: &SweepArgs) -> Result<(), CliError> {
    let mut cfg: SweepConfig = load_config(cli, "sweep")?;
    set(&mut cfg.n, args.n);
    set(&mut cfg.m, args.m);
    set(&mut cfg.entropy_thresholds, args.thresholds.clone());
    set(&mut cfg.trials, args.trials);
    set(&mut cfg.criteria, args.criteria.clone());
    set(&mut cfg.mixture, args.mixture);
    set(&mut cfg.seed, cli.seed);
    cfg.validate()?;
    let exec = executor(cli)?;
    let mut out = Outputs::create(&cli.out)?;
    let result = run_accuracy_sweep(&cfg, &exec)?;
    out.write("sweep.csv", &result.to_csv()?)?;
    out.finish("sweep", cfg.seed, exec.workers(), &cfg)
}

fn cmd_histogram(cli: &Cli, args: &HistogramArgs) -> Result<(), CliError> {
    let mut cfg: HistogramConfig = load_config(cli, "histogram")?;
    set(&mut cfg.n, args.n);
    set(&mut cfg.alpha_frac, args.alpha);
    set(&mut cfg.trials, args.trials);
    set(&mut cfg.seed, cli.seed);
    cfg.validate()?;
    let exec = executor(cli)?;
    let mut out = Outputs::create(&cli.out)?;
    let rows = run_backward_entropy_histogram(&cfg, &exec)?;
    out.write("histogram.csv", &histogram_csv(&rows)?)?;
    out.finish("histogram", cfg.seed, exec.workers(), &cfg)
}

fn cmd_finite(cli: &Cli, args: &FiniteArgs) -> Result<(), CliError> {
    let mut cfg: FiniteSampleConfig = load_config(cli, "finite")?;
    set(&mut cfg.ns, args.ns.clone());
    set(&mut cfg.sample_counts, args.samples.clone());
    set(&mut cfg.exo_entropy_bits, args.exo_entropy);
    set(&mut cfg.trials, args.trials);
    set(&mut cfg.criteria, args.criteria.clone());
    set(&mut cfg.estimator, args.estimator);
    set(&mut cfg.target_accuracy, args.target);
    set(&mut cfg.x_prior, args.x_prior);
    if args.exo_band.is_some() {
        cfg.exo_entropy_band = args.exo_band;
    }
    if args.min_slice.is_some() {
        cfg.min_slice = args.min_slice;
    }
    set(&mut cfg.seed, cli.seed);
    cfg.validate()?;
    let exec = executor(cli)?;
    let mut out = Outputs::create(&cli.out)?;
    let result = run_finite_sample_sweep(&cfg, &exec)?;
    out.write("finite.csv", &result.sweep.to_csv()?)?;
    out.write("finite_required.csv", &result.required_csv()?)?;
    out.finish("finite", cfg.seed, exec.workers(), &cfg)
}

fn cmd_confound(cli: &Cli, args: &ConfoundArgs) -> Result<(), CliError> {
    let mut cfg: ConfoundingConfig = load_config(cli, "confound")?;
    set(&mut cfg.n, args.n);
    set(&mut cfg.m, args.m);
    set(&mut cfg.exo_entropy_bits, args.exo_entropy);
    set(&mut cfg.confounder_thresholds, args.thresholds.clone());
    set(&mut cfg.mechanism, args.mechanism);
    set(&mut cfg.min_latent_mass, args.min_latent_mass);
    set(&mut cfg.trials, args.trials);
    set(&mut cfg.criteria, args.criteria.clone());
    if args.l_states.is_some() {
        cfg.l_states = args.l_states;
    }
    set(&mut cfg.seed, cli.seed);
    cfg.validate()?;
    let exec = executor(cli)?;
    let mut out = Outputs::create(&cli.out)?;
    let result = run_confounding_sweep(&cfg, &exec)?;
    out.write("confounding.csv", &result.to_csv()?)?;
    out.finish("confound", cfg.seed, exec.workers(), &cfg)
}

fn cmd_tuebingen(cli: &Cli, args: &TuebingenArgs) -> Result<(), CliError> {
    let mut cfg: BenchmarkConfig = load_config(cli, "tuebingen")?;
    set(&mut cfg.b, args.b);
    set(&mut cfg.thresholds, args.thresholds.clone());
    set(&mut cfg.votes, args.votes);
    set(&mut cfg.seed, cli.seed);
    cfg.validate()?;
    let dir = args
        .data
        .clone()
        .or_else(|| std::env::var_os(DATA_ENV).map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from(DEFAULT_DATA));
    let missing = |why: String| {
        CliError::MissingData(format!(
            "{why}; fetch the pairs with scripts/fetch_tuebingen.sh, then pass --data or set {DATA_ENV}"
        ))
    };
    if !dir.is_dir() {
        return Err(missing(format!("dataset directory {} not found", dir.display())));
    }
    let loaded = match load_pairs(&dir) {
        Ok(l) => l,
        Err(e @ BenchError::MissingMetadata(_)) => return Err(missing(e.to_string())),
        Err(e) => return Err(e.into()),
    };
    for s in &loaded.skipped {
        log::warn!("skipping pair {}: {}", s.id, s.reason);
    }
    if loaded.pairs.is_empty() {
        return Err(missing(format!("no usable pairs in {}", dir.display())));
    }
    let exec = executor(cli)?;
    let mut out = Outputs::create(&cli.out)?;
    let result = run_benchmark(&loaded.pairs, &cfg, &exec)?;
    out.write("tuebingen.csv", &result.to_csv()?)?;
    out.write("tuebingen_pairs.json", &(result.log_json()? + "\n"))?;
    out.finish("tuebingen", cfg.seed, exec.workers(), &cfg)
}

fn run(cli: &Cli) -> Result<(), CliError> {
    match &cli.command {
        Command::Mec { input } => cmd_mec(cli, input),
        Command::Infer(a) => cmd_infer(cli, a),
        Command::Sweep(a) => cmd_sweep(cli, a),
        Command::Histogram(a) => cmd_histogram(cli, a),
        Command::Finite(a) => cmd_finite(cli, a),
        Command::Confound(a) => cmd_confound(cli, a),
        Command::Tuebingen(a) => cmd_tuebingen(cli, a),
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
