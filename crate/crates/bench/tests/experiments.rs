use entropic_bench::experiments::{
    run_accuracy_sweep, run_backward_entropy_histogram, run_confounding_sweep, run_finite_sample_sweep,
    ConfoundingConfig, FiniteSampleConfig, HistogramConfig, SweepConfig,
};
use entropic_bench::{Exec, Manifest};
use entropic_core::{Criterion, XPrior};

fn small_sweep() -> SweepConfig {
    SweepConfig {
        n: 8,
        m: 6,
        entropy_thresholds: vec![0.5, 1.5],
        trials: 30,
        criteria: Criterion::ALL.to_vec(),
        mixture: true,
        seed: 99,
    }
}

#[test]
fn sweep_csv_is_identical_across_worker_counts() {
    let cfg = small_sweep();
    let one = run_accuracy_sweep(&cfg, &Exec::new(1).unwrap()).unwrap();
    let three = run_accuracy_sweep(&cfg, &Exec::new(3).unwrap()).unwrap();
    assert_eq!(one.to_csv().unwrap(), three.to_csv().unwrap());
    assert_eq!(one.rows.len(), 2 * 4);
}

#[test]
fn different_seeds_give_different_scores() {
    let cfg = small_sweep();
    let other = SweepConfig { seed: 100, ..cfg.clone() };
    let exec = Exec::new(1).unwrap();
    assert_ne!(
        run_accuracy_sweep(&cfg, &exec).unwrap().to_csv().unwrap(),
        run_accuracy_sweep(&other, &exec).unwrap().to_csv().unwrap()
    );
}

#[test]
fn single_trial_single_threshold_gives_one_row_per_criterion() {
    let cfg = SweepConfig {
        entropy_thresholds: vec![2.0],
        trials: 1,
        criteria: vec![Criterion::Exogenous],
        seed: 5,
        ..SweepConfig::default()
    };
    let r = run_accuracy_sweep(&cfg, &Exec::new(1).unwrap()).unwrap();
    assert_eq!(r.rows.len(), 1);
    assert_eq!(r.to_csv().unwrap().lines().count(), 2);
}

#[test]
fn histogram_has_one_row_per_trial() {
    let cfg = HistogramConfig {
        n: 16,
        alpha_frac: 0.2,
        trials: 10,
        seed: 1,
    };
    let rows = run_backward_entropy_histogram(&cfg, &Exec::new(2).unwrap()).unwrap();
    assert_eq!(rows.len(), 10);
    assert!(rows.iter().all(|r| r.h_e <= 0.2 * 4.0 + 1e-12));
}

#[test]
fn plenty_of_samples_recover_the_low_entropy_direction() {
    let cfg = FiniteSampleConfig {
        ns: vec![16],
        sample_counts: vec![1_000_000],
        exo_entropy_bits: 2.0,
        trials: 40,
        x_prior: XPrior::Dirichlet,
        exo_entropy_band: None,
        seed: 3,
        ..FiniteSampleConfig::default()
    };
    let r = run_finite_sample_sweep(&cfg, &Exec::new(1).unwrap()).unwrap();
    let row = r.sweep.row(1e6, Criterion::Exogenous).unwrap();
    assert!(row.accuracy().unwrap() >= 0.95, "{row:?}");
    assert_eq!(r.required.len(), 2);
}

#[test]
fn weak_confounder_matches_the_unconfounded_sweep() {
    let exec = Exec::new(1).unwrap();
    let conf = ConfoundingConfig {
        n: 10,
        m: 10,
        confounder_thresholds: vec![0.05],
        trials: 100,
        criteria: vec![Criterion::Exogenous],
        seed: 8,
        ..ConfoundingConfig::default()
    };
    let plain = SweepConfig {
        n: 10,
        m: 10,
        entropy_thresholds: vec![2.0],
        trials: 100,
        criteria: vec![Criterion::Exogenous],
        mixture: false,
        seed: 8,
    };
    let a = run_confounding_sweep(&conf, &exec).unwrap().rows[0].accuracy().unwrap();
    let b = run_accuracy_sweep(&plain, &exec).unwrap().rows[0].accuracy().unwrap();
    assert!((a - b).abs() <= 0.15, "confounded {a} vs plain {b}");
}

#[test]
fn invalid_configs_are_rejected_before_running() {
    let exec = Exec::new(1).unwrap();
    let bad = SweepConfig { n: 0, ..small_sweep() };
    assert!(run_accuracy_sweep(&bad, &exec).is_err());
    let bad = FiniteSampleConfig {
        sample_counts: vec![10, 5],
        ..FiniteSampleConfig::default()
    };
    assert!(run_finite_sample_sweep(&bad, &exec).is_err());
}

#[test]
fn manifest_round_trips_through_disk() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("manifest.json");
    let mut m = Manifest::new("sweep", 7, 2, serde_json::to_value(small_sweep()).unwrap());
    m.outputs.push("sweep.csv".into());
    m.write(&path).unwrap();
    let back = Manifest::read(&path).unwrap();
    assert_eq!(back, m);
    let cfg: SweepConfig = serde_json::from_value(back.config).unwrap();
    assert_eq!(cfg, small_sweep());
}
