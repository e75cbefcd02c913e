use std::path::PathBuf;

use entropic_bench::tuebingen::{choose_states, load_pairs, quantize, run_benchmark, BenchmarkConfig, PairRecord};
use entropic_bench::{BenchError, Exec};
use entropic_core::Direction;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn fixture() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fixtures/tuebingen")
}

fn no_rng() -> Option<&'static mut ChaCha8Rng> {
    None
}

#[test]
fn fixture_loads_two_scalar_pairs_and_skips_the_multivariate_one() {
    let loaded = load_pairs(&fixture()).unwrap();
    let ids: Vec<&str> = loaded.pairs.iter().map(|p| p.id.as_str()).collect();
    assert_eq!(ids, ["0001", "0002"]);
    assert_eq!(loaded.pairs[0].truth, Direction::XtoY);
    assert_eq!(loaded.pairs[1].truth, Direction::YtoX);
    assert_eq!(loaded.pairs[0].len(), 300);
    assert_eq!(loaded.skipped.len(), 1);
    assert_eq!(loaded.skipped[0].id, "0003");
    assert_eq!(loaded.skipped[0].reason, "multivariate");
}

#[test]
fn empty_directory_has_no_pairs() {
    let dir = tempfile::tempdir().unwrap();
    let loaded = load_pairs(dir.path()).unwrap();
    assert!(loaded.pairs.is_empty() && loaded.skipped.is_empty());
}

#[test]
fn pair_files_without_metadata_are_an_error() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("pair0001.txt"), "1 2\n3 4\n").unwrap();
    assert!(matches!(load_pairs(dir.path()), Err(BenchError::MissingMetadata(_))));
}

#[test]
fn near_deterministic_fixture_is_decided_correctly() {
    let pairs = load_pairs(&fixture()).unwrap().pairs;
    let cfg = BenchmarkConfig::default();
    let r = run_benchmark(&pairs, &cfg, &Exec::new(1).unwrap()).unwrap();
    assert_eq!(r.pairs.len(), 2);
    for log in &r.pairs {
        assert_eq!(log.n_states, 10);
        assert_eq!(log.votes.len(), 1);
        assert_eq!(log.votes[0].direction, log.truth);
        assert!(log.votes[0].h_exo_fwd.min(log.votes[0].h_exo_bwd) < 1e-9);
    }
    for row in &r.rows {
        assert_eq!((row.decided, row.correct), (2, 2));
        assert_eq!(row.accuracy, Some(1.0));
    }
}

#[test]
fn perturbed_votes_do_not_depend_on_worker_count() {
    let pairs = load_pairs(&fixture()).unwrap().pairs;
    let cfg = BenchmarkConfig {
        votes: 5,
        seed: 11,
        ..BenchmarkConfig::default()
    };
    let a = run_benchmark(&pairs, &cfg, &Exec::new(1).unwrap()).unwrap();
    let b = run_benchmark(&pairs, &cfg, &Exec::new(3).unwrap()).unwrap();
    assert_eq!(a, b);
    assert_eq!(a.to_csv().unwrap(), b.to_csv().unwrap());
    assert!(a.pairs.iter().all(|p| p.votes.len() == 5));
}

fn noisy_pair(id: usize, seed: u64) -> PairRecord {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let x: Vec<f64> = (0..200).map(|_| rng.random_range(0.0..1.0)).collect();
    let y: Vec<f64> = x.iter().map(|v| (v * 7.0).sin() + rng.random_range(-0.3..0.3)).collect();
    PairRecord {
        id: format!("{id:04}"),
        x,
        y,
        truth: Direction::XtoY,
        weight: 1.0,
    }
}

#[test]
fn decided_count_grows_with_the_threshold() {
    let pairs: Vec<PairRecord> = (0..12).map(|i| noisy_pair(i, i as u64)).collect();
    let cfg = BenchmarkConfig {
        thresholds: vec![0.3, 0.5, 0.7, 0.8, 0.9, 1.0, 1.2],
        ..BenchmarkConfig::default()
    };
    let r = run_benchmark(&pairs, &cfg, &Exec::new(1).unwrap()).unwrap();
    let decided: Vec<usize> = r.rows.iter().map(|row| row.decided).collect();
    assert!(decided.windows(2).all(|w| w[0] <= w[1]), "{decided:?}");
    assert_eq!(*decided.last().unwrap(), pairs.len());
}

proptest! {
    #[test]
    fn quantization_is_monotone_and_in_range(
        col in prop::collection::vec(-1e6f64..1e6, 1..200),
        n in 1usize..30,
    ) {
        let q = quantize(&col, n, no_rng()).unwrap();
        prop_assert!(q.iter().all(|s| *s < n));
        for i in 0..col.len() {
            for j in 0..col.len() {
                if col[i] <= col[j] {
                    prop_assert!(q[i] <= q[j]);
                }
            }
        }
    }

    #[test]
    fn quantization_is_affine_invariant(
        col in prop::collection::vec(-1000i32..1000, 2..100),
        n in 1usize..20,
        scale_exp in -4i32..5,
        shift in -1000i32..1000,
    ) {
        // Integer data with power-of-two scales keeps every operation exact.
        let base: Vec<f64> = col.iter().map(|v| *v as f64).collect();
        let moved: Vec<f64> = base.iter().map(|v| v * 2f64.powi(scale_exp) + shift as f64 * 2f64.powi(scale_exp)).collect();
        prop_assert_eq!(quantize(&base, n, no_rng()).unwrap(), quantize(&moved, n, no_rng()).unwrap());
    }

    #[test]
    fn perturbed_quantization_is_monotone(
        col in prop::collection::vec(-10f64..10.0, 1..100),
        n in 1usize..15,
        seed in any::<u64>(),
    ) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let q = quantize(&col, n, Some(&mut rng)).unwrap();
        prop_assert!(q.iter().all(|s| *s < n));
        let mut idx: Vec<usize> = (0..col.len()).collect();
        idx.sort_by(|a, b| col[*a].total_cmp(&col[*b]));
        prop_assert!(idx.windows(2).all(|w| q[w[0]] <= q[w[1]]));
    }

    #[test]
    fn state_count_is_monotone_and_bounded(
        b in 1usize..50, n in 0usize..5000, ux in 1usize..100, uy in 1usize..100,
    ) {
        let s = choose_states(b, n, ux, uy);
        prop_assert!(s >= 1);
        prop_assert!(s <= b && s <= ux && s <= uy && (s <= n / 10 || s == 1));
        prop_assert!(choose_states(b + 1, n, ux, uy) >= s);
        prop_assert!(choose_states(b, n + 10, ux, uy) >= s);
    }
}
