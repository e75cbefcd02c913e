//! Samplers on the probability simplex.

use rand::Rng;
use rand_distr::{Distribution, Exp1, Gamma};

use crate::dist::Dist;
use crate::error::{Error, Result};

/// Draws from the symmetric Dirichlet(`alpha`) distribution on `n` states.
///
/// `alpha = 1` normalizes unit-rate exponentials, which is the uniform
/// distribution on the simplex. Smaller concentrations are sampled in log
/// space (`ln G(alpha) = ln G(alpha + 1) + ln(U) / alpha`) so that draws with
/// tiny `alpha` do not underflow to an all-zero vector.
pub fn sample_dirichlet<R: Rng + ?Sized>(n: usize, alpha: f64, rng: &mut R) -> Result<Dist> {
    if n == 0 {
        return Err(Error::InvalidParameter("Dirichlet needs n >= 1".into()));
    }
    if !(alpha > 0.0) || !alpha.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "Dirichlet concentration must be positive, got {alpha}"
        )));
    }
    if n == 1 {
        return Ok(Dist::point(1, 0));
    }
    if alpha == 1.0 {
        let draws: Vec<f64> = (0..n).map(|_| Exp1.sample(rng)).collect();
        return Dist::from_weights(draws);
    }
    let logs: Vec<f64> = if alpha >= 1.0 {
        let gamma = Gamma::new(alpha, 1.0).expect("alpha validated above");
        (0..n).map(|_| gamma.sample(rng).ln()).collect()
    } else {
        let gamma = Gamma::new(alpha + 1.0, 1.0).expect("alpha validated above");
        (0..n)
            .map(|_| {
                let u: f64 = 1.0 - rng.random::<f64>();
                gamma.sample(rng).ln() + u.ln() / alpha
            })
            .collect()
    };
    let top = logs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    Dist::from_weights(logs.into_iter().map(|l| (l - top).exp()).collect())
}

/// Tuning for [`sample_low_entropy_with`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LowEntropyOptions {
    /// Draws per concentration step.
    pub batch: usize,
    /// Accepted draws needed before a step succeeds.
    pub required: usize,
    /// Number of times the concentration may be halved.
    pub max_halvings: u32,
}

impl Default for LowEntropyOptions {
    fn default() -> Self {
        LowEntropyOptions {
            batch: 10,
            required: 1,
            max_halvings: 64,
        }
    }
}

/// Draws a distribution on `n` states with entropy at most `theta` bits.
///
/// Starts at Dirichlet(1) and halves the concentration until a batch of ten
/// draws contains an accepted one; returns a uniformly chosen accepted draw.
pub fn sample_low_entropy<R: Rng + ?Sized>(n: usize, theta: f64, rng: &mut R) -> Result<Dist> {
    sample_low_entropy_with(n, theta, LowEntropyOptions::default(), rng)
}

pub fn sample_low_entropy_with<R: Rng + ?Sized>(
    n: usize,
    theta: f64,
    opts: LowEntropyOptions,
    rng: &mut R,
) -> Result<Dist> {
    if !(theta > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "entropy threshold must be positive, got {theta}"
        )));
    }
    if opts.batch == 0 || opts.required == 0 || opts.required > opts.batch {
        return Err(Error::InvalidParameter(format!(
            "need 1 <= required ({}) <= batch ({})",
            opts.required, opts.batch
        )));
    }
    let mut alpha = 1.0f64;
    for _ in 0..=opts.max_halvings {
        let mut accepted: Vec<Dist> = (0..opts.batch)
            .map(|_| sample_dirichlet(n, alpha, rng))
            .collect::<Result<Vec<_>>>()?
            .into_iter()
            .filter(|d| d.entropy() <= theta)
            .collect();
        if accepted.len() >= opts.required {
            let pick = rng.random_range(0..accepted.len());
            return Ok(accepted.swap_remove(pick));
        }
        alpha *= 0.5;
    }
    Err(Error::IterationCap {
        theta,
        halvings: opts.max_halvings,
    })
}

/// Draws from [`sample_low_entropy`] until the entropy also reaches
/// `theta - band`, so it sits just below `theta` rather than anywhere below it.
pub fn sample_entropy_near<R: Rng + ?Sized>(
    n: usize,
    theta: f64,
    band: f64,
    max_attempts: usize,
    rng: &mut R,
) -> Result<Dist> {
    if !(band > 0.0) || max_attempts == 0 {
        return Err(Error::InvalidParameter(format!(
            "need a positive band and attempt count, got {band} and {max_attempts}"
        )));
    }
    if theta > (n as f64).log2() {
        return Err(Error::InvalidParameter(format!(
            "{theta} bits is above the maximum entropy of {n} states"
        )));
    }
    for _ in 0..max_attempts {
        let d = sample_low_entropy(n, theta, rng)?;
        if d.entropy() >= theta - band {
            return Ok(d);
        }
    }
    Err(Error::InvalidParameter(format!(
        "no draw within {band} bits below {theta} in {max_attempts} attempts"
    )))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;

    #[test]
    fn entropy_near_lands_in_band() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let theta = 40f64.log2();
        for _ in 0..20 {
            let h = sample_entropy_near(400, theta, 0.1, 1000, &mut rng).unwrap().entropy();
            assert!(h <= theta && h >= theta - 0.1, "{h}");
        }
    }

    #[test]
    fn entropy_near_rejects_unreachable_targets() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        assert!(sample_entropy_near(4, 3.0, 0.1, 10, &mut rng).is_err());
        assert!(sample_entropy_near(4, 1.0, 0.0, 10, &mut rng).is_err());
    }
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn degenerate_simplex() {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        for alpha in [0.01, 1.0, 7.5] {
            assert_eq!(sample_dirichlet(1, alpha, &mut rng).unwrap().probs(), &[1.0]);
        }
    }

    #[test]
    fn rejects_bad_alpha() {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        assert!(sample_dirichlet(3, 0.0, &mut rng).is_err());
        assert!(sample_dirichlet(3, -1.0, &mut rng).is_err());
        assert!(sample_dirichlet(3, f64::NAN, &mut rng).is_err());
    }

    #[test]
    fn deterministic_under_seed() {
        let a = sample_dirichlet(3, 1.0, &mut ChaCha8Rng::seed_from_u64(42)).unwrap();
        let b = sample_dirichlet(3, 1.0, &mut ChaCha8Rng::seed_from_u64(42)).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn dirichlet_means_match_moments() {
        // Each coordinate of Dirichlet(1) on n states has mean 1/n and
        // variance (n-1)/(n^2 (n+1)).
        let n = 1000;
        let draws = 10_000;
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let mut sums = vec![0.0; n];
        for _ in 0..draws {
            let d = sample_dirichlet(n, 1.0, &mut rng).unwrap();
            for (s, p) in sums.iter_mut().zip(d.probs()) {
                *s += p;
            }
        }
        let nf = n as f64;
        let se = ((nf - 1.0) / (nf * nf * (nf + 1.0)) / draws as f64).sqrt();
        let outside = sums
            .iter()
            .filter(|s| (*s / draws as f64 - 1.0 / nf).abs() > 3.0 * se)
            .count();
        // 3 standard errors leaves ~0.27% of coordinates outside by chance.
        assert!(outside <= 10, "{outside} coordinates beyond 3 SE");
    }

    #[test]
    fn small_alpha_does_not_underflow() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for k in [30, 45, 60] {
            let alpha = 0.5f64.powi(k);
            let d = sample_dirichlet(50, alpha, &mut rng).unwrap();
            assert!(d.entropy() < 1e-3, "alpha 2^-{k}: {}", d.entropy());
        }
    }

    #[test]
    fn theta_at_log_n_accepts_first_batch() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for n in [2usize, 5, 64] {
            let d = sample_low_entropy(n, (n as f64).log2(), &mut rng).unwrap();
            assert_eq!(d.len(), n);
        }
    }

    #[test]
    fn low_entropy_postcondition() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..50 {
            let d = sample_low_entropy(16, 0.5, &mut rng).unwrap();
            assert!(d.entropy() <= 0.5);
        }
    }

    #[test]
    fn iteration_cap_is_reported() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let opts = LowEntropyOptions {
            max_halvings: 2,
            ..Default::default()
        };
        let err = sample_low_entropy_with(1024, 1e-12, opts, &mut rng).unwrap_err();
        assert!(matches!(err, Error::IterationCap { halvings: 2, .. }));
        assert!(sample_low_entropy(4, 0.0, &mut rng).is_err());
    }
}
