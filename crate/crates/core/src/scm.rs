//! Structural causal models `Y = f(X, E)` over categorical variables.
//!
//! The random function `f` is a balls-and-bins game: every pair `(x, e)` is a
//! ball thrown uniformly into one of the `Y` bins. A confounded variant adds a
//! latent `L` that drives both `X` and the mechanism.

use rand::Rng;
use serde::Serialize;

use crate::dist::{stable_sum, Dist, Joint};
use crate::error::{Error, Result};
use crate::sampling::{sample_dirichlet, sample_entropy_near, sample_low_entropy};

/// The table `M[x][e] = f(x, e)`, stored row-major with 0-based states.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FunctionTable {
    x_states: usize,
    e_states: usize,
    y_states: usize,
    values: Vec<usize>,
}

impl FunctionTable {
    pub fn new(x_states: usize, e_states: usize, y_states: usize, values: Vec<usize>) -> Result<Self> {
        if x_states == 0 || e_states == 0 || y_states == 0 {
            return Err(Error::InvalidParameter("function table dimensions must be positive".into()));
        }
        if values.len() != x_states * e_states {
            return Err(Error::InvalidParameter(format!(
                "function table has {} entries, expected {x_states}x{e_states}",
                values.len()
            )));
        }
        if let Some(v) = values.iter().find(|v| **v >= y_states) {
            return Err(Error::InvalidParameter(format!(
                "function value {v} outside {y_states} output states"
            )));
        }
        Ok(FunctionTable {
            x_states,
            e_states,
            y_states,
            values,
        })
    }

    pub fn x_states(&self) -> usize {
        self.x_states
    }

    pub fn e_states(&self) -> usize {
        self.e_states
    }

    pub fn y_states(&self) -> usize {
        self.y_states
    }

    pub fn get(&self, x: usize, e: usize) -> usize {
        self.values[x * self.e_states + e]
    }

    pub fn values(&self) -> &[usize] {
        &self.values
    }

    pub fn row(&self, x: usize) -> &[usize] {
        &self.values[x * self.e_states..(x + 1) * self.e_states]
    }
}

/// Uniformly random `f: [n] x [m] -> [n]`.
pub fn sample_uniform_function<R: Rng + ?Sized>(n: usize, m: usize, rng: &mut R) -> FunctionTable {
    sample_function(n, m, n, rng)
}

/// Uniformly random `f: [x_states] x [e_states] -> [y_states]`.
pub fn sample_function<R: Rng + ?Sized>(
    x_states: usize,
    e_states: usize,
    y_states: usize,
    rng: &mut R,
) -> FunctionTable {
    assert!(x_states > 0 && e_states > 0 && y_states > 0);
    let values = (0..x_states * e_states)
        .map(|_| rng.random_range(0..y_states))
        .collect();
    FunctionTable {
        x_states,
        e_states,
        y_states,
        values,
    }
}

/// How the cause distribution of a sampled model is drawn.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default, Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum XPrior {
    /// Uniform on the simplex.
    #[default]
    Dirichlet,
    /// The uniform distribution itself.
    Uniform,
}

/// Options of [`Scm::sample_with`].
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct ScmSampling {
    pub x_prior: XPrior,
    /// When set, `H(E)` lies in `[theta - band, theta]` instead of `[0, theta]`.
    pub entropy_band: Option<f64>,
}

const NEAR_ATTEMPTS: usize = 10_000;

/// `Y = f(X, E)` with `X ~ px`, `E ~ pe` independent.
#[derive(Clone, Debug, PartialEq)]
pub struct Scm {
    pub fmap: FunctionTable,
    pub px: Dist,
    pub pe: Dist,
}

impl Scm {
    pub fn new(fmap: FunctionTable, px: Dist, pe: Dist) -> Result<Self> {
        if px.len() != fmap.x_states() || pe.len() != fmap.e_states() {
            return Err(Error::ShapeMismatch(format!(
                "function table is {}x{}, p(X) has {} states and p(E) {}",
                fmap.x_states(),
                fmap.e_states(),
                px.len(),
                pe.len()
            )));
        }
        Ok(Scm { fmap, px, pe })
    }

    /// Samples `px ~ Dirichlet(1)`, `pe` with entropy at most `theta` bits and
    /// a uniform `f`. The exogenous variable gets `x_states * y_states` states.
    pub fn sample<R: Rng + ?Sized>(
        x_states: usize,
        y_states: usize,
        theta: f64,
        rng: &mut R,
    ) -> Result<Self> {
        Scm::sample_with(x_states, y_states, theta, ScmSampling::default(), rng)
    }

    /// [`Scm::sample`] with a choice of prior for `px` and of how close
    /// `H(E)` must come to `theta`.
    pub fn sample_with<R: Rng + ?Sized>(
        x_states: usize,
        y_states: usize,
        theta: f64,
        how: ScmSampling,
        rng: &mut R,
    ) -> Result<Self> {
        let e_states = x_states * y_states;
        let px = match how.x_prior {
            XPrior::Dirichlet => sample_dirichlet(x_states, 1.0, rng)?,
            XPrior::Uniform => Dist::uniform(x_states),
        };
        let pe = match how.entropy_band {
            None => sample_low_entropy(e_states, theta, rng)?,
            Some(band) => sample_entropy_near(e_states, theta, band, NEAR_ATTEMPTS, rng)?,
        };
        let fmap = sample_function(x_states, e_states, y_states, rng);
        Scm::new(fmap, px, pe)
    }
}

/// `p(X = x, Y = y) = p(x) * sum_e 1{f(x, e) = y} p(e)`.
pub fn scm_joint(s: &Scm) -> Joint {
    let n = s.fmap.x_states();
    let m = s.fmap.y_states();
    let mut table = vec![0.0; n * m];
    let pe = s.pe.probs();
    for (x, &px) in s.px.probs().iter().enumerate() {
        if px == 0.0 {
            continue;
        }
        let row = &mut table[x * m..(x + 1) * m];
        for (e, &y) in s.fmap.row(x).iter().enumerate() {
            row[y] += pe[e];
        }
        for cell in row.iter_mut() {
            *cell *= px;
        }
    }
    Joint::from_parts_unchecked(n, m, table)
}

/// How `Y` depends on `(x, l, e)` in a confounded model.
#[derive(Clone, Debug, PartialEq)]
pub enum EffectMechanism {
    /// `Y = f(X, L, E)` with a uniformly random function; every `p(Y | x, l, e)`
    /// is a vertex of the simplex.
    Function(Vec<usize>),
    /// Every `p(Y | x, l, e)` drawn from Dirichlet(1).
    Dirichlet(Vec<Dist>),
}

/// Which [`EffectMechanism`] to sample.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default, Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MechanismKind {
    #[default]
    Function,
    Dirichlet,
}

/// Support sizes of a confounded model.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct ConfoundedDims {
    pub x_states: usize,
    pub y_states: usize,
    pub l_states: usize,
    pub e_states: usize,
}

/// `L -> X`, `(X, L, E) -> Y` with `L` and `E` independent latents.
#[derive(Clone, Debug, PartialEq)]
pub struct ConfoundedScm {
    pub dims: ConfoundedDims,
    pub pl: Dist,
    pub pe: Dist,
    pub px_given_l: Vec<Dist>,
    pub effect: EffectMechanism,
}

impl ConfoundedScm {
    fn slot(&self, x: usize, l: usize, e: usize) -> usize {
        (x * self.dims.l_states + l) * self.dims.e_states + e
    }
}

pub fn sample_confounded<R: Rng + ?Sized>(
    dims: ConfoundedDims,
    theta_e: f64,
    theta_l: f64,
    mechanism: MechanismKind,
    rng: &mut R,
) -> Result<ConfoundedScm> {
    let ConfoundedDims {
        x_states,
        y_states,
        l_states,
        e_states,
    } = dims;
    if x_states == 0 || y_states == 0 || l_states == 0 || e_states == 0 {
        return Err(Error::InvalidParameter("confounded model dimensions must be positive".into()));
    }
    let pl = sample_low_entropy(l_states, theta_l, rng)?;
    let pe = sample_low_entropy(e_states, theta_e, rng)?;
    confounded_from_latents(x_states, y_states, pl, pe, mechanism, rng)
}

/// Like [`sample_confounded`], but latent states of `L` and `E` with mass below
/// `min_mass` are dropped and the rest renormalized before the mechanism is
/// drawn. The joint moves by at most the dropped mass, while the number of
/// mechanism draws falls from `n * |L| * |E|` to `n` times the surviving pairs.
/// The returned model has the reduced latent dimensions.
pub fn sample_confounded_pruned<R: Rng + ?Sized>(
    dims: ConfoundedDims,
    theta_e: f64,
    theta_l: f64,
    mechanism: MechanismKind,
    min_mass: f64,
    rng: &mut R,
) -> Result<ConfoundedScm> {
    if !(0.0..1.0).contains(&min_mass) {
        return Err(Error::InvalidParameter(format!("min_mass must be in [0, 1), got {min_mass}")));
    }
    if dims.x_states == 0 || dims.y_states == 0 || dims.l_states == 0 || dims.e_states == 0 {
        return Err(Error::InvalidParameter("confounded model dimensions must be positive".into()));
    }
    let pl = prune(sample_low_entropy(dims.l_states, theta_l, rng)?, min_mass)?;
    let pe = prune(sample_low_entropy(dims.e_states, theta_e, rng)?, min_mass)?;
    confounded_from_latents(dims.x_states, dims.y_states, pl, pe, mechanism, rng)
}

/// Keeps the states with mass at least `min_mass`, and always the largest.
fn prune(d: Dist, min_mass: f64) -> Result<Dist> {
    let top = d.probs().iter().cloned().fold(0.0, f64::max);
    let kept: Vec<f64> = d.probs().iter().cloned().filter(|p| *p >= min_mass.min(top)).collect();
    Dist::from_weights(kept)
}

fn confounded_from_latents<R: Rng + ?Sized>(
    x_states: usize,
    y_states: usize,
    pl: Dist,
    pe: Dist,
    mechanism: MechanismKind,
    rng: &mut R,
) -> Result<ConfoundedScm> {
    let (l_states, e_states) = (pl.len(), pe.len());
    let dims = ConfoundedDims {
        x_states,
        y_states,
        l_states,
        e_states,
    };
    let px_given_l = (0..l_states)
        .map(|_| sample_dirichlet(x_states, 1.0, rng))
        .collect::<Result<Vec<_>>>()?;
    let slots = x_states * l_states * e_states;
    let effect = match mechanism {
        MechanismKind::Function => {
            EffectMechanism::Function((0..slots).map(|_| rng.random_range(0..y_states)).collect())
        }
        MechanismKind::Dirichlet => EffectMechanism::Dirichlet(
            (0..slots)
                .map(|_| sample_dirichlet(y_states, 1.0, rng))
                .collect::<Result<Vec<_>>>()?,
        ),
    };
    Ok(ConfoundedScm {
        dims,
        pl,
        pe,
        px_given_l,
        effect,
    })
}

/// `p(x, y) = sum_l sum_e p(l) p(e) p(x | l) p(y | x, l, e)`.
pub fn confounded_joint(c: &ConfoundedScm) -> Joint {
    let ConfoundedDims {
        x_states,
        y_states,
        l_states,
        e_states,
    } = c.dims;
    let mut table = vec![0.0; x_states * y_states];
    for l in 0..l_states {
        let wl = c.pl.probs()[l];
        if wl == 0.0 {
            continue;
        }
        for x in 0..x_states {
            let wx = wl * c.px_given_l[l].probs()[x];
            if wx == 0.0 {
                continue;
            }
            let row = &mut table[x * y_states..(x + 1) * y_states];
            for e in 0..e_states {
                let w = wx * c.pe.probs()[e];
                if w == 0.0 {
                    continue;
                }
                let slot = c.slot(x, l, e);
                match &c.effect {
                    EffectMechanism::Function(f) => row[f[slot]] += w,
                    EffectMechanism::Dirichlet(d) => {
                        for (cell, p) in row.iter_mut().zip(d[slot].probs()) {
                            *cell += w * p;
                        }
                    }
                }
            }
        }
    }
    let total = stable_sum(table.iter().copied());
    for cell in &mut table {
        *cell /= total;
    }
    Joint::from_parts_unchecked(x_states, y_states, table)
}

/// The states of a distribution lying within a `sqrt(rho)` factor of `1/n`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct UniformityReport {
    pub rho: f64,
    pub subset: Vec<usize>,
    pub d: f64,
}

pub fn uniformity_check(dist: &Dist, rho: f64) -> Result<UniformityReport> {
    if !(rho >= 1.0) {
        return Err(Error::InvalidParameter(format!("rho must be >= 1, got {rho}")));
    }
    let n = dist.len() as f64;
    let root = rho.sqrt();
    let lo = 1.0 / (root * n);
    let hi = root / n;
    let subset: Vec<usize> = dist
        .probs()
        .iter()
        .enumerate()
        .filter(|(_, p)| (lo..=hi).contains(*p))
        .map(|(i, _)| i)
        .collect();
    let d = subset.len() as f64 / n;
    Ok(UniformityReport { rho, subset, d })
}

/// Support size beyond which the explicit entropy lower bound applies:
/// `max{4, e^((4/d)^(1/r)), 2 e^(q^2 2^(2(c+1)) rho)}`.
pub fn identifiability_threshold(r: f64, q: f64, rho: f64, c: f64, d: f64) -> Result<f64> {
    check_rq(r, q)?;
    if !(rho >= 1.0) {
        return Err(Error::InvalidParameter(format!("rho must be >= 1, got {rho}")));
    }
    if !(d > 0.0) {
        return Err(Error::InvalidParameter(format!("d must be positive, got {d}")));
    }
    if !(c >= 0.0) {
        return Err(Error::InvalidParameter(format!("c must be non-negative, got {c}")));
    }
    let middle = (4.0 / d).powf(1.0 / r).exp();
    let last = 2.0 * (q * q * 2f64.powf(2.0 * (c + 1.0)) * rho).exp();
    Ok(4f64.max(middle).max(last))
}

/// Lower bound, in bits, on the backward exogenous entropy:
/// `(1 - (1+r)/(1+q)) (0.5 log2 log2 n - log2(1+r) - 1 - K(rho, c))`.
///
/// `K(rho, c) = (s ln s/(s-1) - 1 - ln(s ln s/(s-1))) / ln 2` with
/// `s = rho 2^c`; at `s = 1` it takes its limit, 0. The bound is negative
/// (vacuous) for small `n`.
pub fn theoretical_lower_bound(n: usize, r: f64, q: f64, rho: f64, c: f64) -> Result<f64> {
    check_rq(r, q)?;
    if n < 4 {
        return Err(Error::InvalidParameter(format!("bound needs n >= 4, got {n}")));
    }
    if !(rho >= 1.0) || !(c >= 0.0) {
        return Err(Error::InvalidParameter(format!("need rho >= 1 and c >= 0, got {rho}, {c}")));
    }
    let lead = 1.0 - (1.0 + r) / (1.0 + q);
    let inner = 0.5 * (n as f64).log2().log2() - (1.0 + r).log2() - 1.0 - skew_penalty(rho * 2f64.powf(c));
    Ok(lead * inner)
}

fn skew_penalty(s: f64) -> f64 {
    let u = s - 1.0;
    // g = s ln s / (s - 1), g - 1 ~ u/2 near s = 1
    let g_minus_one = if u.abs() < 1e-8 {
        0.5 * u
    } else {
        s * u.ln_1p() / u - 1.0
    };
    (g_minus_one - g_minus_one.ln_1p()) / std::f64::consts::LN_2
}

fn check_rq(r: f64, q: f64) -> Result<()> {
    if !(r > 0.0) || !(r < q) {
        return Err(Error::InvalidParameter(format!("need 0 < r < q, got r={r}, q={q}")));
    }
    Ok(())
}
