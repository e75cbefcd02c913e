//! Entropic causal inference for pairs of categorical variables.
//!
//! The crate is organised bottom-up:
//!
//! - [`dist`]: categorical distributions, joint tables and entropy functionals.
//! - [`sampling`]: simplex samplers, including the adaptive low-entropy sampler.
//! - [`coupling`]: greedy minimum-entropy coupling, an exact vertex-enumeration
//!   oracle for small two-marginal instances, and the noisy-marginal transfer
//!   construction.
//! - [`scm`]: balls-and-bins structural models, confounded variants and the
//!   closed-form identifiability threshold and lower bound.
//! - [`estimation`]: i.i.d. sampling from joints, plug-in estimators and
//!   entropy estimation from counts.
//! - [`inference`]: the four direction criteria and the thresholded decision.
//! - [`io`]: JSON and CSV codecs for the types above.
//!
//! All entropies are in bits.

// `!(x > 0.0)` is used on purpose so NaN falls into the rejection branch.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod coupling;
pub mod dist;
pub mod error;
pub mod estimation;
pub mod inference;
pub mod io;
pub mod sampling;
pub mod scm;

pub use coupling::{
    brute_force_mec_small, coupling_entropy, greedy_mec, greedy_mec_entropy, transfer_coupling,
    validate_coupling, Cell, Coupling, ValidationReport,
};
pub use dist::{
    conditional_profile, entropy, entropy_of_masses, extended_entropy, Axis, CondFamily, Dist,
    Joint, SubDist,
};
pub use error::{Error, Result};
pub use estimation::{
    conditional_linf_error, draw_samples, entropy_estimate, plugin_joint, sample_counts,
    CountTable, EntropyMethod, SampleSet,
};
pub use inference::{
    infer_conditional, infer_conditional_counts, infer_exogenous, infer_observed, infer_total,
    thresholded_decision, Criterion, Direction, Scores, Verdict,
};
pub use sampling::{sample_dirichlet, sample_entropy_near, sample_low_entropy, sample_low_entropy_with, LowEntropyOptions};
pub use scm::{
    confounded_joint, identifiability_threshold, sample_confounded, sample_confounded_pruned, sample_function,
    sample_uniform_function, scm_joint, theoretical_lower_bound, uniformity_check, ConfoundedDims,
    ConfoundedScm, EffectMechanism, FunctionTable, MechanismKind, Scm, ScmSampling, UniformityReport, XPrior,
};

/// Absolute tolerance used for every sum-to-one check.
pub const SUM_TOL: f64 = 1e-9;
