//! Experiment harness for entropic causal inference.
//!
//! [`experiments`] reproduces the synthetic studies (accuracy against
//! exogenous entropy, backward-entropy concentration, finite-sample behaviour
//! and latent confounding). [`tuebingen`] loads the real cause-effect pairs,
//! quantizes them and scores the thresholded exogenous criterion.
//!
//! Every run is driven by one master seed. Trial seeds are derived from the
//! seed and the trial's grid coordinates, and results are reduced in trial
//! order, so outputs do not depend on the number of worker threads.

// `!(x > 0.0)` is used on purpose so NaN falls into the rejection branch.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod exec;
pub mod experiments;
pub mod manifest;
pub mod tuebingen;

pub use error::{BenchError, Result};
pub use exec::{derive_seed, trial_rng, Exec};
pub use manifest::Manifest;
