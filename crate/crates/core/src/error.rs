use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid distribution: {0}")]
    InvalidDist(String),
    #[error("invalid joint table: {0}")]
    InvalidJoint(String),
    #[error("invalid coupling: {0}")]
    InvalidCoupling(String),
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("no Dirichlet concentration within {halvings} halvings reached entropy <= {theta} bits")]
    IterationCap { theta: f64, halvings: u32 },
    #[error("noisy marginal {marginal} coordinate {coord} is {gap:e} away from the coupling projection (delta {delta:e})")]
    DeltaExceeded {
        marginal: usize,
        coord: usize,
        gap: f64,
        delta: f64,
    },
    #[error("empty sample set")]
    EmptySamples,
    #[error("parse error: {0}")]
    Parse(String),
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Parse(e.to_string())
    }
}

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        Error::Parse(e.to_string())
    }
}
