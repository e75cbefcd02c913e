use std::path::PathBuf;

use entropic_bench::BenchError;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("cannot read {path}: {source}")]
    Read {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}: {source}")]
    Input {
        path: PathBuf,
        #[source]
        source: entropic_core::Error,
    },
    #[error("cannot write {path}: {source}")]
    Write {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{0}")]
    MissingData(String),
    #[error(transparent)]
    Bench(#[from] BenchError),
    #[error(transparent)]
    Core(#[from] entropic_core::Error),
}

impl CliError {
    /// 2 for anything wrong with the invocation or its inputs, 3 for absent
    /// external data, 1 for failures during a run.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) | CliError::Read { .. } | CliError::Input { .. } => 2,
            CliError::Bench(BenchError::Config(_)) => 2,
            CliError::MissingData(_) => 3,
            _ => 1,
        }
    }
}
