use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },

    #[error("{path}: {source}")]
    Json { path: PathBuf, source: serde_json::Error },

    #[error("{0}")]
    Usage(String),

    #[error(transparent)]
    Core(#[from] advdiv::Error),
}

impl CliError {
    /// 2 for bad input, 3 when a solver gave up.
    pub fn exit_code(&self) -> i32 {
        match self {
            Self::Core(
                advdiv::Error::SolverFailure(_) | advdiv::Error::IterationLimit { .. } | advdiv::Error::InfeasibleStart,
            ) => 3,
            _ => 2,
        }
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;
