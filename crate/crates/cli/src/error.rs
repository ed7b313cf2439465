use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("invalid configuration: {0}")]
    Config(String),

    #[error(transparent)]
    Core(#[from] adamir::Error),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },

    #[error("{0} run(s) aborted: {1}")]
    Aborted(usize, String),
}

impl CliError {
    /// Process exit status for this error.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Core(adamir::Error::Parse(_)) => 2,
            CliError::Aborted(..) => 3,
            _ => 1,
        }
    }
}

pub type CliResult<T> = Result<T, CliError>;
