use std::path::PathBuf;

use thiserror::Error;

/// Errors produced by the simulator.
///
/// The variants map onto the three categories the command line reports:
/// configuration problems, numerical failures and I/O failures.
#[derive(Debug, Error)]
pub enum Error {
    /// A configuration value is missing, out of range or inconsistent.
    #[error("invalid configuration `{key}`: {reason}")]
    Config { key: String, reason: String },

    /// An argument lies outside the domain of an operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// A numerical routine failed (non-Hermitian input, indefinite matrix, singular system).
    #[error("numerical error: {0}")]
    Numerical(String),

    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub fn config(key: impl Into<String>, reason: impl Into<String>) -> Self {
        Error::Config {
            key: key.into(),
            reason: reason.into(),
        }
    }

    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
