//! Error types shared across the crate.

use std::path::PathBuf;
use thiserror::Error;

/// Crate-wide error type.
///
/// The CLI maps variants onto exit codes: usage/domain problems exit 1,
/// capacity problems exit 2, detected invariant violations exit 3.
#[derive(Debug, Error)]
pub enum Error {
    /// An input exceeds a hard table or memory ceiling.
    #[error("capacity exceeded in {context}: requested {requested}, limit {limit}")]
    Capacity {
        context: &'static str,
        requested: u64,
        limit: u64,
    },

    /// An argument is outside the operation's domain.
    #[error("domain error: {0}")]
    Domain(String),

    /// A root finder or iteration failed to converge.
    #[error("solver error: {0}")]
    Solver(String),

    /// A mathematical identity that must hold was observed to fail.
    /// Reaching this indicates an implementation bug, not bad input.
    #[error("invariant violation: {0}")]
    Invariant(String),

    /// A configuration file or option set could not be interpreted.
    #[error("config error: {0}")]
    Config(String),

    #[error("i/o error at {path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },

    #[error("bad cache file {path}: {reason}")]
    Cache { path: PathBuf, reason: String },
}

impl Error {
    pub fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
