use std::path::PathBuf;

use thiserror::Error;

/// Errors raised anywhere in the estimation toolkit.
#[derive(Debug, Error)]
pub enum Error {
    /// An argument lies outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// Mean photon numbers too close together for a stable decoy inversion.
    #[error("ill-conditioned mean photon set: {0}")]
    IllConditioned(String),

    /// Curves handed to an estimator do not share a grid.
    #[error("grid alignment error: {0}")]
    Alignment(String),

    /// Input data is degenerate (for example a zero-variance vacuum record).
    #[error("degenerate input: {0}")]
    Degenerate(String),

    /// A minimizer failed to converge.
    #[error("fit error: {0}")]
    Fit(String),

    #[error("parse error in {path} at line {line}: {msg}")]
    Parse {
        path: PathBuf,
        line: usize,
        msg: String,
    },

    /// File contents are well formed but inconsistent with their metadata.
    #[error("validation error: {0}")]
    Validation(String),

    #[error("I/O error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn parse(path: impl Into<PathBuf>, line: usize, msg: impl Into<String>) -> Self {
        Error::Parse {
            path: path.into(),
            line,
            msg: msg.into(),
        }
    }

    /// True for errors caused by numerics rather than by the caller's input
    /// or the filesystem.
    pub fn is_numeric(&self) -> bool {
        matches!(
            self,
            Error::IllConditioned(_) | Error::Fit(_) | Error::Degenerate(_)
        )
    }

    pub fn is_io(&self) -> bool {
        matches!(self, Error::Io { .. })
    }
}

pub type Result<T> = std::result::Result<T, Error>;
