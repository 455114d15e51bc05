use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum PipelineError {
    #[error("config error: {0}")]
    Config(String),

    /// A stage's input is missing, usually because an earlier stage has not
    /// been run.
    #[error("missing input {path}: run the '{stage}' stage first")]
    MissingInput { path: PathBuf, stage: &'static str },

    #[error("I/O error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Core(#[from] prcs_core::Error),
}

impl PipelineError {
    /// 0 success, 1 validation, 2 numeric (conditioning/fit), 3 I/O.
    pub fn exit_code(&self) -> i32 {
        match self {
            PipelineError::Config(_) => 1,
            PipelineError::MissingInput { .. } | PipelineError::Io { .. } => 3,
            PipelineError::Core(e) if e.is_numeric() => 2,
            PipelineError::Core(e) if e.is_io() => 3,
            PipelineError::Core(_) => 1,
        }
    }
}

pub(crate) fn io_error(path: &std::path::Path, source: std::io::Error) -> PipelineError {
    PipelineError::Io {
        path: path.to_path_buf(),
        source,
    }
}

pub type Result<T> = std::result::Result<T, PipelineError>;
