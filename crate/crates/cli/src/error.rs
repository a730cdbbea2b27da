use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("usage: {0}")]
    Usage(String),

    #[error(transparent)]
    Data(#[from] confmap::Error),

    #[error("config {path}: {detail}")]
    Config { path: PathBuf, detail: String },

    #[error("I/O error for {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{failed} of {total} batch cases failed")]
    PartialBatch { failed: usize, total: usize },
}

impl CliError {
    /// 0 success, 1 usage error, 2 data error, 3 partial batch failure.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 1,
            CliError::Data(_) | CliError::Config { .. } | CliError::Io { .. } => 2,
            CliError::PartialBatch { .. } => 3,
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        CliError::Io {
            path: path.into(),
            source,
        }
    }
}
