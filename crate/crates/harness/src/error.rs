use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error(transparent)]
    Core(#[from] ris_mec_core::Error),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}: {source}")]
    Json {
        path: PathBuf,
        #[source]
        source: serde_json::Error,
    },

    #[error("csv: {0}")]
    Csv(#[from] csv::Error),

    #[error("{path}: {msg}")]
    ConfigFile { path: PathBuf, msg: String },

    /// Bad user input that is not a core error: wrong file kind, schema
    /// version, mismatched models, …
    #[error("{0}")]
    Invalid(String),
}

impl HarnessError {
    /// Process exit code: 1 for bad input, 2 for solver / numerical failure.
    pub fn exit_code(&self) -> i32 {
        match self {
            Self::Core(e) if !e.is_validation() => 2,
            _ => 1,
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Self::Io {
            path: path.into(),
            source,
        }
    }
}

pub type Result<T> = std::result::Result<T, HarnessError>;
