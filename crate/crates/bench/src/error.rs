use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum BenchError {
    #[error("usage: {0}")]
    Usage(String),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}: {source}")]
    Csv {
        path: PathBuf,
        #[source]
        source: csv::Error,
    },
    #[error("{0}")]
    Dataset(String),
    #[error(transparent)]
    Core(#[from] smuche_core::Error),
    #[error("correctness failure: {0}")]
    Correctness(String),
}

impl BenchError {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        BenchError::Io {
            path: path.into(),
            source,
        }
    }

    /// Process exit status: 1 usage, 2 correctness, 3 I/O.
    pub fn exit_code(&self) -> i32 {
        match self {
            BenchError::Io { .. } | BenchError::Csv { .. } => 3,
            // Undecodable key or ciphertext files.
            BenchError::Core(smuche_core::Error::Format(_)) => 3,
            BenchError::Correctness(_) => 2,
            BenchError::Usage(_) | BenchError::Dataset(_) | BenchError::Core(_) => 1,
        }
    }
}

pub type Result<T> = std::result::Result<T, BenchError>;
