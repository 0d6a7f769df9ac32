use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, SsnmfError>;

#[derive(Debug, Error)]
pub enum SsnmfError {
    #[error("dimension mismatch in {op}: {left:?} vs {right:?}")]
    Dimension {
        op: &'static str,
        left: (usize, usize),
        right: (usize, usize),
    },

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("negative entry {value} at ({row}, {col}) in a nonnegative matrix")]
    Negative { row: usize, col: usize, value: f64 },

    #[error("parse error in {source_name} line {line}: {message}")]
    Parse {
        source_name: String,
        line: usize,
        message: String,
    },

    #[error("I/O error on {}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("fit failed: {0}")]
    Fit(String),

    #[error("ingestion failed: {0}")]
    Ingest(String),

    #[error("evaluation failed: {0}")]
    Eval(String),

    #[error("serialization error: {0}")]
    Json(#[from] serde_json::Error),
}

impl SsnmfError {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        SsnmfError::Io {
            path: path.into(),
            source,
        }
    }

    /// True for failures caused by bad input files or arguments rather than
    /// by the numerics.
    pub fn is_usage(&self) -> bool {
        matches!(
            self,
            SsnmfError::Io { .. }
                | SsnmfError::Parse { .. }
                | SsnmfError::Config(_)
                | SsnmfError::Negative { .. }
                | SsnmfError::Ingest(_)
                | SsnmfError::Json(_)
        )
    }
}
