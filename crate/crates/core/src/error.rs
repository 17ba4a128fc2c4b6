use std::path::PathBuf;

use thiserror::Error;

/// Errors raised by the exact kernels, the constructions built on them and
/// the file formats.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch in {op}: {left:?} vs {right:?}")]
    DimensionMismatch {
        op: &'static str,
        left: (usize, usize),
        right: (usize, usize),
    },

    /// An entry left the half-integers (denominator 2) during an exact operation.
    #[error("inexact halving at ({row}, {col}): accumulated value {value} is odd")]
    InexactHalving { row: usize, col: usize, value: i64 },

    #[error("integer overflow in {0}")]
    Overflow(&'static str),

    /// A construction self-check failed; the message names the first failing item.
    #[error("invariant violated: {0}")]
    Invariant(String),

    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("rejection budget exhausted after {0} consecutive rejections")]
    RejectionBudget(u64),

    #[error("I/O error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("malformed bundle {path}: {reason}")]
    Format { path: PathBuf, reason: String },

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
