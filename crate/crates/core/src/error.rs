//! Error type shared by every module of the crate.

use std::path::PathBuf;

use thiserror::Error;

/// Coarse classification used by front ends to pick an exit status.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorCategory {
    /// Bad arguments or configuration.
    Usage,
    /// Malformed or inconsistent input data.
    Data,
    /// An iterative method failed or a numerical check was violated.
    Numerical,
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid node id {id} (graph has {node_count} nodes)")]
    InvalidNode { id: usize, node_count: usize },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("empty input: {0}")]
    Empty(String),

    #[error("shape mismatch: {0}")]
    Shape(String),

    #[error("capacity exceeded: {0}")]
    Capacity(String),

    #[error("{method} did not converge after {iterations} iterations (residual {residual:e})")]
    Convergence {
        method: &'static str,
        iterations: usize,
        residual: f64,
    },

    #[error("divergent series: {0}")]
    Divergent(String),

    #[error("integer overflow: {0}")]
    Overflow(String),

    #[error("numerical check failed: {0}")]
    CheckFailed(String),

    #[error("inconsistent data: {0}")]
    Data(String),

    #[error("leakage detected: {0}")]
    Leakage(String),

    #[error("io error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub fn category(&self) -> ErrorCategory {
        match self {
            Error::InvalidParameter(_) => ErrorCategory::Usage,
            Error::Convergence { .. } | Error::Divergent(_) | Error::Overflow(_) | Error::CheckFailed(_) => {
                ErrorCategory::Numerical
            },
            _ => ErrorCategory::Data,
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
