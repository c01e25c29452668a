//! Crate-wide error type.

use std::path::PathBuf;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// Bad arguments or configuration, detected before any numerical work.
    #[error("validation error: {0}")]
    Validation(String),

    /// Numerical failure inside an algorithm (divergence, singular system, ...).
    #[error("numerical failure: {0}")]
    Numerical(String),

    /// The chosen chart is near-singular at a point; the caller may re-chart
    /// or drop the point.
    #[error("chart failure: |dQ/dz_{index}| = {grad_norm:.3e} below threshold")]
    Chart { index: usize, grad_norm: f64 },

    #[error("i/o error at {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("parse error in {path}: {msg}")]
    Parse { path: PathBuf, msg: String },
}

impl Error {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub fn parse(path: impl Into<PathBuf>, msg: impl Into<String>) -> Self {
        Error::Parse {
            path: path.into(),
            msg: msg.into(),
        }
    }

    pub fn is_chart_failure(&self) -> bool {
        matches!(self, Error::Chart { .. })
    }
}

pub type Result<T> = std::result::Result<T, Error>;
