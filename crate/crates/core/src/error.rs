use std::path::PathBuf;

use thiserror::Error;

/// Errors raised by the numerical pipeline.
#[derive(Debug, Error)]
pub enum Error {
    #[error("point ({x}, {y}) lies outside the closed unit disk")]
    OutsideDisk { x: f64, y: f64 },

    #[error("finite-difference stencil of half-width {h} around ({x}, {y}) leaves the unit disk")]
    StencilOutsideDisk { x: f64, y: f64, h: f64 },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("non-positive {what} = {value} at ({x}, {y})")]
    NonPositive {
        what: &'static str,
        value: f64,
        x: f64,
        y: f64,
    },

    #[error("need at least {needed} samples, got {got}")]
    TooFewSamples { needed: usize, got: usize },

    #[error("length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },

    #[error("ill-conditioned basis: traces {dropped:?} fell below the drop threshold")]
    IllConditioned { dropped: Vec<usize> },

    #[error("singular collocation system")]
    Singular,

    #[error("malformed input: {0}")]
    Malformed(String),

    #[error("I/O error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
