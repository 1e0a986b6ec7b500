//! Crate-wide error type.

use thiserror::Error;

/// Errors produced by distribution, quadrature, fitting, and ingestion code.
#[derive(Error, Debug)]
pub enum SkewError {
    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("matrix is not symmetric within tolerance")]
    NotSymmetric,

    #[error("matrix is not positive definite")]
    NotPositiveDefinite,

    #[error("dimension {dim} unsupported (maximum {max})")]
    UnsupportedDimension { dim: usize, max: usize },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("moment undefined: {0}")]
    UndefinedMoment(String),

    #[error("optimizer failed to converge: {0}")]
    NonConvergence(String),

    #[error("column {0:?} missing from input")]
    MissingColumn(String),

    #[error("unparseable numeric value in column {column:?}, rows {rows:?}")]
    BadNumeric { column: String, rows: Vec<usize> },

    #[error("label vectors have different lengths ({0} vs {1})")]
    LengthMismatch(usize, usize),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, SkewError>;
