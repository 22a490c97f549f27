//! Crate-wide error type.

use thiserror::Error;

/// Errors produced by fitting, evaluation, and I/O.
#[derive(Debug, Error)]
pub enum Error {
    /// Input data cannot support the requested fit (too few points, constant
    /// column, empty class, ...).
    #[error("degenerate input: {0}")]
    DegenerateInput(String),

    /// An argument lies outside its mathematical domain.
    #[error("domain error: {0}")]
    Domain(String),

    /// Shapes of inputs do not line up.
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    /// A file or payload does not match the expected format.
    #[error("format error: {0}")]
    Format(String),

    /// A numeric procedure failed (NaN loss, non-convergence, ...).
    #[error("numeric failure: {0}")]
    Numeric(String),

    /// Conditional sampling asked for a label the model was not fitted on.
    #[error("unknown label {requested}; known labels: {known:?}")]
    UnknownLabel { requested: u32, known: Vec<u32> },

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
