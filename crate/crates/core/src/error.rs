//! Error type shared across the crate.

use thiserror::Error;

/// Errors produced by matrix algebra, codecs, and scoring.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {context} (got {got}, expected {expected})")]
    DimensionMismatch {
        context: &'static str,
        got: usize,
        expected: usize,
    },

    #[error("index out of range: {context} (got {got}, limit {limit})")]
    IndexOutOfRange {
        context: &'static str,
        got: usize,
        limit: usize,
    },

    #[error("matrix is not Hermitian within {tol:e} (max deviation {deviation:e})")]
    NonHermitian { deviation: f64, tol: f64 },

    #[error("matrix is not positive semidefinite (min eigenvalue {min_eig:e})")]
    NotPsd { min_eig: f64 },

    #[error("matrix is not unitary within {tol:e} (max deviation {deviation:e})")]
    NonUnitary { deviation: f64, tol: f64 },

    #[error("trace {trace} outside [0, 1] within {tol:e}")]
    TraceOutOfRange { trace: f64, tol: f64 },

    #[error("vector norm {norm} is not 1 within {tol:e}")]
    NotNormalized { norm: f64, tol: f64 },

    #[error("non-canonical encodable object: {0}")]
    NonCanonical(String),

    #[error("decode failed: {0}")]
    Decode(String),

    #[error("prefix violation: code {shorter:?} is a prefix of {longer:?}")]
    PrefixViolation { shorter: String, longer: String },

    #[error("value cannot be encoded: {0}")]
    Unencodable(String),

    #[error("support mismatch: {0}")]
    SupportMismatch(String),

    #[error("POVM invalid: {0}")]
    InvalidPovm(String),

    #[error("registry rejected candidate: {0}")]
    Registry(String),

    #[error("missing product factors on test {0}")]
    MissingFactors(String),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    #[error("serialization error: {0}")]
    Serde(#[from] serde_json::Error),

    #[error("{0}")]
    Other(String),
}

pub type Result<T> = std::result::Result<T, Error>;
