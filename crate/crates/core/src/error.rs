use thiserror::Error;

/// Errors produced anywhere in the crate.
#[derive(Debug, Error)]
pub enum Error {
    #[error("scenario too small: n = {n}, need n >= 2")]
    ScenarioTooSmall { n: usize },

    #[error("index {index} out of range 1..={len}")]
    IndexOutOfRange { index: usize, len: usize },

    #[error("capacity exceeded: {what} = {requested}, limit is {limit}")]
    Capacity {
        what: &'static str,
        requested: usize,
        limit: usize,
    },

    #[error("shape mismatch: {0}")]
    Shape(String),

    #[error("validation failed: {0}")]
    Validation(String),

    #[error("correlator has imaginary part {imag:e}, above tolerance")]
    NumericalConsistency { imag: f64 },

    #[error("unsupported state: {0}")]
    UnsupportedState(String),

    #[error(
        "construction failed for n = {n}: max residual {max_residual:e}, beta {beta} (expected {expected})"
    )]
    ConstructionFailed {
        n: usize,
        max_residual: f64,
        beta: f64,
        expected: f64,
        residuals: Vec<f64>,
    },

    #[error("degenerate certificate: omega vanishes for term {term}")]
    DegenerateCertificate { term: usize },

    #[error("usage: {0}")]
    Usage(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
