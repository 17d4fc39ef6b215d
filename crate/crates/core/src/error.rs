use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// Malformed measure specification; `path` is the dotted key path.
    #[error("{path}: {message}")]
    Spec { path: String, message: String },

    #[error("invalid measure: {0}")]
    InvalidMeasure(String),

    #[error("quantile undefined: j = {j} exceeds floor(c*k) = {max} at k = {k}")]
    QuantileUndefined { j: usize, k: usize, max: usize },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("precondition failed: {0}")]
    Precondition(String),

    #[error("quadrature did not converge: error estimate {estimate:e} exceeds tolerance {tol:e}")]
    NotConverged { estimate: f64, tol: f64 },

    /// The inner equation for the volume bound has no root in (0, 1/2).
    #[error("no solution: t/eps + 1/4 = {value} must lie below sqrt(2/5) = {limit}")]
    NoSolution { value: f64, limit: f64 },
}
