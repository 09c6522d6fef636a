//! Crate-wide error type.

use thiserror::Error;

/// Errors produced by the toolkit.
#[derive(Debug, Error)]
pub enum Error {
    /// An argument lies outside the mathematical domain of an operation.
    #[error("domain error: {0}")]
    Domain(String),
    /// Two quantities carry incompatible unit tags.
    #[error("unit mismatch: {0}")]
    UnitMismatch(String),
    /// A required datum (catalog value, fixture field) is absent.
    #[error("missing data: {0}")]
    MissingData(String),
    /// A file or quantity string could not be parsed.
    #[error("parse error: {0}")]
    Parse(String),
    /// A series is too short or sampled too coarsely for the request.
    #[error("insufficient data: {0}")]
    InsufficientData(String),
    /// A numeric procedure failed (non-invertible model, no convergence).
    #[error("numeric failure: {0}")]
    Numeric(String),
    /// A fixture reference does not name a shipped fixture.
    #[error("unknown fixture: {0}")]
    UnknownFixture(String),
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

impl Error {
    fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }
}

pub type Result<T> = std::result::Result<T, Error>;

/// Checks that `value` is strictly positive and finite.
pub(crate) fn ensure_positive(value: f64, name: &str) -> Result<f64> {
    if value.is_finite() && value > 0.0 {
        Ok(value)
    } else {
        Err(Error::domain(format!("{name} must be > 0, got {value}")))
    }
}

/// Checks that `value` is nonnegative and finite.
pub(crate) fn ensure_nonnegative(value: f64, name: &str) -> Result<f64> {
    if value.is_finite() && value >= 0.0 {
        Ok(value)
    } else {
        Err(Error::domain(format!("{name} must be >= 0, got {value}")))
    }
}
