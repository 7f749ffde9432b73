use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("length mismatch: expected {expected}, got {found}")]
    LengthMismatch { expected: usize, found: usize },

    #[error("non-finite value in {what}")]
    NonFinite { what: &'static str },

    /// The solution left the finite range; `level` is the first bad level.
    #[error("solution became non-finite at level {level}")]
    Unstable { level: usize },

    #[error("quadrature did not reach tolerance {tol:e} (estimate {estimate:e})")]
    QuadratureNonConvergence { tol: f64, estimate: f64 },

    #[error("series did not converge within {terms} terms for z = {z}")]
    SeriesNonConvergence { z: f64, terms: usize },
}

impl Error {
    pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }
}
