use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An argument is outside the domain where the operation is defined.
    #[error("domain error: {0}")]
    Domain(String),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    /// A non-finite value appeared while stepping.
    #[error("numerical error at step {step}: {what}")]
    Numerical { step: usize, what: String },

    /// An inner iterative solve did not reach its tolerance.
    #[error("inner solver did not converge at step {step} after {iterations} iterations (residual {residual:e})")]
    Convergence {
        step: usize,
        iterations: usize,
        residual: f64,
    },
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn check_dim(expected: usize, got: usize) -> Result<()> {
    if expected == got {
        Ok(())
    } else {
        Err(Error::DimensionMismatch { expected, got })
    }
}
