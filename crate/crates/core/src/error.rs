use thiserror::Error;

/// Errors produced by problem construction, solvers and certificate evaluation.
#[derive(Debug, Clone, Error, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: String, actual: String },

    #[error("non-finite value encountered in {context}")]
    NonFinite { context: String },

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("invalid problem: {0}")]
    InvalidProblem(String),

    #[error("no finite saddle point: residual {residual:e}")]
    NoSaddlePoint { residual: f64 },

    #[error("power iteration did not converge after {iterations} iterations (last estimate {estimate})")]
    PowerIteration { iterations: usize, estimate: f64 },

    #[error("singular linear system in {0}")]
    Singular(String),

    #[error("fixed-point iteration did not converge: residual {residual:e} after {iterations} iterations")]
    FixedPoint { iterations: usize, residual: f64 },

    #[error("no bound defined for solver {0}")]
    NoBound(String),

    #[error("{0}")]
    Unsupported(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn dims(expected: impl ToString, actual: impl ToString) -> Self {
        Error::DimensionMismatch {
            expected: expected.to_string(),
            actual: actual.to_string(),
        }
    }

    pub(crate) fn non_finite(context: impl Into<String>) -> Self {
        Error::NonFinite {
            context: context.into(),
        }
    }
}
