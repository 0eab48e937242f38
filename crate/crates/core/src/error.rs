use thiserror::Error;

/// Errors raised by the dense kernels, the inversion strategies and the
/// problem generators.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum LinalgError {
    #[error("dimension mismatch in {op}: expected {expected}, found {found}")]
    DimensionMismatch {
        op: &'static str,
        expected: String,
        found: String,
    },

    #[error("singular matrix: {context}")]
    SingularMatrix { context: String },

    #[error("no convergence after {iterations} iterations (last off-diagonal measure {measure:e})")]
    NonConvergence { iterations: usize, measure: f64 },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

impl LinalgError {
    pub(crate) fn dims(op: &'static str, expected: impl ToString, found: impl ToString) -> Self {
        LinalgError::DimensionMismatch {
            op,
            expected: expected.to_string(),
            found: found.to_string(),
        }
    }

    pub(crate) fn singular(context: impl Into<String>) -> Self {
        LinalgError::SingularMatrix {
            context: context.into(),
        }
    }
}

pub type Result<T, E = LinalgError> = std::result::Result<T, E>;
