use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// Invalid user-facing input: model data, particle numbers, guards.
    #[error("invalid {field}: {reason}")]
    Validation { field: String, reason: String },

    /// Operands built on different Fock bases.
    #[error("basis mismatch: {0}")]
    BasisMismatch(String),

    #[error("dimension mismatch: expected {expected}, got {actual}")]
    Dimension { expected: usize, actual: usize },

    /// A numerical contract that should hold by construction was violated.
    #[error("numerical assertion failed: {0}")]
    Numerical(String),

    #[error("model file: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn validation(field: impl Into<String>, reason: impl Into<String>) -> Self {
        Error::Validation {
            field: field.into(),
            reason: reason.into(),
        }
    }

    /// True for errors caused by bad input rather than internal failure.
    pub fn is_input_error(&self) -> bool {
        matches!(
            self,
            Error::Validation { .. } | Error::Parse(_) | Error::Io(_) | Error::Dimension { .. }
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
