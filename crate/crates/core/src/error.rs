use thiserror::Error;

/// Errors produced by the time-scale toolkit.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// A point or range fell outside the domain an operation is defined on.
    #[error("domain error: {0}")]
    Domain(String),

    /// Two objects that must live on the same time scale do not.
    #[error("time scale mismatch: {0}")]
    ScaleMismatch(String),

    /// A problem statement violates one of its invariants.
    #[error("invalid problem: {0}")]
    InvalidProblem(String),

    /// Malformed time scale or grid function input.
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("syntax error at offset {offset}: {message}")]
    Syntax { offset: usize, message: String },

    #[error("unknown identifier `{name}` at offset {offset}")]
    UnknownIdentifier { name: String, offset: usize },

    /// A Lagrangian or expression produced a non-finite value or left its
    /// evaluation domain.
    #[error("evaluation error in `{expr}`: {reason}")]
    Evaluation { expr: String, reason: String },

    #[error("configuration error: {0}")]
    Config(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn eval(expr: impl Into<String>, reason: impl Into<String>) -> Self {
        Error::Evaluation {
            expr: expr.into(),
            reason: reason.into(),
        }
    }
}
