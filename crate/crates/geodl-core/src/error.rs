use thiserror::Error;

/// Errors produced by subspace construction, loss evaluation, and the
/// incremental-learning simulator.
#[derive(Debug, Clone, Error)]
pub enum Error {
    /// The input matrix spans nothing (zero matrix, or rank collapsed to 0).
    #[error("degenerate span: {0}")]
    DegenerateSpan(String),

    /// Matrix or vector dimensions are incompatible.
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    /// An argument is outside its admissible range.
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// A value that must be finite is NaN or infinite.
    #[error("non-finite input: {0}")]
    NonFinite(String),

    /// Training produced a non-finite loss.
    #[error("non-finite loss at step {step}")]
    NonFiniteLoss { step: usize },

    /// A label refers to a class the model has no prototype for.
    #[error("unknown class label {0}")]
    UnknownLabel(usize),
}

pub type Result<T> = std::result::Result<T, Error>;
