use thiserror::Error;

use crate::ore::Algebra;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("generators from incompatible sides in algebra {algebra}: {detail}")]
    MixedAlgebra { algebra: Algebra, detail: String },

    #[error("arity mismatch: {left} vs {right}")]
    ArityMismatch { left: usize, right: usize },

    #[error("variable index {index} out of range 1..={arity}")]
    IndexOutOfRange { index: usize, arity: usize },

    #[error("syntax error at byte {offset}: {message}")]
    Syntax { offset: usize, message: String },

    #[error("truncation overflow: {0}")]
    TruncationOverflow(String),

    #[error("direction {direction} has the wrong tail kind for this operation")]
    KindMismatch { direction: usize },

    #[error("evaluation failed at s = {at}: {reason}")]
    EvaluationFailure { at: String, reason: String },

    #[error("quadrature failed: {0}")]
    QuadratureFailure(String),

    #[error("singular evaluation: {0}")]
    SingularEvaluation(String),

    #[error("test function is not separable in s: {0}")]
    NotSeparable(String),

    #[error("precondition failed: {0}")]
    PreconditionFailed(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
