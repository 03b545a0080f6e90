use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// An argument violates the precondition of the operation it was passed to.
    #[error("invalid parameter: {0}")]
    Parameter(String),

    /// The request cannot be satisfied by the given input (e.g. too few nonzero scores).
    #[error("infeasible request: {0}")]
    Infeasible(String),

    /// A block update was asked for a column whose curvature `||X^(i)||^2 + lambda` is zero.
    #[error("degenerate column: squared norm plus ridge weight is zero")]
    DegenerateColumn,

    /// A quantity needed by the algorithm is undefined for this input.
    #[error("degenerate input: {0}")]
    Degenerate(String),

    /// A dense decomposition failed to converge.
    #[error("decomposition failed: {0}")]
    Decomposition(String),
}

pub(crate) fn param(msg: impl Into<String>) -> Error {
    Error::Parameter(msg.into())
}
