use thiserror::Error;

/// Errors raised by graph construction and the closure algorithms.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    /// A finite sum or product left the range of the scalar type.
    #[error("arithmetic overflow while combining finite bounds")]
    Overflow,

    #[error("variable x{var} out of range for a system over {vars} variables")]
    VariableOutOfRange { var: usize, vars: usize },

    #[error("graphs over {left} and {right} variables cannot be compared")]
    DimensionMismatch { left: usize, right: usize },

    #[error("binary constraint mentions x{0} twice")]
    RepeatedVariable(usize),

    #[error("bound {0} is not representable in the chosen scalar type")]
    UnrepresentableBound(i64),

    /// An invariant that the algorithms guarantee was found broken.
    #[error("internal invariant violated: {0}")]
    Internal(&'static str),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
