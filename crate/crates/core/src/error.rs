use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("invalid probability {0:?}: expected num/den with 0 <= num <= den, den > 0")]
    InvalidProbability(String),

    #[error("invalid partition spec: {0}")]
    InvalidSpec(String),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("scale guard exceeded: {0}")]
    ScaleGuard(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// Reduction modulo the cyclotomic polynomial left a non-constant
    /// remainder where a rational value was expected.
    #[error("non-rational cyclotomic remainder (degree {degree}) for {context}")]
    NonRational { degree: usize, context: String },
}
