use thiserror::Error;

/// Errors raised by the exact kernel and everything built on it.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("double description capacity exceeded: dimension {dim} is above the cap {cap}")]
    CapacityExceeded { dim: usize, cap: usize },
    #[error("operation undefined on the empty set: {0}")]
    EmptySet(String),
    #[error("improper function: {0}")]
    ImproperFunction(String),
    #[error("undefined extended arithmetic: (+inf) + (-inf)")]
    IndeterminateSum,
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("unknown identity `{0}`")]
    UnknownIdentity(String),
    #[error("generation failed: {0}")]
    Generation(String),
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn check_dim(expected: usize, found: usize) -> Result<()> {
    if expected == found {
        Ok(())
    } else {
        Err(Error::DimensionMismatch { expected, found })
    }
}
