use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("coordinate index {index} out of range for dimension {dim}")]
    IndexOutOfRange { index: usize, dim: usize },

    #[error("twist specification invalid: {0}")]
    InvalidTwist(String),

    #[error("tensor rank mismatch: {0}")]
    RankMismatch(String),

    #[error("twist is not compatible with the Poisson structure: {0}")]
    Incompatible(String),

    #[error("mode lattice invalid: {0}")]
    InvalidLattice(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("scenario error: {0}")]
    Scenario(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn check_dim(expected: usize, found: usize) -> Result<()> {
    if expected == found {
        Ok(())
    } else {
        Err(Error::DimensionMismatch { expected, found })
    }
}
