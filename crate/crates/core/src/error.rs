use thiserror::Error;

use crate::ketparse::ParseError;

/// Errors produced by the library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An argument lies outside the domain of the operation (qubit out of
    /// range, bad permutation, singular operator, ...).
    #[error("domain error: {0}")]
    Domain(String),
    /// The amplitudes do not describe a normalizable state.
    #[error("invalid state: {0}")]
    InvalidState(String),
    #[error(transparent)]
    Parse(#[from] ParseError),
    /// Eigensolver or optimizer failure.
    #[error("numeric failure: {0}")]
    Numeric(String),
    /// The pivot amplitude of a slot-zeroing unitary vanishes.
    #[error("degenerate slot: pivot amplitude below tolerance")]
    DegenerateSlot,
    /// No local unitary drives the font determinant to zero.
    #[error("no solution: {0}")]
    NoSolution(String),
    /// The signature label and the 3-tangle relation disagree.
    #[error("inconsistent classification: {0}")]
    Inconsistent(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Domain(msg.into()))
}
