use thiserror::Error;

/// Errors raised by the library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("input must be nonzero")]
    Zero,
    #[error("{0} is not squarefree")]
    NotSquarefree(i64),
    #[error("{0} does not define a quadratic field")]
    Degenerate(i64),
    #[error("{0} is not a fundamental discriminant")]
    NotFundamental(i64),
    #[error("the principal character has no finite L(1)")]
    Principal,
    #[error("integer overflow: {0} is out of desk scale")]
    Overflow(&'static str),
    #[error("class number rounding residue {residue} for discriminant {disc}")]
    Precision { disc: i64, residue: f64 },
    #[error("generator is a square in the base field")]
    SquareGenerator,
    #[error("no convergence after {iterations} doublings: last iterates {last:?}")]
    NoConvergence { iterations: u32, last: (f64, f64) },
    #[error("invalid parameter: {0}")]
    Parameter(String),
    #[error("inconsistent invariants: {0}")]
    Inconsistent(String),
    #[error("i/o: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
