use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("division by zero")]
    DivisionByZero,
    #[error("rational function has a pole at n = {0}")]
    Pole(i64),
    #[error("interpolation data is inconsistent with degree bound {0}")]
    InterpolationMismatch(usize),
    #[error("need at least {needed} interpolation points, got {got}")]
    InsufficientPoints { needed: usize, got: usize },
    #[error("{what} = {value} is outside the supported range {range}")]
    OutOfRange {
        what: &'static str,
        value: i64,
        range: &'static str,
    },
    #[error("cost guard refused {what}: estimated {cost} exceeds limit {limit}")]
    GuardExceeded {
        what: &'static str,
        cost: u128,
        limit: u128,
    },
    #[error("degree mismatch: expected {expected}, got {got}")]
    DegreeMismatch { expected: usize, got: usize },
    #[error("size mismatch: expected {expected}, got {got}")]
    SizeMismatch { expected: usize, got: usize },
    #[error("parse error: {0}")]
    Parse(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("word {0} is not in the commutator subgroup")]
    NotInCommutatorSubgroup(String),
    #[error("word {0} is not cyclically reduced")]
    NotCyclicallyReduced(String),
    #[error("structural check failed: {0}")]
    Violation(String),
}

impl Error {
    /// True for refusals caused by size or cost limits rather than bad input.
    pub fn is_guard(&self) -> bool {
        matches!(self, Error::OutOfRange { .. } | Error::GuardExceeded { .. })
    }
}

pub type Result<T> = std::result::Result<T, Error>;
