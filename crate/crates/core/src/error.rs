use thiserror::Error;

pub type Result<T, E = EscError> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EscError {
    #[error("parse error at position {position}: {message}")]
    Parse { position: usize, message: String },

    #[error("{what} exceeds the enumeration budget: needs {required}, limit is {limit}")]
    BudgetExceeded {
        what: &'static str,
        limit: u64,
        required: u64,
    },

    #[error("{value} is not a unit modulo {modulus}")]
    NotCoprime { value: i64, modulus: u64 },

    #[error("{0} is not an odd prime")]
    NotOddPrime(u64),

    #[error("{0} is not a prime")]
    NotPrime(u64),

    #[error("expected an odd integer, got {0}")]
    EvenUnit(i64),

    #[error("endomorphism is not invertible")]
    NotInvertible,

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("inadmissible parameters: {0}")]
    Inadmissible(String),

    #[error("non-integral orbit count in {0}")]
    NonIntegral(&'static str),

    #[error("value out of range: {0}")]
    OutOfRange(String),

    #[error("consistency check failed: {0}")]
    Consistency(String),
}
