use thiserror::Error;

/// Errors raised by the library.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("characteristic 2 is not supported (q must be odd)")]
    EvenCharacteristic,
    #[error("modulus {0} is reducible")]
    ReduciblePolynomial(String),
    #[error("invalid modulus: {0}")]
    InvalidModulus(String),
    #[error("operands belong to different fields")]
    MixedFields,
    #[error("division by zero")]
    DivisionByZero,
    #[error("{m} does not divide the extension degree {n}")]
    NonDivisorDegree { m: usize, n: usize },
    #[error("dimension {d} outside the admissible range [{min}, {max}]")]
    DimensionOutOfRange { d: usize, min: usize, max: usize },
    #[error("basis vectors are linearly dependent over the prime field")]
    LinearlyDependent,
    #[error("operation requires a nonempty point set")]
    EmptySet,
    #[error("domain error: {0}")]
    DomainError(String),
    #[error("infeasible parameters: {0}")]
    InfeasibleParameters(String),
    #[error("field of order {0} exceeds the supported size")]
    FieldTooLarge(u128),
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn domain(msg: impl Into<String>) -> Error {
    Error::DomainError(msg.into())
}
