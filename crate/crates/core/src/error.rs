use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("{0} is not a prime modulus")]
    NotPrime(u64),

    #[error("non-invertible element {0} mod {1}")]
    NonInvertible(u64, u64),

    #[error("entry {value} out of range for F_{p}")]
    EntryOutOfRange { value: u64, p: u64 },

    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("field mismatch: F_{0} vs F_{1}")]
    FieldMismatch(u64, u64),

    #[error("Cauchy parameters must be distinct (repeated {0})")]
    CauchyRepeat(u64),

    #[error("Cauchy parameters need {needed} distinct elements but F_{p} has only {p}")]
    CauchyTooLarge { needed: usize, p: u64 },

    #[error("parse error: {0}")]
    Parse(String),

    #[error("invalid instance: {0}")]
    Validation(String),

    #[error("invalid scheme: {0}")]
    Scheme(String),

    #[error("cannot synthesize: {0}")]
    Synthesis(String),

    #[error("cannot generate instance: {0}")]
    Generate(String),

    #[error("unknown catalog entry {0:?}")]
    UnknownFixture(String),
}

pub type Result<T> = std::result::Result<T, Error>;
