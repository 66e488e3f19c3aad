//! Crate-wide error type.

use crate::series::Ring;

#[derive(Debug, thiserror::Error)]
pub enum QlabError {
    #[error("ring mismatch: {0:?} vs {1:?}")]
    RingMismatch(Ring, Ring),
    #[error("constant term {0} is not a unit in {1:?}")]
    NonUnitConstant(i64, Ring),
    #[error("integer overflow in exact arithmetic")]
    Overflow,
    #[error("modulus must be in 2..=2^31 (got {0})")]
    BadModulus(u64),
    #[error("coefficient index {0} exceeds truncation {1}")]
    IndexBeyondTrunc(i64, usize),
    #[error("progression residue {residue} must be less than step {step}")]
    BadProgression { step: u64, residue: u64 },
    #[error("{0} is not an odd prime")]
    NotOddPrime(u64),
    #[error("gcd({0}, {1}) != 1")]
    NotCoprime(u64, u64),
    #[error("delta {delta} does not divide level {level}")]
    DeltaNotDividingLevel { delta: u64, level: u64 },
    #[error("weight {0} is not an integer")]
    NonIntegralWeight(String),
    #[error("duplicate delta {0} in eta product specification")]
    DuplicateDelta(u64),
    #[error("series truncation {have} is insufficient (need at least {need})")]
    InsufficientTruncation { have: usize, need: usize },
    #[error("series is not normalized: a(1) must be 1, got {0}")]
    NotNormalized(i64),
    #[error("unknown family id `{0}`")]
    UnknownFamily(String),
    #[error("invalid parameters: {0}")]
    InvalidSpec(String),
    #[error("serialization error: {0}")]
    Serde(#[from] serde_json::Error),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, QlabError>;
