use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("{0} is not a fundamental negative discriminant")]
    NotFundamental(i64),
    #[error("{0} is not prime")]
    NotPrime(i64),
    #[error("class number {class_number} of Q(sqrt({disc})) is not 1; only class number one fields are supported")]
    ClassNumberUnsupported { disc: i64, class_number: i64 },
    #[error("unit {unit} violates compatibility: finite part times infinity type is {value}, not 1")]
    UnitIncompatible { unit: String, value: String },
    #[error("invalid character: {0}")]
    InvalidCharacter(String),
    #[error("b = {b} is not coprime to the value order {order}")]
    NotCoprime { b: i64, order: i64 },
    #[error("character is not primitive (conductor {conductor}, modulus {modulus})")]
    NotPrimitive { conductor: i64, modulus: i64 },
    #[error("non-critical parity: m = {m} but the character has parity {parity}")]
    NonCriticalParity { m: i64, parity: u8 },
    #[error("pole: {0}")]
    Pole(String),
    #[error("{0} is a bad prime for this form")]
    BadPrime(i64),
    #[error("character power {0} is Galois invariant (only possible for weight one forms)")]
    GaloisInvariant(u32),
    #[error("twist conductor {twist} is not coprime to level {level}")]
    TwistNotCoprime { twist: i64, level: i64 },
    #[error("point outside the region of absolute convergence: {0}")]
    OutsideConvergence(String),
    #[error("spec inconsistent: {0}")]
    SpecInconsistent(String),
    #[error("no admissible twist found; tried {0:?}")]
    NoNonvanishingTwist(Vec<i64>),
    #[error("m = {m} outside the allowed range {range}")]
    OutOfRange { m: i64, range: String },
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("invalid input: {0}")]
    Invalid(String),
}

pub type Result<T> = std::result::Result<T, Error>;
