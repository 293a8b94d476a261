//! Crate-wide error type. Variants map onto CLI exit codes in `bin/cli.rs`:
//! validation errors exit 2, cap violations exit 3, identity failures exit 4.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("{0} is not a prime > 3")]
    NonPrime(u64),
    #[error("cap exceeded: {what} needs {needed}, cap is {cap}")]
    CapExceeded {
        what: &'static str,
        needed: u128,
        cap: u128,
    },
    #[error("degree {sub} is not a subfield degree of {sup}")]
    NotASubfield { sub: u32, sup: u32 },
    #[error("zero element where a unit is required")]
    ZeroElement,
    #[error("conductor mismatch: {0} vs {1}")]
    ConductorMismatch(u64, u64),
    #[error("embedding index {k} is not a unit mod {m}")]
    BadEmbedding { k: u64, m: u64 },
    #[error("not a rational integer: {0}")]
    NotRational(String),
    #[error("zero has no valuation")]
    ZeroValue,
    #[error("order {n} does not divide the unit group order {group}")]
    OrderNotDividing { n: u64, group: u64 },
    #[error("trivial character not allowed here")]
    TrivialCharacter,
    #[error("degenerate character pair: {0}")]
    DegenerateCharacters(String),
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error("out of range: {0}")]
    OutOfRange(String),
    #[error("requires p = {expected} mod 6, got p = {p}")]
    WrongResidue { p: u64, expected: u64 },
    #[error("internal identity failed: {0}")]
    IdentityFailure(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// Process exit code the CLI maps this error to.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::CapExceeded { .. } => 3,
            Error::IdentityFailure(_) | Error::NotRational(_) => 4,
            _ => 2,
        }
    }
}
