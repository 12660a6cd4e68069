use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("modulus {0} is not prime")]
    InvalidModulus(u64),
    #[error("precision must be at least one digit")]
    InvalidPrecision,
    #[error("operands live in different rings: (p={0}, K={1}) vs (p={2}, K={3})")]
    IncompatibleOperands(u32, u32, u32, u32),
    #[error("digit {digit} out of range for p={p}")]
    InvalidDigit { digit: u64, p: u32 },
    #[error("identity needs more than {0} digits of precision")]
    PrecisionExceeded(u32),
    #[error("inputs outside the domain of the binomial valuation identity: {0}")]
    NotInIdentityDomain(String),
    #[error("residue {0} is divisible by p and has no Teichmüller lift")]
    NotAUnit(u64),
    #[error("value is not on the unit sphere")]
    NotOnSphere,
    #[error("multiplier {s} is not a unit modulo {q}")]
    NotAUnitModQ { s: u64, q: u64 },
    #[error("target set is not invariant under every map")]
    NotInvariant,
    #[error("state space of {0} indices exceeds the exact-solve limit")]
    TooLarge(u64),
    #[error("invalid experiment: {}", .0.join("; "))]
    InvalidSpec(Vec<String>),
    #[error("orbit did not reach the attractor: {0}")]
    NotAbsorbed(String),
    #[error("internal inconsistency: {0}")]
    InternalInconsistency(String),
    #[error("model violation: {0}")]
    ModelViolation(String),
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
