use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum NotPartibleReason {
    /// The operator has nonnegative integer indicial roots (or no indicial polynomial).
    Degenerate,
    /// No rational center satisfies the reflection conditions.
    NoRationalCenter,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("{0} is not an odd prime")]
    NotOddPrime(u64),

    #[error("a coefficient denominator is divisible by the modulus {modulus}")]
    DenominatorDividesModulus { modulus: u64 },

    #[error("parse error at byte {pos}: {msg}")]
    Parse { pos: usize, msg: String },

    #[error("index {index} out of range for a sequence of {len} terms")]
    IndexOutOfRange { index: usize, len: usize },

    #[error("operator has zero leading coefficient")]
    ZeroLeadingCoefficient,

    #[error("indicial polynomial vanishes identically")]
    IndicialIdenticallyZero,

    #[error("operator is not power-partible: {0:?}")]
    NotPartible(NotPartibleReason),

    #[error("power-partible conditions hold for every center; center is not determined")]
    AmbiguousGamma,

    #[error("sequence is not annihilated by the operator at index {index}")]
    NotAnnihilated { index: usize },

    #[error("leading coefficient vanishes when reducing with the basis polynomial of degree {degree}")]
    LeadingCoefficientVanishes { degree: usize },

    #[error("adjoint image of the degree-{degree} basis polynomial has a term of wrong parity at exponent {exponent}")]
    ParityViolation { degree: usize, exponent: usize },

    #[error("denominator is not a power of the pivot polynomial")]
    NonMonomialDenominator,

    #[error("eta vanishes for epsilon = {epsilon}, z = {z}; excluded z: 0 when epsilon = 1, -1 when epsilon = -1")]
    DegenerateSpecialization { epsilon: i64, z: String },

    #[error("recurrence step at index {index} is not an exact division")]
    NonIntegralStep { index: usize },

    #[error("hypothesis gcd(p, z(z+1)) = 1 fails for p = {p}, z = {z}")]
    HypothesisViolated { p: u64, z: i64 },

    #[error("eta = {eta} is divisible by p = {p}")]
    EtaDividesModulus { p: u64, eta: i64 },

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("internal consistency failure: {0}")]
    Internal(String),
}
