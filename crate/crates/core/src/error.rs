use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum QcssError {
    #[error("modulus must be odd and ≥ 3 (got {0}, which is even)")]
    EvenModulus(u64),

    #[error("modulus must be odd and ≥ 3 (got {0})")]
    ModulusTooSmall(u64),

    #[error("value {value} is outside Z_{modulus}")]
    OutOfRange { value: u64, modulus: u64 },

    #[error("digit vector does not match the factorization of {modulus}: {reason}")]
    ShapeMismatch { modulus: u64, reason: String },

    #[error("{0} is not prime")]
    NotPrime(u64),

    #[error("exponent {exponent} is not coprime to {prime} - 1")]
    NotCoprime { prime: u64, exponent: u64 },

    #[error("family index k={k} must lie in [1, {p0})")]
    BadFamilyIndex { k: u64, p0: u64 },

    #[error("shift {shift} is outside ±{max}")]
    ShiftOutOfRange { shift: i64, max: i64 },

    #[error("sequence lengths differ ({left} vs {right})")]
    LengthMismatch { left: usize, right: usize },

    #[error("families cannot be compared: {0}")]
    FamilyMismatch(String),

    #[error("degenerate parameters: {0}")]
    DegenerateParams(String),

    #[error("bound precondition violated: {}", .0.join(", "))]
    PreconditionViolated(Vec<&'static str>),
}

pub type Result<T> = std::result::Result<T, QcssError>;
