use thiserror::Error;

/// Errors raised anywhere in the library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid precision configuration: {0}")]
    InvalidConfig(String),

    #[error("numeric overflow in {0}")]
    Overflow(&'static str),

    #[error("precision exhausted: no agreement up to {max_bits} bits (last deviation 2^{last_log2_deviation})")]
    PrecisionExhausted { max_bits: u32, last_log2_deviation: i64 },

    #[error("series has no nonzero leading coefficient")]
    ZeroLeadingCoefficient,

    #[error("unsupported Eisenstein weight {0}")]
    UnsupportedWeight(u32),

    #[error("eta quotient has fractional q-power {numerator}/24")]
    FractionalPower { numerator: i64 },

    #[error("invalid discriminant {0}")]
    InvalidDiscriminant(String),

    #[error("equivalence search inconclusive within entry bound {bound}")]
    InconclusiveSearch { bound: String },

    #[error("point is not in the upper half-plane")]
    NotUpperHalfPlane,

    #[error("division by zero in {0}")]
    DivisionByZero(&'static str),

    #[error("near singularity: {0}")]
    NearSingularity(String),

    #[error("{label}: not near integral (residual {residual})")]
    NotNearIntegral { label: String, residual: String },

    #[error("no matrix class fixes the CM point")]
    NoFixingClass,

    #[error("{count} matrix classes fix the CM point (special form)")]
    MultipleFixing { count: usize },

    #[error("discriminant {0} is a special candidate (|D| = 3d^2)")]
    SpecialCandidate(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
