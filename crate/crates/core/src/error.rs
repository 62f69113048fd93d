use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("expected a single T-monomial, found {terms} terms")]
    NotMonomial { terms: usize },

    #[error("T-exponent {exponent} exceeds the configured bound ±{bound}")]
    ExponentOverflow { exponent: i64, bound: i64 },

    #[error("operands live in different rings ({left} vs {right})")]
    RingMismatch { left: String, right: String },

    #[error("invalid ring parameters: {0}")]
    InvalidRing(String),

    #[error("exponent {exponent} outside 0..={max}")]
    ExponentRange { exponent: u32, max: u32 },

    #[error("h^0 coefficient is not a unit: {0}")]
    NotInvertibleConstantTerm(String),

    #[error("closed-form corrections exist only for twist k = 1, got k = {0}")]
    UnsupportedTwist(u32),

    #[error("correction term for i = {i} would carry h-exponent {exponent}")]
    NegativeHExponent { i: u32, exponent: i64 },

    #[error("element has a component on x^{exponent}, outside the quotient basis")]
    NotInBasis { exponent: u32 },

    #[error("linear system for r_eq is inconsistent (equation {0})")]
    InconsistentSystem(String),

    #[error("sphere dimensions differ ({0} vs {1})")]
    DimensionMismatch(u32, u32),

    #[error("unsupported class: {0}")]
    UnsupportedClass(String),

    #[error("config error in `{field}`: {message}")]
    Config { field: String, message: String },

    #[error("cache i/o: {0}")]
    CacheIo(String),

    #[error("malformed input: {0}")]
    Parse(String),
}

impl Error {
    pub(crate) fn config(field: &str, message: impl Into<String>) -> Self {
        Error::Config {
            field: field.to_string(),
            message: message.into(),
        }
    }
}
