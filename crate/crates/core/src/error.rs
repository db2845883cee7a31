use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("base must be at least 2, got {0}")]
    InvalidBase(u32),

    #[error("precision must be at least 1")]
    ZeroPrecision,

    #[error("base {0} is not prime")]
    CompositeBase(u32),

    #[error("base mismatch: {0} vs {1}")]
    BaseMismatch(u32, u32),

    #[error("denominator is zero")]
    ZeroDenominator,

    #[error("value is not a unit modulo {base}^{precision}")]
    NotInvertible { base: u32, precision: usize },

    #[error("cannot divide by {base}^{shift}: low digits are not all zero")]
    InexactShift { base: u32, shift: usize },

    #[error("shift by {shift} leaves no known digits of a {precision}-digit value")]
    PrecisionExhausted { precision: usize, shift: usize },

    #[error("digit {digit} out of range for base {base}")]
    DigitOutOfRange { digit: u32, base: u32 },

    #[error("base {0} has no single-character digit form")]
    BaseTooLarge(u32),

    #[error("{0} is outside the logarithm's convergence domain")]
    LogDomain(String),

    #[error("requested {requested} digits but only {achievable} are achievable")]
    PrecisionUnachievable { requested: usize, achievable: usize },

    #[error("fixed-point iteration did not settle after {0} steps")]
    NoFixedPoint(usize),

    #[error("{family} index {index} exceeds budget {limit}")]
    BudgetExceeded {
        family: &'static str,
        index: u64,
        limit: u64,
    },

    #[error("integer part of {0} does not fit in {1} binary digits")]
    IntegerPartOverflow(String, usize),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("cannot parse {what}: {detail}")]
    Parse { what: &'static str, detail: String },

    #[error("limit detection inconclusive at stage {stage}: achieved {achieved} digits, wanted {wanted}")]
    Inconclusive {
        stage: usize,
        achieved: usize,
        wanted: usize,
    },

    #[error("i/o error on {path}: {message}")]
    Io { path: String, message: String },
}
