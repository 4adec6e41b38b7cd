use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("parameter `{name}` must be finite, got {value}")]
    NonFinite { name: &'static str, value: f64 },

    #[error("matrix order must be at least {min}, got {got}")]
    OrderTooSmall { min: u64, got: u64 },

    #[error("definiteness domains require p >= 0, got p = {p}")]
    NegativeDiagonal { p: f64 },

    #[error("operation requires r = p - s, got r = {r} and p - s = {p_minus_s}")]
    RequiresRpEqualPMinusS { r: f64, p_minus_s: f64 },

    #[error("MA(1) coefficient must satisfy |phi| < 1, got {phi}")]
    NonInvertible { phi: f64 },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("log-cosine integral hypothesis violated: {0}")]
    Hypothesis(String),

    #[error("quadrature did not converge: {0}")]
    Quadrature(String),

    #[error("Monte Carlo exponent overflow ({exponent:.3e}); use a smaller |lambda| or n")]
    ExpOverflow { exponent: f64 },

    /// A closed form produced a result that should be real but is not, or
    /// two evaluation routes of the same quantity disagree.
    #[error("internal consistency failure: {0}")]
    Consistency(String),
}

impl Error {
    /// True for failures that indicate a bug rather than bad input.
    pub fn is_internal(&self) -> bool {
        matches!(self, Error::Consistency(_))
    }
}
