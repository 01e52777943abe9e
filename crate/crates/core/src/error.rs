use thiserror::Error;

/// Errors raised by the invariant computations.
///
/// `Input` variants mean the caller handed us something outside the domain of
/// the formulas. `Consistency` means an identity that must hold for valid
/// input did not, which points at a bug rather than bad data.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("arguments not coprime: gcd({0}, {1}) = {2}")]
    NotCoprime(i64, i64, i64),

    #[error("modulus must be positive, got {0}")]
    NonPositiveModulus(i64),

    #[error("first argument of c(q, p) must be odd, got {0}")]
    EvenNumerator(i64),

    #[error("Seifert data needs at least 3 multiplicities, got {0}")]
    TooFewFibers(usize),

    #[error("multiplicity {0} is less than 2")]
    MultiplicityTooSmall(i64),

    #[error("multiplicities not pairwise coprime: gcd({0}, {1}) = {2}")]
    MultiplicitiesNotCoprime(i64, i64, i64),

    #[error("operation requires the even case (a1 even)")]
    NotEvenCase,

    #[error("expected {expected} shifts, got {got}")]
    ShiftLength { expected: usize, got: usize },

    #[error("continued fraction needs 0 < b < a with gcd 1, got a = {0}, b = {1}")]
    BadContinuedFraction(i64, i64),

    #[error("cannot parse rational from {0:?}")]
    ParseRational(String),

    #[error("integer overflow in {0}")]
    Overflow(&'static str),

    #[error("consistency failure: {0}")]
    Consistency(String),
}

impl Error {
    /// True for errors caused by the caller's arguments.
    pub fn is_input_error(&self) -> bool {
        !matches!(self, Error::Consistency(_) | Error::Overflow(_))
    }
}

pub type Result<T> = std::result::Result<T, Error>;
