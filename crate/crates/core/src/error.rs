use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("operands live in different quadratic fields: sqrt({0}) vs sqrt({1})")]
    MixedRadicand(u64, u64),
    #[error("division by zero")]
    DivisionByZero,
    #[error("cannot parse {what} from {input:?}: {reason}")]
    Parse {
        what: &'static str,
        input: String,
        reason: String,
    },
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("operation requires positive characteristic")]
    CharZero,
    #[error("expected {expected} divisor classes, got {actual}")]
    ArityMismatch { expected: usize, actual: usize },
    #[error("base field is not an algebraic closure of a finite field")]
    NotOverFpbar,
    #[error("precondition violated: {0}")]
    PreconditionViolated(String),
    #[error("slot {slot} has combined value zero but nonzero entries; coefficients are not independent over Q")]
    IndependenceViolated { slot: usize },
    #[error("instance is not effective at slot {slot}")]
    NotEffective { slot: usize },
    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },
    #[error("zero class has no ray")]
    ZeroClass,
    #[error("class is not on the boundary of the nef cone")]
    NotBoundaryClass,
    #[error("degenerate choice: {0}")]
    DegenerateChoice(String),
}

impl Error {
    pub(crate) fn parse(what: &'static str, input: &str, reason: impl Into<String>) -> Self {
        Error::Parse {
            what,
            input: input.to_string(),
            reason: reason.into(),
        }
    }
}
