use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("{0} is not prime")]
    NotPrime(u64),

    #[error("minimal polynomial is reducible: {0}")]
    ReducibleMinpoly(String),

    #[error("unsupported minimal polynomial: {0}")]
    UnsupportedMinpoly(String),

    #[error("zero divisor detected: element with coordinates [{}] has no inverse", witness.join(", "))]
    ZeroDivisorDetected { witness: Vec<String> },

    #[error("invalid algebra: {0}")]
    InvalidAlgebra(String),

    #[error("invalid bimodule: {0}")]
    InvalidBimodule(String),

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("action mismatch: {0}")]
    ActionMismatch(String),

    #[error("module is not free: {0}")]
    NotFree(String),

    #[error("bimodule of forbidden type ({0}, {1})")]
    ForbiddenType(usize, usize),

    #[error("bimodule is not 2-periodic at index {index}: left rank {left_rank} vs right rank {next_right_rank} of the next dual")]
    NotTwoPeriodic {
        index: i64,
        left_rank: usize,
        next_right_rank: usize,
    },

    #[error("window too small: {0}")]
    WindowTooSmall(String),

    #[error("out of window: {0}")]
    OutOfWindow(String),

    #[error("dual basis unavailable: {0}")]
    MissingDualBasis(String),

    #[error("complex is not closed: {0}")]
    ComplexNotClosed(String),

    #[error("multiplication is not well defined: {0}")]
    NotWellDefined(String),

    #[error("singular sigma: the degree-one automorphism is not invertible")]
    SingularSigma,

    #[error("budget exceeded: ambient dimension {needed} exceeds budget {budget}")]
    BudgetExceeded { needed: u128, budget: u128 },

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
