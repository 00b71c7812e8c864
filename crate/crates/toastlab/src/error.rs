use thiserror::Error;

/// Library-wide error type. Variant names track the failure vocabulary used
/// by the CLI and the verifiers.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("unsupported topology: {0}")]
    UnsupportedTopology(String),
    #[error("degenerate input: {0}")]
    DegenerateInput(String),
    #[error("set is not fillable: {0}")]
    NotFillable(String),
    #[error("invalid toast: {0}")]
    InvalidToast(String),
    #[error("not found: {0}")]
    NotFound(String),
    #[error("generation failed: {0}")]
    GenerationFailed(String),
    #[error("no escape: {0}")]
    NoEscape(String),
    #[error("vertex {0} has odd degree")]
    NotEvenDegree(usize),
    #[error("no cycle: {0}")]
    NoCycle(String),
    #[error("no solution: {0}")]
    NoSolution(String),
    #[error("parity error: {0}")]
    ParityError(String),
    #[error("numerator out of range on edge ({0}, {1})")]
    OutOfRange(usize, usize),
    #[error("chain too short: stuck on edge ({0}, {1})")]
    ChainTooShort(usize, usize),
    #[error("undefined ratio: {0}")]
    UndefinedRatio(String),
    #[error("budget exceeded: {0}")]
    BudgetExceeded(String),
}

pub type Result<T> = std::result::Result<T, Error>;
