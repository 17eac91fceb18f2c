use thiserror::Error;

pub type Result<T> = std::result::Result<T, CoreError>;

#[derive(Debug, Error)]
pub enum CoreError {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),
    #[error("grid mismatch between operands")]
    GridMismatch,
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("field is not solenoidal: max |div| = {0:e}")]
    NotSolenoidal(f64),
    #[error("eigensolver failure: {0}")]
    Eigensolver(String),
    #[error("linear solve failure: {0}")]
    LinearSolve(String),
    #[error("problem too large for dense path: {0}")]
    TooLarge(String),
    #[error("iteration diverged at iteration {iteration} (last ratio {ratio:e}): {reason}")]
    Diverged {
        iteration: usize,
        ratio: f64,
        reason: String,
    },
    #[error("no convergence after {iterations} iterations (distance {distance:e}, ratio trend {trend:e})")]
    NotConverged {
        iterations: usize,
        distance: f64,
        trend: f64,
    },
    #[error("invalid bracket: {0}")]
    InvalidBracket(String),
    #[error("insufficient data: {0}")]
    InsufficientData(String),
    #[error("unknown tag: {0}")]
    UnknownTag(String),
}

impl CoreError {
    /// Stable category string used by the command-line front end.
    pub fn category(&self) -> &'static str {
        match self {
            CoreError::InvalidGrid(_) | CoreError::GridMismatch | CoreError::InvalidArgument(_) => {
                "invalid-input"
            }
            CoreError::NotSolenoidal(_) => "not-solenoidal",
            CoreError::Eigensolver(_) | CoreError::LinearSolve(_) => "linear-algebra",
            CoreError::TooLarge(_) => "too-large",
            CoreError::Diverged { .. } => "diverged",
            CoreError::NotConverged { .. } => "not-converged",
            CoreError::InvalidBracket(_) => "invalid-bracket",
            CoreError::InsufficientData(_) => "insufficient-data",
            CoreError::UnknownTag(_) => "unknown-tag",
        }
    }
}
