use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// Malformed argument: wrong shape, out-of-range parameter, non-Hermitian input.
    #[error("rejected input: {0}")]
    RejectedInput(String),

    /// A spectral function was applied outside its domain.
    #[error("domain error: {what} (offending eigenvalue {eigenvalue:e})")]
    Domain { what: String, eigenvalue: f64 },

    /// An algorithmic assumption failed a posteriori.
    #[error("structural error: {0}")]
    Structural(String),

    #[error("no invariant state: {0}")]
    NoInvariantState(String),

    #[error("no faithful invariant state (smallest eigenvalue of the ergodic projection of I/d is {min_eigenvalue:e})")]
    NoFaithfulInvariantState { min_eigenvalue: f64 },

    #[error("block decomposition failed: off-block leakage {leakage:e}")]
    DecompositionFailure { leakage: f64 },

    #[error("unsupported structure: {0}")]
    Unsupported(String),

    /// Optimizer ran out of budget before producing a usable ratio.
    #[error("budget exhausted: {0}")]
    BudgetExhausted(String),
}

impl Error {
    /// Structural and mathematical failures, as opposed to bad arguments.
    pub fn is_structural(&self) -> bool {
        !matches!(self, Error::RejectedInput(_))
    }
}
