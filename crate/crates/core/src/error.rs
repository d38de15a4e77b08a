use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("malformed input: {0}")]
    Parse(String),

    #[error("polynomial has no real root in the isolating interval")]
    NoRootInInterval,

    #[error("polynomial has {0} real roots in the isolating interval, expected exactly one")]
    MultipleRoots(usize),

    #[error("polynomial is not squarefree")]
    NotSquarefree,

    #[error("xi is rational ({0}); an irrational number is required")]
    RationalXi(String),

    #[error("xi must be positive")]
    NonPositiveXi,

    #[error("precision exhausted: could not reach 2^-{bits} with the available data")]
    PrecisionExhausted { bits: u64 },

    #[error("could not certify an exact tie or strict order within the precision budget")]
    TieUnresolved,

    #[error("scan too small: no record beyond norm 1 was certified (x0_max = {x0_max})")]
    EmptyScan { x0_max: u64 },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("too few usable rows: need {needed}, have {got}")]
    TooFewRows { needed: usize, got: usize },

    #[error("index {index} out of range (length {len})")]
    IndexOutOfRange { index: usize, len: usize },

    #[error("enumeration budget exceeded ({0})")]
    EnumerationBudget(String),

    #[error("internal error: {0}")]
    Internal(String),

    #[error("cache mismatch: {0}")]
    CacheMismatch(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// Computation failures (as opposed to bad input).
    pub fn is_computation_failure(&self) -> bool {
        matches!(
            self,
            Error::PrecisionExhausted { .. }
                | Error::TieUnresolved
                | Error::EnumerationBudget(_)
                | Error::EmptyScan { .. }
                | Error::Internal(_)
        )
    }
}
