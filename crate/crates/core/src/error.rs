use thiserror::Error;

/// Errors produced by the estimators, solvers and selectors in this crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("series did not reach tolerance {tol:e} within {max_terms} terms")]
    TruncationFailure { tol: f64, max_terms: usize },

    #[error("degenerate sample: {0}")]
    DegenerateSample(String),

    #[error("AMISE has no finite minimiser (flat density limit)")]
    NoFiniteOptimum,

    #[error("boundary ratio estimate undefined: no samples near x = 1 ({numerator} near x = 0)")]
    EstimationFailure { numerator: usize },

    #[error("invalid synthetic target: {0}")]
    InvalidTarget(String),

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("internal numerical error: {0}")]
    Internal(String),
}

impl Error {
    /// True for failures caused by the caller's data or arguments, as opposed
    /// to a numerical breakdown inside a solver.
    pub fn is_input_error(&self) -> bool {
        matches!(
            self,
            Error::InvalidParameter(_)
                | Error::InvalidInput(_)
                | Error::DegenerateSample(_)
                | Error::InvalidTarget(_)
                | Error::Unsupported(_)
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
