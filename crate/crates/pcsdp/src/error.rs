use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid matrix: {0}")]
    InvalidMatrix(String),

    #[error("matrix is not positive semidefinite (smallest eigenvalue {0:e})")]
    NotPsd(f64),

    #[error("shift {theta} lies inside or too close to the spectrum [{lo}, {hi}]")]
    ShiftInSpectrum { theta: f64, lo: f64, hi: f64 },

    #[error("overflow: {0}")]
    Overflow(String),

    #[error("Lanczos iteration did not settle within {iterations} steps")]
    ConvergenceFailure { iterations: usize },

    #[error("constraint family is empty")]
    EmptyFamily,

    #[error("invalid uncertainty set: {0}")]
    InvalidUncertaintySet(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("validation error: {0}")]
    Validation(String),

    #[error("no prefix of the constraint matrices sums to a positive definite matrix")]
    NoPositiveDefiniteSubset,

    #[error("every constraint was dropped by the support filter")]
    EmptyAfterSupportFilter,

    #[error("numerical failure: {0}")]
    NumericalFailure(String),

    #[error("iteration cap of {iterations} reached")]
    IterationCapExceeded { iterations: u64, trace: String },

    #[error("instance too large: {0}")]
    TooLarge(String),

    #[error("dual objective is zero")]
    DegenerateDual,
}

impl Error {
    /// Process exit code used by the command-line front end.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Parse(_)
            | Error::Validation(_)
            | Error::InvalidMatrix(_)
            | Error::NotPsd(_)
            | Error::EmptyFamily
            | Error::InvalidUncertaintySet(_)
            | Error::NoPositiveDefiniteSubset
            | Error::EmptyAfterSupportFilter
            | Error::TooLarge(_) => 2,
            Error::ShiftInSpectrum { .. }
            | Error::Overflow(_)
            | Error::ConvergenceFailure { .. }
            | Error::NumericalFailure(_)
            | Error::IterationCapExceeded { .. }
            | Error::DegenerateDual => 4,
        }
    }
}
