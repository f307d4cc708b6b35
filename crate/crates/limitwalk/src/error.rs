use num_complex::Complex64;
use thiserror::Error;

/// Errors raised while building or evaluating a limit distribution.
#[derive(Debug, Clone, Error, PartialEq)]
pub enum Error {
    #[error("weight table is empty")]
    EmptyWeights,
    #[error("negative weight {weight} at offset {index}")]
    NegativeWeight { index: usize, weight: f64 },
    #[error("weight at the minimum support point must be positive")]
    ZeroMassAtMinimum,
    #[error("weights sum to zero")]
    ZeroTotalMass,
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("generating function is undefined at s = 0")]
    ZeroArgument,
    #[error("period descent D = {d} is not positive")]
    DNotPositive { d: i64 },
    #[error("expected {expected} unit-disk roots, found {found}")]
    RootCountMismatch { expected: usize, found: usize },
    #[error("Newton refinement diverged from {start}")]
    NewtonDivergence { start: Complex64 },
    #[error("index {index} out of range, limit is {limit}")]
    IndexOutOfRange { index: usize, limit: usize },
    #[error("boundary system is numerically singular (condition {condition:.3e})")]
    SingularSystem { condition: f64 },
    #[error("boundary solution is not a valid CDF segment at offset {index}")]
    NonMonotoneSolution { index: usize },
    #[error("closed form needs simple roots, found multiplicity {multiplicity}")]
    MultipleRootsPresent { multiplicity: usize },
    #[error("recurrence lost accuracy at x = {x}, drift {magnitude:.3e}")]
    RecurrenceInstability { x: i64, magnitude: f64 },
    #[error("generating-function denominator has modulus {magnitude:.3e} at the argument")]
    NearRootArgument { magnitude: f64 },
    #[error("dynamic program needs {needed} state updates, budget is {budget}")]
    StateBudgetExceeded { needed: u64, budget: u64 },
    #[error("internal consistency check failed: {0}")]
    InternalInconsistency(String),
}

impl Error {
    /// Stable variant name, used in machine-readable reports.
    pub fn name(&self) -> &'static str {
        match self {
            Error::EmptyWeights => "EmptyWeights",
            Error::NegativeWeight { .. } => "NegativeWeight",
            Error::ZeroMassAtMinimum => "ZeroMassAtMinimum",
            Error::ZeroTotalMass => "ZeroTotalMass",
            Error::InvalidParameter(_) => "InvalidParameter",
            Error::ZeroArgument => "ZeroArgument",
            Error::DNotPositive { .. } => "DNotPositive",
            Error::RootCountMismatch { .. } => "RootCountMismatch",
            Error::NewtonDivergence { .. } => "NewtonDivergence",
            Error::IndexOutOfRange { .. } => "IndexOutOfRange",
            Error::SingularSystem { .. } => "SingularSystem",
            Error::NonMonotoneSolution { .. } => "NonMonotoneSolution",
            Error::MultipleRootsPresent { .. } => "MultipleRootsPresent",
            Error::RecurrenceInstability { .. } => "RecurrenceInstability",
            Error::NearRootArgument { .. } => "NearRootArgument",
            Error::StateBudgetExceeded { .. } => "StateBudgetExceeded",
            Error::InternalInconsistency(_) => "InternalInconsistency",
        }
    }

    /// Process exit code for CLI use: 1 for input/usage problems, 2 for
    /// numerical failures.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::EmptyWeights
            | Error::NegativeWeight { .. }
            | Error::ZeroMassAtMinimum
            | Error::ZeroTotalMass
            | Error::InvalidParameter(_)
            | Error::ZeroArgument
            | Error::IndexOutOfRange { .. }
            | Error::DNotPositive { .. } => 1,
            _ => 2,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
