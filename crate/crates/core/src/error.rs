use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

/// Failure modes of the simulation library.
///
/// Numerical-contract violations (`StepTooLarge`, `TruncationLeak`,
/// `PositivityViolation`, `IntegrationFailure`) are distinguished from input
/// errors so front ends can report them separately.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("matrix is not Hermitian (max |M - M^dagger| = {0:.3e})")]
    NonHermitianInput(f64),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("integrator step too large: {quantity} drifted by {drift:.3e}")]
    StepTooLarge { quantity: &'static str, drift: f64 },

    #[error("density matrix lost positivity (min eigenvalue {0:.3e})")]
    PositivityViolation(f64),

    #[error("integration failed: {0}")]
    IntegrationFailure(String),

    #[error("transfer time is infinite: the one-period rotation angle vanishes")]
    InfiniteTime,

    #[error("degenerate parameters: {0}")]
    DegenerateParameters(String),

    #[error("no population transfer possible (|R'| = {0:.3e})")]
    NoTransfer(f64),

    #[error("closed form unavailable: {0}")]
    ClosedFormUnavailable(String),

    #[error("coupling ratio {ratio} does not match tan(target angle) = {expected}")]
    RatioMismatch { ratio: f64, expected: f64 },

    #[error("Fock truncation too tight: discarded probability {0:.3e}")]
    TruncationTooTight(f64),

    #[error("population leaked into the top Fock level: p = {0:.3e}")]
    TruncationLeak(f64),

    #[error("no candidate satisfies the search criteria: {0}")]
    NoCandidate(String),

    #[error("invalid state: {0}")]
    InvalidState(String),

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: String, reason: String },
}

impl Error {
    pub fn invalid(name: impl Into<String>, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name: name.into(),
            reason: reason.into(),
        }
    }

    /// True for failures of a numerical contract (drift, leak, positivity)
    /// rather than of the inputs.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::StepTooLarge { .. }
                | Error::PositivityViolation(_)
                | Error::IntegrationFailure(_)
                | Error::TruncationLeak(_)
        )
    }
}
