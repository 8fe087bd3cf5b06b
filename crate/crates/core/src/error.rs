use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid {param}: {reason}")]
    Domain { param: &'static str, reason: String },

    #[error("no trivial branch for load {load}: admissible range is [0, {max})")]
    NoTrivialBranch { load: f64, max: f64 },

    #[error("field provides derivatives up to order {available}, {required} requested")]
    Capability { required: u32, available: u32 },

    #[error("not a destabilizing variation: compressiveness {0} is not positive")]
    NotDestabilizing(f64),

    #[error("shape error: {0}")]
    Shape(String),

    #[error("division by zero: {0}")]
    DivisionByZero(String),

    #[error("configuration error: {0}")]
    Configuration(String),

    #[error("m = {m} lies outside the Koiter circle (M(h) = {m_max})")]
    OutOfCircle { m: u32, m_max: u32 },

    #[error("validation failed: {0}")]
    Validation(String),

    #[error("need at least {needed} points, got {got}")]
    Arity { needed: usize, got: usize },

    #[error("denominator form not positive-definite")]
    NotPositiveDefinite,

    #[error("solver did not converge after {iterations} iterations (residual {residual:e})")]
    Solver { residual: f64, iterations: usize },

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn domain(param: &'static str, reason: impl Into<String>) -> Self {
        Error::Domain {
            param,
            reason: reason.into(),
        }
    }

    /// True for failures of an iterative or numerical procedure, as opposed
    /// to bad input.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::Solver { .. } | Error::NotPositiveDefinite | Error::NotDestabilizing(_)
        )
    }
}
