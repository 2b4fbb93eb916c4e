use crate::params::MethodChoice;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("{name} = {value} is out of range: {reason}")]
    OutOfRange {
        name: &'static str,
        value: f64,
        reason: String,
    },

    #[error("invalid argument {name} = {value}: {reason}")]
    InvalidArgument {
        name: &'static str,
        value: f64,
        reason: String,
    },

    #[error("{method} did not converge after {work} terms/nodes (error {achieved:e}, target {target:e})")]
    ConvergenceFailure {
        method: MethodChoice,
        work: usize,
        achieved: f64,
        target: f64,
    },

    #[error("alpha = {alpha} is ill-conditioned for series evaluation: {reason}")]
    IllConditioned { alpha: f64, reason: String },

    #[error("insufficient data: need at least {needed} convergents, have {have}")]
    InsufficientData { needed: usize, have: usize },

    #[error("degenerate logarithm in g_{k}: argument underflows at x = {x}")]
    DegenerateLog { k: u32, x: f64 },

    #[error("division by zero: theta + gamma = 0")]
    DivisionByZero,

    #[error("method {method} is not applicable: {reason}")]
    NotApplicable {
        method: MethodChoice,
        reason: String,
    },
}

impl Error {
    /// True for errors caused by the caller's input rather than by numerics.
    pub fn is_invalid_input(&self) -> bool {
        matches!(
            self,
            Error::OutOfRange { .. }
                | Error::InvalidArgument { .. }
                | Error::DivisionByZero
                | Error::NotApplicable { .. }
                | Error::InsufficientData { .. }
        )
    }
}
