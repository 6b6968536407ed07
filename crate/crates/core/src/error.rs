use thiserror::Error;

/// Errors raised by the analysis and integration routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameter `{name}` = {value}: {reason}")]
    InvalidParameter {
        name: &'static str,
        value: f64,
        reason: &'static str,
    },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("invalid integration options: {0}")]
    InvalidOptions(String),

    #[error("non-finite state encountered at t = {t}")]
    NonFinite { t: f64 },

    #[error("step size underflow at t = {t} (dt = {dt:e})")]
    StepUnderflow { t: f64, dt: f64 },

    #[error("maximum number of steps ({0}) exceeded")]
    MaxStepsExceeded(usize),

    #[error("invalid sweep grid: {0}")]
    InvalidGrid(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
