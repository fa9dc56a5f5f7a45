use thiserror::Error;

/// Errors raised by the spectral, noise, solver and estimate layers.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid domain: {0}")]
    InvalidDomain(String),

    #[error("invalid argument `{name}`: {reason}")]
    InvalidArgument { name: &'static str, reason: String },

    #[error("operator is not strictly negative: eigenvalue {value} at mode {mode}")]
    NonNegativeEigenvalue { mode: usize, value: f64 },

    #[error("time grid is not uniform (step {index} differs from {expected})")]
    NonUniformGrid { index: usize, expected: f64 },

    #[error("grids do not match: {0}")]
    GridMismatch(String),

    #[error("degenerate input: {0}")]
    Degenerate(String),

    #[error("Picard iteration did not converge after {iterations} iterations (last ratio {last_ratio})")]
    PicardDivergence { iterations: usize, last_ratio: f64 },

    #[error("solution blew up at t = {time}")]
    BlowUp { time: f64 },
}

impl Error {
    pub(crate) fn arg(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidArgument {
            name,
            reason: reason.into(),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
