use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("invalid entropy order (alpha={alpha}, beta={beta}): {reason}")]
    InvalidOrder {
        alpha: f64,
        beta: f64,
        reason: &'static str,
    },

    #[error("argument {value} outside domain: {reason}")]
    OutOfDomain { value: f64, reason: &'static str },

    #[error("integral diverges: {0}")]
    Divergent(String),

    #[error("quadrature did not converge (estimate {estimate:e}, error {error:e} after {intervals} intervals)")]
    QuadratureFailed {
        estimate: f64,
        error: f64,
        intervals: usize,
    },

    #[error("degenerate sample: {0}")]
    DegenerateSample(String),

    #[error("no critical value for n={n} at level {level}")]
    MissingCriticalValue { n: usize, level: f64 },

    #[error("parse error: {0}")]
    Parse(String),

    #[error("i/o error: {0}")]
    Io(String),
}

impl Error {
    /// Stable machine-readable identifier, printed by the CLI.
    pub fn code(&self) -> &'static str {
        match self {
            Error::InvalidParameter(_) => "invalid_parameter",
            Error::InvalidOrder { .. } => "invalid_order",
            Error::OutOfDomain { .. } => "out_of_domain",
            Error::Divergent(_) => "divergent_integral",
            Error::QuadratureFailed { .. } => "quadrature_failed",
            Error::DegenerateSample(_) => "degenerate_sample",
            Error::MissingCriticalValue { .. } => "missing_critical_value",
            Error::Parse(_) => "parse_error",
            Error::Io(_) => "io_error",
        }
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
