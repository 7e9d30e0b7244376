//! Crate-wide error type.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// A model or budget parameter is outside its domain. Maps to exit code 2.
    #[error("{0}")]
    InvalidParameter(String),

    /// Too little data for the requested statistic.
    #[error("insufficient data: {0}")]
    InsufficientData(String),

    /// The least-squares design is singular or too ill-conditioned.
    #[error("singular design: {0}")]
    SingularDesign(String),

    /// A coupled pair of walkers violated the pathwise order `X_t <= Y_t`.
    /// This indicates a coupling bug, never a statistical fluctuation.
    /// Maps to exit code 3.
    #[error("coupling order violated at t={t}: X={x} > Y={y}")]
    OrderViolation { t: f64, x: i64, y: i64 },

    /// Unparseable input file.
    #[error("malformed input at line {line}: {msg}")]
    MalformedInput { line: usize, msg: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidParameter(msg.into())
    }

    /// Process exit code for the CLI: 2 for usage/parameter problems,
    /// 3 for internal assertions such as a coupling order violation.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::OrderViolation { .. } => 3,
            _ => 2,
        }
    }
}
