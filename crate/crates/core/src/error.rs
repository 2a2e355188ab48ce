use thiserror::Error;

/// Crate-wide error type.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("invalid norm parameter: {0}")]
    InvalidNorm(String),
    #[error("vacuum / admissibility violation: {0}")]
    Vacuum(String),
    #[error("degenerate input: {0}")]
    Degenerate(String),
    #[error("invalid sample sequence: {0}")]
    InvalidSamples(String),
    #[error("spectral support violation: {0}")]
    SupportViolation(String),
    #[error("non-finite value: {0}")]
    NonFinite(String),
    #[error("config error: {0}")]
    Config(String),
    #[error("blow-up suspected at t_sym = {t}: {reason}")]
    BlowUp { t: f64, reason: String },
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
    #[error("format error: {0}")]
    Format(String),
}

pub type Result<T> = std::result::Result<T, Error>;
