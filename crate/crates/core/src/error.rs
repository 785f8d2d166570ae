use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("usage error: {0}")]
    Usage(String),
    #[error("construction failed: {0}")]
    Construction(String),
    #[error("not a group element ({reason}); residual norm {residual:e}")]
    NotInGroup { reason: String, residual: f64 },
    #[error("outside the dual orbit: {0}")]
    OutsideOrbit(String),
    #[error("domain error: {0}")]
    Domain(String),
    #[error("exact arithmetic not possible: {0}")]
    Inexact(String),
    #[error("singular matrix")]
    Singular,
    #[error("parse error: {0}")]
    Parse(String),
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn check_dim(expected: usize, got: usize) -> Result<()> {
    if expected == got {
        Ok(())
    } else {
        Err(Error::DimensionMismatch { expected, got })
    }
}
