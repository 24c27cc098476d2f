use thiserror::Error;

/// Failure modes shared by every numerical routine in the crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("pole: {0}")]
    Pole(String),
    #[error("range error: {0}")]
    Range(String),
    #[error("no convergence: {0}")]
    NonConvergence(String),
    #[error("precision loss: {0}")]
    PrecisionLoss(String),
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error("closed form not available: {0}")]
    NotAvailable(String),
    #[error("outside validity window: {0}")]
    OutsideWindow(String),
}

pub type Result<T> = std::result::Result<T, Error>;


pub(crate) fn finite(x: f64, what: &str) -> Result<f64> {
    if x.is_finite() {
        Ok(x)
    } else {
        Err(Error::Range(format!("{what} is not finite")))
    }
}
