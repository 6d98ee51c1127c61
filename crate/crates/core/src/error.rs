use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: String, reason: String },

    #[error("solver did not converge after {iterations} iterations (natural residual {residual:e})")]
    NonConvergence { iterations: usize, residual: f64 },

    #[error("non-finite value in operator evaluation at iteration {iteration}")]
    NonFinite { iteration: usize },

    #[error("grid has {cells} cells, above the cap of {cap}; reduce the per-factor cell counts")]
    CellCap { cells: u128, cap: u128 },

    #[error("{flagged} of {total} cells failed to converge (allowed fraction {allowed})")]
    TooManyFlagged {
        flagged: usize,
        total: usize,
        allowed: f64,
    },

    #[error("index {index} out of range for length {len}")]
    IndexOutOfRange { index: usize, len: usize },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn invalid(name: &str, reason: impl Into<String>) -> Error {
    Error::InvalidParameter {
        name: name.to_string(),
        reason: reason.into(),
    }
}

pub(crate) fn check_dim(expected: usize, found: usize) -> Result<()> {
    if expected == found {
        Ok(())
    } else {
        Err(Error::DimensionMismatch { expected, found })
    }
}
