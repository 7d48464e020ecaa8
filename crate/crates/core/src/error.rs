use thiserror::Error;

pub type Result<T> = std::result::Result<T, DrfError>;

#[derive(Debug, Error)]
pub enum DrfError {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("series truncation failed: tail bound {achieved:e} exceeds {required:e} after {terms} terms")]
    Truncation {
        achieved: f64,
        required: f64,
        terms: usize,
    },

    #[error("eigensolver did not converge at phi = {phi} (dim {dim}, frobenius norm {norm:e})")]
    EigenSolver { phi: f64, dim: usize, norm: f64 },

    #[error("matrix is not positive semidefinite: eigenvalue {value:e} below tolerance {tolerance:e}")]
    NotPositiveSemidefinite { value: f64, tolerance: f64 },

    #[error("target rate {target} is beyond numerical resolution (water level underflow at {theta:e})")]
    RateUnreachable { target: f64, theta: f64 },

    #[error("kernel grids do not match: {0}")]
    GridMismatch(String),

    #[error("integral diverges: {0}")]
    Divergent(String),
}

impl DrfError {
    pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Self {
        DrfError::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }
}
