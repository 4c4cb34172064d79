use thiserror::Error;

pub type Result<T> = std::result::Result<T, WiretapError>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum WiretapError {
    #[error("matrix is not Hermitian: asymmetry {asymmetry:.3e} exceeds tolerance {allowed:.3e}")]
    NotHermitian { asymmetry: f64, allowed: f64 },

    #[error("matrix is not square: {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("{name} is not positive semidefinite (smallest eigenvalue {min_eigenvalue:.3e})")]
    NotPsd { name: &'static str, min_eigenvalue: f64 },

    #[error("{name} must be positive, got {value}")]
    NonPositive { name: &'static str, value: f64 },

    #[error(
        "multiplier search did not converge after {iterations} iterations (power residual {residual:.3e})"
    )]
    NonConvergence { iterations: usize, residual: f64 },

    #[error("not applicable: {0}")]
    NotApplicable(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),
}

impl WiretapError {
    pub fn is_non_convergence(&self) -> bool {
        matches!(self, WiretapError::NonConvergence { .. })
    }
}
