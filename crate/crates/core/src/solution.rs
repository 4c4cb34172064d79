use crate::matrix::HermitianMatrix;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolveStatus {
    Solved,
    /// Only bounds are known; `capacity_nats` holds an achievable lower bound.
    BoundsOnly,
    ZeroRate,
}

impl SolveStatus {
    pub fn as_str(&self) -> &'static str {
        match self {
            SolveStatus::Solved => "Solved",
            SolveStatus::BoundsOnly => "BoundsOnly",
            SolveStatus::ZeroRate => "ZeroRate",
        }
    }
}

/// Output of every covariance solver. Capacities are in nats.
#[derive(Debug, Clone)]
pub struct SolveResult {
    pub covariance: HermitianMatrix,
    pub capacity_nats: f64,
    pub lagrange_lambda: f64,
    pub active_modes: usize,
    pub power_used: f64,
    pub status: SolveStatus,
    /// Per-eigenmode powers in the solver's signalling basis.
    pub mode_powers: Vec<f64>,
}

impl SolveResult {
    pub fn zero(m: usize, lambda: f64) -> Self {
        Self {
            covariance: HermitianMatrix::zeros(m),
            capacity_nats: 0.0,
            lagrange_lambda: lambda,
            active_modes: 0,
            power_used: 0.0,
            status: SolveStatus::ZeroRate,
            mode_powers: vec![0.0; m],
        }
    }
}

/// Lower/mid/upper capacity values with the analytic width of the bracket.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CapacityBounds {
    pub lower_nats: f64,
    pub mid_nats: f64,
    pub upper_nats: f64,
    pub gap_bound_nats: f64,
}

impl CapacityBounds {
    /// `lower <= mid <= upper <= lower + gap_bound`, each within `tol`.
    pub fn is_consistent(&self, tol: f64) -> bool {
        self.lower_nats <= self.mid_nats + tol
            && self.mid_nats <= self.upper_nats + tol
            && self.upper_nats <= self.lower_nats + self.gap_bound_nats + tol
    }
}
