//! Channels whose `H1`, `H2` share right singular vectors, i.e. commuting
//! `W1`, `W2`. The problem separates into parallel scalar wiretap channels.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::channel::ChannelPair;
use crate::error::{Result, WiretapError};
use crate::isotropic::{mode_rate, solve_parallel};
use crate::matrix::{hermitian_eigen, unitarity_defect, CMatrix, HermitianMatrix};
use crate::search::MultiplierSearch;
use crate::solution::{SolveResult, SolveStatus};

pub const DEFAULT_COMMUTE_TOL: f64 = 1e-8;

/// Seed of the pencil weights used to split degenerate eigenspaces.
const PENCIL_SEED: u64 = 0x005e_ed0f_c0a1;
const PENCIL_TRIES: usize = 6;

/// Shared eigenbasis `V` with eigenvalues paired through the same column.
#[derive(Debug, Clone)]
pub struct CommonBasisChannel {
    basis: CMatrix,
    lam1: Vec<f64>,
    lam2: Vec<f64>,
}

impl CommonBasisChannel {
    pub fn new(basis: CMatrix, lam1: Vec<f64>, lam2: Vec<f64>) -> Result<Self> {
        let m = basis.nrows();
        if basis.ncols() != m || lam1.len() != m || lam2.len() != m {
            return Err(WiretapError::DimensionMismatch { expected: m, found: lam1.len().max(lam2.len()) });
        }
        let defect = unitarity_defect(&basis);
        if defect > 1e-10 {
            return Err(WiretapError::InvalidInput(format!("basis is not unitary (defect {defect:.2e})")));
        }
        if lam1.iter().chain(&lam2).any(|v| !(*v >= 0.0)) {
            return Err(WiretapError::InvalidInput("eigenvalues must be non-negative".into()));
        }
        Ok(Self { basis, lam1, lam2 })
    }

    pub fn basis(&self) -> &CMatrix {
        &self.basis
    }

    pub fn lam1(&self) -> &[f64] {
        &self.lam1
    }

    pub fn lam2(&self) -> &[f64] {
        &self.lam2
    }

    pub fn m(&self) -> usize {
        self.lam1.len()
    }

    /// Covariance `V diag(p) V†`.
    pub fn covariance(&self, powers: &[f64]) -> Result<HermitianMatrix> {
        HermitianMatrix::from_spectrum(&self.basis, powers)
    }
}

/// `‖W1 W2 - W2 W1‖_F`.
pub fn commutator_norm(pair: &ChannelPair) -> f64 {
    let a = pair.w1().as_matrix();
    let b = pair.w2().as_matrix();
    (a * b - b * a).norm()
}

/// Why a pair was not accepted as commuting.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NotCommuting {
    pub commutator_norm: f64,
    pub allowed: f64,
}

/// Accepts the pair when `‖[W1, W2]‖ <= tol ‖W1‖ ‖W2‖` and returns a joint
/// eigenbasis, modes ordered by decreasing `λ_1i`.
pub fn detect_common_rsv(
    pair: &ChannelPair,
    tol: f64,
) -> std::result::Result<CommonBasisChannel, NotCommuting> {
    let n1 = pair.w1().norm();
    let n2 = pair.w2().norm();
    let comm = commutator_norm(pair);
    let allowed = tol * n1 * n2;
    if comm > allowed {
        return Err(NotCommuting { commutator_norm: comm, allowed });
    }

    let w1 = pair.w1().as_matrix();
    let w2 = pair.w2().as_matrix();
    let mut rng = ChaCha8Rng::seed_from_u64(PENCIL_SEED);
    let mut best: Option<(f64, CMatrix)> = None;
    for _ in 0..PENCIL_TRIES {
        let eta = if n2 > 0.0 { rng.random_range(0.5..1.5) * n1.max(n2) / n2 } else { 0.0 };
        let pencil = w1 + w2.map(|z| z * eta);
        let v = hermitian_eigen(&pencil).eigenvectors;
        let off = off_diagonal_norm(&(v.adjoint() * w1 * &v)) + off_diagonal_norm(&(v.adjoint() * w2 * &v));
        if best.as_ref().is_none_or(|(b, _)| off < *b) {
            best = Some((off, v));
        }
        if off <= 1e-12 * (n1 + n2) {
            break;
        }
    }
    let (_, v) = best.expect("at least one pencil try");
    let lam1 = diagonal_of(&(v.adjoint() * w1 * &v), pair.w1());
    let lam2 = diagonal_of(&(v.adjoint() * w2 * &v), pair.w2());

    let m = pair.m();
    let mut order: Vec<usize> = (0..m).collect();
    order.sort_by(|&i, &j| lam1[j].total_cmp(&lam1[i]).then(lam2[i].total_cmp(&lam2[j])));
    let basis = CMatrix::from_fn(m, m, |r, c| v[(r, order[c])]);
    let lam1 = order.iter().map(|&i| lam1[i]).collect();
    let lam2 = order.iter().map(|&i| lam2[i]).collect();
    Ok(CommonBasisChannel { basis, lam1, lam2 })
}

fn off_diagonal_norm(a: &CMatrix) -> f64 {
    let mut acc = 0.0;
    for i in 0..a.nrows() {
        for j in 0..a.ncols() {
            if i != j {
                acc += a[(i, j)].norm_sqr();
            }
        }
    }
    acc.sqrt()
}

/// Real diagonal with entries under the matrix's rank threshold set to zero.
fn diagonal_of(d: &CMatrix, source: &HermitianMatrix) -> Vec<f64> {
    let scale = source.eigenvalues().iter().fold(0.0_f64, |a, v| a.max(v.abs()));
    let thr = source.rank_tol() * scale;
    (0..d.nrows())
        .map(|i| {
            let v = d[(i, i)].re;
            if v.abs() <= thr {
                0.0
            } else {
                v.max(0.0)
            }
        })
        .collect()
}

/// Optimal covariance for the shared-basis channel: per-mode powers follow
/// the parallel wiretap law with the multiplier fixed by the power budget.
pub fn solve_common_rsv(ch: &CommonBasisChannel, p_t: f64, search: &MultiplierSearch) -> Result<SolveResult> {
    if !(p_t > 0.0) {
        return Err(WiretapError::NonPositive { name: "P_T", value: p_t });
    }
    let (powers, lambda) = solve_parallel(&ch.lam1, &ch.lam2, p_t, search)?;
    let capacity: f64 =
        powers.iter().zip(ch.lam1.iter().zip(&ch.lam2)).map(|(&p, (&a, &b))| mode_rate(a, b, p)).sum();
    let active = powers.iter().filter(|&&p| p > 0.0).count();
    Ok(SolveResult {
        covariance: ch.covariance(&powers)?,
        capacity_nats: capacity.max(0.0),
        lagrange_lambda: lambda,
        active_modes: active,
        power_used: powers.iter().sum(),
        status: if active == 0 { SolveStatus::ZeroRate } else { SolveStatus::Solved },
        mode_powers: powers,
    })
}
