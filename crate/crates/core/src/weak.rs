//! Weak-eavesdropper solution: maximizes `ln|I + W1 R| - tr(W2 R)`.
//!
//! The objective is concave, so the closed-form KKT point is the global
//! maximizer. For a multiplier `λ >= 0` let `Q = pinv(λI + W2)` and
//! `Ŵ1 = Q^{1/2} W1 Q^{1/2}`; then
//!
//! ```text
//! R(λ) = Q^{1/2} (I - Ŵ1^{-1})_+ Q^{1/2}
//! ```
//!
//! where the positive part keeps only eigenmodes of `Ŵ1` above one, so
//! singular `Ŵ1` needs no special casing. `tr R(λ)` is non-increasing in
//! `λ`; `λ = 0` gives the largest usable power (the threshold power) and
//! beyond it extra power is left unused.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::channel::ChannelPair;
use crate::error::{Result, WiretapError};
use crate::matrix::{hermitian_eigen, HermitianMatrix};
use crate::rate::{clamp_rate, secrecy_rate};
use crate::rsv::{detect_common_rsv, CommonBasisChannel, DEFAULT_COMMUTE_TOL};
use crate::search::MultiplierSearch;
use crate::solution::{CapacityBounds, SolveResult, SolveStatus};

/// Relative tolerance for `N(W2) ⊆ N(W1)`.
pub const NULLSPACE_CONTAINMENT_TOL: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WeakSolveConfig {
    pub search: MultiplierSearch,
    /// Use the diagonal closed form when `W1`, `W2` commute.
    pub commuting_fast_path: bool,
    pub commute_tol: f64,
}

impl Default for WeakSolveConfig {
    fn default() -> Self {
        Self {
            search: MultiplierSearch::default(),
            commuting_fast_path: true,
            commute_tol: DEFAULT_COMMUTE_TOL,
        }
    }
}

struct WeakPoint {
    covariance: HermitianMatrix,
    capacity: f64,
    active: usize,
}

/// `R(λ)` and the closed-form weak capacity at that multiplier.
fn weak_point(pair: &ChannelPair, lambda: f64) -> WeakPoint {
    let q = pair.w2().shift(lambda).pinv();
    let q_half = q.sqrt();
    let w1_hat = pair.w1().congruence(q_half.as_matrix());
    let w2_hat = pair.w2().congruence(q_half.as_matrix());
    let eig = w1_hat.eigen();
    let thr = eig.zero_threshold(pair.rank_tol());

    let mut log_sum = 0.0;
    let mut active = 0;
    let shrink: Vec<f64> = eig
        .eigenvalues
        .iter()
        .map(|&mu| {
            if mu > 1.0 && mu > thr {
                log_sum += mu.ln();
                active += 1;
                1.0 - 1.0 / mu
            } else {
                0.0
            }
        })
        .collect();
    let d = HermitianMatrix::from_trusted(eig.compose(&shrink), pair.rank_tol());
    let covariance = d.congruence(q_half.as_matrix());
    let capacity = log_sum - w2_hat.trace_product(&d);
    WeakPoint { covariance, capacity, active }
}

/// Columns spanning `N(W2)` under the rank tolerance.
fn null_space_w2(pair: &ChannelPair) -> Option<DMatrix<Complex64>> {
    let eig = pair.w2().eigen();
    let thr = eig.zero_threshold(pair.rank_tol());
    let idx: Vec<usize> = (0..eig.dim()).filter(|&i| eig.eigenvalues[i].abs() <= thr).collect();
    if idx.is_empty() {
        return None;
    }
    Some(DMatrix::from_fn(pair.m(), idx.len(), |r, c| eig.eigenvectors[(r, idx[c])]))
}

/// Power beyond which the weak-eavesdropper solution stops using more
/// power. `+∞` when `W2` is singular with `N(W2) ⊄ N(W1)`.
pub fn threshold_power(pair: &ChannelPair) -> f64 {
    if let Some(null) = null_space_w2(pair) {
        let leak = (pair.w1().as_matrix() * &null).norm();
        if leak > NULLSPACE_CONTAINMENT_TOL * pair.w1().norm() {
            return f64::INFINITY;
        }
    }
    weak_point(pair, 0.0).covariance.trace()
}

fn result_from_point(point: WeakPoint, lambda: f64) -> SolveResult {
    let m = point.covariance.dim();
    if point.active == 0 {
        return SolveResult::zero(m, lambda);
    }
    let powers = point.covariance.eigenvalues().iter().map(|v| v.max(0.0)).collect();
    SolveResult {
        power_used: point.covariance.trace(),
        covariance: point.covariance,
        capacity_nats: clamp_rate(point.capacity),
        lagrange_lambda: lambda,
        active_modes: point.active,
        status: SolveStatus::Solved,
        mode_powers: powers,
    }
}

/// Optimal weak-eavesdropper covariance. Uses the diagonal closed form when
/// the channels commute and `cfg.commuting_fast_path` is set.
pub fn solve_weak(pair: &ChannelPair, p_t: f64, cfg: &WeakSolveConfig) -> Result<SolveResult> {
    if !(p_t > 0.0) || !p_t.is_finite() {
        return Err(WiretapError::NonPositive { name: "P_T", value: p_t });
    }
    if cfg.commuting_fast_path {
        if let Ok(ch) = detect_common_rsv(pair, cfg.commute_tol) {
            return solve_weak_commuting(&ch, p_t, &cfg.search);
        }
    }
    solve_weak_general(pair, p_t, cfg)
}

/// Matrix-form solver, used for every channel regardless of structure.
pub fn solve_weak_general(pair: &ChannelPair, p_t: f64, cfg: &WeakSolveConfig) -> Result<SolveResult> {
    if !(p_t > 0.0) || !p_t.is_finite() {
        return Err(WiretapError::NonPositive { name: "P_T", value: p_t });
    }
    let m = pair.m();
    let top = pair.w1().max_eigenvalue();
    if top <= 0.0 {
        return Ok(SolveResult::zero(m, 0.0));
    }
    if p_t >= threshold_power(pair) {
        return Ok(result_from_point(weak_point(pair, 0.0), 0.0));
    }
    let mult = cfg.search.solve(|l| weak_point(pair, l).covariance.trace(), top, p_t)?;
    Ok(result_from_point(weak_point(pair, mult.lambda), mult.lambda))
}

fn commuting_power(l1: f64, l2: f64, lambda: f64) -> f64 {
    if l1 <= 0.0 {
        return 0.0;
    }
    let denom = lambda + l2;
    if denom <= 0.0 {
        return f64::INFINITY;
    }
    (1.0 / denom - 1.0 / l1).max(0.0)
}

/// Diagonal form for a shared eigenbasis:
/// `p_i = (1/(λ + λ_2i) - 1/λ_1i)_+`.
pub fn solve_weak_commuting(
    ch: &CommonBasisChannel,
    p_t: f64,
    search: &MultiplierSearch,
) -> Result<SolveResult> {
    let (l1, l2) = (ch.lam1(), ch.lam2());
    let m = ch.m();
    let total =
        |lambda: f64| -> f64 { l1.iter().zip(l2).map(|(&a, &b)| commuting_power(a, b, lambda)).sum() };
    let top = l1.iter().copied().fold(0.0_f64, f64::max);
    if top <= 0.0 {
        return Ok(SolveResult::zero(m, 0.0));
    }
    let lambda = if p_t >= total(0.0) { 0.0 } else { search.solve(total, top, p_t)?.lambda };
    let powers: Vec<f64> = l1.iter().zip(l2).map(|(&a, &b)| commuting_power(a, b, lambda)).collect();
    let active = powers.iter().filter(|&&p| p > 0.0).count();
    if active == 0 {
        return Ok(SolveResult::zero(m, lambda));
    }
    let capacity: f64 =
        powers.iter().zip(l1.iter().zip(l2)).map(|(&p, (&a, &b))| (a * p).ln_1p() - b * p).sum();
    Ok(SolveResult {
        covariance: ch.covariance(&powers)?,
        capacity_nats: clamp_rate(capacity),
        lagrange_lambda: lambda,
        active_modes: active,
        power_used: powers.iter().sum(),
        status: SolveStatus::Solved,
        mode_powers: powers,
    })
}

/// `C_w <= C(R*_w) <= C_s <= C_w + P_T² λ_1²(W2)/2`.
#[derive(Debug, Clone)]
pub struct WeakBounds {
    pub bounds: CapacityBounds,
    pub solution: SolveResult,
}

pub fn capacity_bounds_weak(pair: &ChannelPair, p_t: f64, cfg: &WeakSolveConfig) -> Result<CapacityBounds> {
    weak_bounds_detail(pair, p_t, cfg).map(|d| d.bounds)
}

pub fn weak_bounds_detail(pair: &ChannelPair, p_t: f64, cfg: &WeakSolveConfig) -> Result<WeakBounds> {
    let solution = solve_weak(pair, p_t, cfg)?;
    let achieved = clamp_rate(secrecy_rate(pair, &solution.covariance)?);
    let top2 = pair.w2().max_eigenvalue().max(0.0);
    let gap = 0.5 * p_t * p_t * top2 * top2;
    let lower = solution.capacity_nats;
    Ok(WeakBounds {
        bounds: CapacityBounds {
            lower_nats: lower,
            mid_nats: achieved,
            upper_nats: lower + gap,
            gap_bound_nats: gap,
        },
        solution,
    })
}

/// High-SNR limits `(ln|W1| - ln|W2|, ln|W1| - ln|W2| - tr(I - W2 W1^{-1}))`,
/// defined for `W1 ≻ W2 ≻ 0`.
pub fn saturation_capacities(pair: &ChannelPair) -> Result<(f64, f64)> {
    let e2 = pair.w2().eigenvalues();
    let e1 = pair.w1().eigenvalues();
    let scale = e1[0].abs().max(e2[0].abs());
    let thr = pair.rank_tol() * scale;
    let diff_min = pair.w1().sub(pair.w2()).min_eigenvalue();
    if *e2.last().expect("non-empty") <= thr || diff_min <= thr {
        return Err(WiretapError::NotApplicable("saturation capacities require W1 > W2 > 0".into()));
    }
    let exact: f64 = e1.iter().map(|v| v.ln()).sum::<f64>() - e2.iter().map(|v| v.ln()).sum::<f64>();
    let m = pair.m() as f64;
    let weak = exact - (m - pair.w2().trace_product(&pair.w1().pinv()));
    Ok((exact, weak))
}

/// Violations of the weak-problem KKT system for a candidate `(R, λ)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KktReport {
    /// Size of the negative part of the dual matrix `M` (needs `M ⪰ 0`).
    pub stationarity: f64,
    /// `‖M R‖_F`.
    pub complementarity: f64,
    /// `|λ (tr R - P_T)|`.
    pub power_slackness: f64,
    /// Excess power plus negative part of `R`, plus a negative multiplier.
    pub feasibility: f64,
}

impl KktReport {
    pub fn max_residual(&self) -> f64 {
        self.stationarity.max(self.complementarity).max(self.power_slackness).max(self.feasibility)
    }

    pub fn satisfied(&self, tol: f64) -> bool {
        self.max_residual() <= tol
    }
}

pub(crate) fn kkt_report(
    m_matrix: &HermitianMatrix,
    r: &HermitianMatrix,
    lambda: f64,
    p_t: f64,
) -> KktReport {
    let m_min = m_matrix.min_eigenvalue();
    let r_min = r.min_eigenvalue();
    let tr = r.trace();
    KktReport {
        stationarity: (-m_min).max(0.0),
        complementarity: (m_matrix.as_matrix() * r.as_matrix()).norm(),
        power_slackness: (lambda * (tr - p_t)).abs(),
        feasibility: (tr - p_t).max(0.0) + (-r_min).max(0.0) + (-lambda).max(0.0),
    }
}

/// KKT residuals with `M = W2 + λI - (I + W1 R)^{-1} W1` (symmetrized).
pub fn kkt_residual_weak(
    pair: &ChannelPair,
    r: &HermitianMatrix,
    lambda: f64,
    p_t: f64,
) -> Result<KktReport> {
    pair.check_covariance(r)?;
    let m = pair.m();
    let w1 = pair.w1().as_matrix();
    let lhs = DMatrix::<Complex64>::identity(m, m) + w1 * r.as_matrix();
    let grad = lhs.lu().solve(w1).ok_or_else(|| WiretapError::InvalidInput("I + W1 R is singular".into()))?;
    let mut dual = pair.w2().as_matrix() - grad;
    for i in 0..m {
        dual[(i, i)] += Complex64::new(lambda, 0.0);
    }
    let dual = HermitianMatrix::from_trusted(dual, pair.rank_tol());
    Ok(kkt_report(&dual, r, lambda, p_t))
}

/// Eigenvector of `R` for its smallest eigenvalue.
pub fn weakest_direction(r: &HermitianMatrix) -> DMatrix<Complex64> {
    let eig = hermitian_eigen(r.as_matrix());
    eig.eigenvector(eig.dim() - 1)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rate::weak_rate;

    fn fig1() -> ChannelPair {
        ChannelPair::from_real_rows(&[vec![2.0, 0.0], vec![0.0, 1.0]], &[vec![0.2, 0.1], vec![0.1, 0.1]])
            .unwrap()
    }

    #[test]
    fn no_eavesdropper_reduces_to_water_filling() {
        let pair = ChannelPair::from_diagonals(&[2.0, 1.0], &[0.0, 0.0]).unwrap();
        for cfg in
            [WeakSolveConfig::default(), WeakSolveConfig { commuting_fast_path: false, ..Default::default() }]
        {
            let sol = solve_weak(&pair, 1.5, &cfg).unwrap();
            let r = sol.covariance.as_matrix();
            assert!((r[(0, 0)].re - 1.0).abs() < 1e-10);
            assert!((r[(1, 1)].re - 0.5).abs() < 1e-10);
            assert!((sol.lagrange_lambda - 2.0 / 3.0).abs() < 1e-10);
            assert!((sol.capacity_nats - (3.0_f64.ln() + 1.5_f64.ln())).abs() < 1e-10);
        }
    }

    #[test]
    fn dominated_channel_has_zero_rate() {
        let pair =
            ChannelPair::from_gram(HermitianMatrix::identity(2).scale(0.5), HermitianMatrix::identity(2))
                .unwrap();
        for p_t in [0.1, 10.0] {
            let sol = solve_weak_general(&pair, p_t, &WeakSolveConfig::default()).unwrap();
            assert_eq!(sol.status, SolveStatus::ZeroRate);
            assert_eq!(sol.capacity_nats, 0.0);
            assert_eq!(sol.covariance.norm(), 0.0);
        }
    }

    #[test]
    fn threshold_power_fig1() {
        // tr W2^{-1} - tr W1^{-1} = 30 - 1.5 when the positive part is full.
        assert!((threshold_power(&fig1()) - 28.5).abs() < 1e-9);
    }

    #[test]
    fn threshold_power_special_cases() {
        let free = ChannelPair::from_diagonals(&[2.0, 1.0], &[0.1, 0.0]).unwrap();
        assert!(threshold_power(&free).is_infinite());
        let equal =
            ChannelPair::from_gram(HermitianMatrix::identity(2), HermitianMatrix::identity(2)).unwrap();
        assert_eq!(threshold_power(&equal), 0.0);
        // N(W2) ⊆ N(W1): projected problem is the scalar pair (2, 0.1).
        let projected = ChannelPair::from_diagonals(&[2.0, 0.0], &[0.1, 0.0]).unwrap();
        assert!((threshold_power(&projected) - (10.0 - 0.5)).abs() < 1e-9);
    }

    #[test]
    fn general_solver_matches_closed_capacity() {
        let pair = fig1();
        for p_t in [0.1, 1.0, 5.0, 28.0, 40.0] {
            let sol = solve_weak(&pair, p_t, &WeakSolveConfig::default()).unwrap();
            let direct = weak_rate(&pair, &sol.covariance).unwrap();
            assert!((direct - sol.capacity_nats).abs() < 1e-10, "P_T={p_t}");
            assert!((sol.power_used - p_t.min(28.5)).abs() < 1e-9 * p_t.max(1.0));
        }
    }

    #[test]
    fn fig1_saturation_values() {
        let (exact, weak) = saturation_capacities(&fig1()).unwrap();
        assert!((exact - 200.0_f64.ln()).abs() < 1e-12);
        assert!((weak - (200.0_f64.ln() - 1.8)).abs() < 1e-12);
        let sol = solve_weak(&fig1(), 285.0, &WeakSolveConfig::default()).unwrap();
        assert!((sol.capacity_nats - weak).abs() < 1e-6);
    }

    #[test]
    fn saturation_needs_ordering() {
        let scaled = ChannelPair::from_gram(
            HermitianMatrix::identity(2).scale(std::f64::consts::E),
            HermitianMatrix::identity(2),
        )
        .unwrap();
        assert!((saturation_capacities(&scaled).unwrap().0 - 2.0).abs() < 1e-12);
        let bad = ChannelPair::from_diagonals(&[2.0, 1.0], &[0.1, 0.0]).unwrap();
        assert!(matches!(saturation_capacities(&bad), Err(WiretapError::NotApplicable(_))));
    }

    #[test]
    fn kkt_holds_at_solution_and_fails_after_perturbation() {
        let pair = fig1();
        let p_t = 0.3;
        let sol = solve_weak(&pair, p_t, &WeakSolveConfig::default()).unwrap();
        assert_eq!(sol.active_modes, 1);
        let rep = kkt_residual_weak(&pair, &sol.covariance, sol.lagrange_lambda, p_t).unwrap();
        assert!(rep.satisfied(1e-8), "{rep:?}");

        let v = weakest_direction(&sol.covariance);
        let bump = HermitianMatrix::new(&v * v.adjoint()).unwrap().scale(0.1);
        let perturbed = sol.covariance.add(&bump);
        let rep = kkt_residual_weak(&pair, &perturbed, sol.lagrange_lambda, p_t).unwrap();
        assert!(rep.complementarity > 1e-3, "{rep:?}");
    }

    #[test]
    fn kkt_null_solution_edge() {
        let pair = ChannelPair::from_diagonals(&[2.0, 1.0], &[0.0, 0.0]).unwrap();
        let rep = kkt_residual_weak(&pair, &HermitianMatrix::zeros(2), 2.0, 0.0).unwrap();
        assert_eq!(rep.stationarity, 0.0);
        assert_eq!(rep.max_residual(), 0.0);
    }

    #[test]
    fn rejects_non_positive_power() {
        assert!(solve_weak(&fig1(), 0.0, &WeakSolveConfig::default()).is_err());
    }

    #[test]
    fn bounds_are_exact_without_eavesdropper() {
        let pair = ChannelPair::from_diagonals(&[2.0, 1.0], &[0.0, 0.0]).unwrap();
        let b = capacity_bounds_weak(&pair, 1.5, &WeakSolveConfig::default()).unwrap();
        assert_eq!(b.gap_bound_nats, 0.0);
        assert!((b.lower_nats - b.upper_nats).abs() < 1e-12);
        assert!((b.mid_nats - b.lower_nats).abs() < 1e-10);
    }

    #[test]
    fn fig1_gap_bound() {
        let b = capacity_bounds_weak(&fig1(), 1.0, &WeakSolveConfig::default()).unwrap();
        let top = 0.1 * (1.5 + 1.25_f64.sqrt());
        assert!((b.gap_bound_nats - 0.5 * top * top).abs() < 1e-12);
        assert!((b.gap_bound_nats - 0.0343).abs() < 1e-4);
        assert!(b.is_consistent(1e-9));
    }
}
