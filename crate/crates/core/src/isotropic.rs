//! Secrecy capacity under an isotropic eavesdropper `W2 = εI`.
//!
//! Signalling is on the eigenvectors of `W1`; only the power allocation
//! depends on `ε`. Each eigenmode `i` with gain `g_i` receives
//!
//! ```text
//! p_i(λ) = (ε+g)/(2εg) · ( sqrt(1 + 4εg/(ε+g)² · ((g-ε)/λ - 1)_+) - 1 )
//! ```
//!
//! and `λ` is fixed by `Σ p_i = P_T`. The same per-mode law, with `ε`
//! replaced by a per-mode eavesdropper gain, serves parallel channels.

use crate::channel::ChannelPair;
use crate::error::{Result, WiretapError};
use crate::matrix::{CMatrix, HermitianMatrix};
use crate::search::MultiplierSearch;
use crate::solution::{CapacityBounds, SolveResult, SolveStatus};

/// Gains of `W1` (descending), eavesdropper gain and power budget.
#[derive(Debug, Clone, PartialEq)]
pub struct IsotropicProblem {
    gains: Vec<f64>,
    epsilon: f64,
    p_t: f64,
}

impl IsotropicProblem {
    /// `epsilon = 0` selects the standard water-filling limit.
    pub fn new(gains: &[f64], epsilon: f64, p_t: f64) -> Result<Self> {
        if gains.is_empty() {
            return Err(WiretapError::InvalidInput("no eigenmode gains".into()));
        }
        if gains.iter().any(|g| !(*g >= 0.0) || !g.is_finite()) {
            return Err(WiretapError::InvalidInput("gains must be finite and non-negative".into()));
        }
        if !(epsilon >= 0.0) || !epsilon.is_finite() {
            return Err(WiretapError::InvalidInput(format!("epsilon must be >= 0, got {epsilon}")));
        }
        if !(p_t > 0.0) || !p_t.is_finite() {
            return Err(WiretapError::NonPositive { name: "P_T", value: p_t });
        }
        let mut gains = gains.to_vec();
        gains.sort_by(|a, b| b.total_cmp(a));
        Ok(Self { gains, epsilon, p_t })
    }

    pub fn gains(&self) -> &[f64] {
        &self.gains
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    pub fn p_t(&self) -> f64 {
        self.p_t
    }

    pub fn with_power(&self, p_t: f64) -> Result<Self> {
        Self::new(&self.gains, self.epsilon, p_t)
    }
}

/// Optimal power of one eigenmode at multiplier `lambda`.
///
/// Written as `2x / ((ε+g)(sqrt(1+Bx)+1))` with `x = ((g-ε)/λ - 1)_+` and
/// `B = 4εg/(ε+g)²`, which is the closed form with the cancellation removed
/// and reduces to `(1/λ - 1/g)_+` at `ε = 0`.
pub fn mode_power(gain: f64, eps: f64, lambda: f64) -> f64 {
    let x = ((gain - eps) / lambda - 1.0).max(0.0);
    if x == 0.0 {
        return 0.0;
    }
    let s = eps + gain;
    let b = 4.0 * eps * gain / (s * s);
    2.0 * x / (s * ((1.0 + b * x).sqrt() + 1.0))
}

/// `ln((1 + g p)/(1 + ε p))`.
pub fn mode_rate(gain: f64, eps: f64, power: f64) -> f64 {
    (gain * power).ln_1p() - (eps * power).ln_1p()
}

/// Solves a set of parallel modes with per-mode eavesdropper gains. Powers
/// are returned in input order.
pub(crate) fn solve_parallel(
    gains: &[f64],
    eve: &[f64],
    p_t: f64,
    search: &MultiplierSearch,
) -> Result<(Vec<f64>, f64)> {
    let hi = gains.iter().zip(eve).map(|(g, e)| g - e).fold(0.0_f64, f64::max);
    if hi <= 0.0 {
        return Ok((vec![0.0; gains.len()], 0.0));
    }
    let total = |lambda: f64| -> f64 { gains.iter().zip(eve).map(|(&g, &e)| mode_power(g, e, lambda)).sum() };
    let mult = search.solve(total, hi, p_t)?;
    let powers = gains.iter().zip(eve).map(|(&g, &e)| mode_power(g, e, mult.lambda)).collect();
    Ok((powers, mult.lambda))
}

fn finish(powers: Vec<f64>, lambda: f64, capacity: f64, covariance: HermitianMatrix) -> SolveResult {
    let active = powers.iter().filter(|&&p| p > 0.0).count();
    let status = if active == 0 { SolveStatus::ZeroRate } else { SolveStatus::Solved };
    SolveResult {
        covariance,
        capacity_nats: capacity.max(0.0),
        lagrange_lambda: lambda,
        active_modes: active,
        power_used: powers.iter().sum(),
        status,
        mode_powers: powers,
    }
}

/// Optimal allocation for the isotropic eavesdropper. The covariance is
/// `diag(λ*)`, i.e. expressed in the eigenbasis of `W1`.
pub fn solve_isotropic(p: &IsotropicProblem, search: &MultiplierSearch) -> Result<SolveResult> {
    let eve = vec![p.epsilon; p.gains.len()];
    let (powers, lambda) = solve_parallel(&p.gains, &eve, p.p_t, search)?;
    let capacity = powers.iter().zip(&p.gains).map(|(&q, &g)| mode_rate(g, p.epsilon, q)).sum();
    let cov = HermitianMatrix::from_diagonal(&powers);
    Ok(finish(powers, lambda, capacity, cov))
}

/// As [`solve_isotropic`] but with the covariance rotated into `basis`
/// (columns = eigenvectors of `W1`, ordered by decreasing eigenvalue).
pub fn solve_isotropic_in_basis(
    p: &IsotropicProblem,
    basis: &CMatrix,
    search: &MultiplierSearch,
) -> Result<SolveResult> {
    let mut res = solve_isotropic(p, search)?;
    res.covariance = HermitianMatrix::from_spectrum(basis, &res.mode_powers)?;
    Ok(res)
}

/// Threshold powers `P_k`, `k = 1..m`: at least `k` modes are active once
/// `P_T > P_k`. `P_1 = 0`; entries are `+∞` once `g_k <= ε`.
pub fn threshold_powers(gains: &[f64], epsilon: f64) -> Vec<f64> {
    let mut g = gains.to_vec();
    g.sort_by(|a, b| b.total_cmp(a));
    (0..g.len())
        .map(|k| {
            if k == 0 {
                return if g[0] > epsilon { 0.0 } else { f64::INFINITY };
            }
            let level = g[k] - epsilon;
            if level <= 0.0 {
                return f64::INFINITY;
            }
            g[..k].iter().map(|&gi| mode_power(gi, epsilon, level)).sum()
        })
        .collect()
}

/// Beamforming threshold: a single mode is active for `P_T` up to this
/// value (`+∞` when `g_2 <= ε` or `m = 1`).
pub fn beamforming_threshold(gains: &[f64], epsilon: f64) -> f64 {
    threshold_powers(gains, epsilon).get(1).copied().unwrap_or(f64::INFINITY)
}

/// Bounds from the extreme eigenvalues of `W2`:
/// `C*(ε_1) <= C_s <= C*(ε_m)`.
#[derive(Debug, Clone)]
pub struct IsotropicBounds {
    pub bounds: CapacityBounds,
    pub eps_max: f64,
    pub eps_min: f64,
    /// Achieves at least `lower_nats` on the actual channel.
    pub lower_solution: SolveResult,
    pub upper_solution: SolveResult,
}

pub fn capacity_bounds_isotropic(
    pair: &ChannelPair,
    p_t: f64,
    search: &MultiplierSearch,
) -> Result<CapacityBounds> {
    isotropic_bounds_detail(pair, p_t, search).map(|d| d.bounds)
}

pub fn isotropic_bounds_detail(
    pair: &ChannelPair,
    p_t: f64,
    search: &MultiplierSearch,
) -> Result<IsotropicBounds> {
    if pair.w2().is_zero() {
        return Err(WiretapError::NotApplicable("isotropic bounds need W2 != 0".into()));
    }
    let eig2 = pair.w2().eigen();
    let thr = eig2.zero_threshold(pair.rank_tol());
    let eps_max = eig2.eigenvalues[0];
    let eps_min = {
        let v = *eig2.eigenvalues.last().expect("non-empty");
        if v.abs() <= thr {
            0.0
        } else {
            v.max(0.0)
        }
    };
    let eig1 = pair.w1().eigen();
    let gains: Vec<f64> = eig1.eigenvalues.iter().map(|&g| g.max(0.0)).collect();

    let lower =
        solve_isotropic_in_basis(&IsotropicProblem::new(&gains, eps_max, p_t)?, &eig1.eigenvectors, search)?;
    let upper =
        solve_isotropic_in_basis(&IsotropicProblem::new(&gains, eps_min, p_t)?, &eig1.eigenvectors, search)?;

    let m_plus = gains.iter().filter(|&&g| g > eps_min).count();
    let gap_bound = if m_plus == 0 {
        0.0
    } else {
        let mp = m_plus as f64;
        let finite_snr = mp * ((1.0 + eps_max * p_t / mp) / (1.0 + eps_min * p_t / mp)).ln();
        let condition = if eps_min > 0.0 { mp * (eps_max / eps_min).ln() } else { f64::INFINITY };
        finite_snr.min(condition)
    };
    let (lo, hi) = (lower.capacity_nats, upper.capacity_nats);
    Ok(IsotropicBounds {
        bounds: CapacityBounds {
            lower_nats: lo,
            mid_nats: 0.5 * (lo + hi),
            upper_nats: hi,
            gap_bound_nats: gap_bound,
        },
        eps_max,
        eps_min,
        lower_solution: lower,
        upper_solution: upper,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SnrRegime {
    HighSnr,
    HighSnrRefined,
    LowSnr,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AsymptoticReport {
    pub value_nats: f64,
    /// `Σ_{g_i > ε} sqrt(1/ε - 1/g_i)`; `None` when `ε = 0`.
    pub beta: Option<f64>,
    /// `P_T · C*_∞ / β²`; saturation sets in when this is large.
    pub saturation_ratio: Option<f64>,
    pub beamforming_threshold: f64,
    /// `P_T` does not exceed the beamforming threshold.
    pub single_mode: bool,
}

pub fn high_snr_limit(gains: &[f64], eps: f64) -> f64 {
    gains.iter().filter(|&&g| g > eps).map(|&g| (g / eps).ln()).sum()
}

fn beta(gains: &[f64], eps: f64) -> f64 {
    gains.iter().filter(|&&g| g > eps).map(|&g| (1.0 / eps - 1.0 / g).sqrt()).sum()
}

pub fn asymptotic_capacity(p: &IsotropicProblem, regime: SnrRegime) -> Result<AsymptoticReport> {
    let (g, eps, p_t) = (&p.gains, p.epsilon, p.p_t);
    let bf = beamforming_threshold(g, eps);
    let (beta_val, ratio) = if eps > 0.0 && g[0] > eps {
        let b = beta(g, eps);
        (Some(b), Some(p_t * high_snr_limit(g, eps) / (b * b)))
    } else {
        (None, None)
    };
    let value = match regime {
        SnrRegime::HighSnr | SnrRegime::HighSnrRefined => {
            if eps <= 0.0 {
                return Err(WiretapError::NotApplicable(
                    "high-SNR saturation limit needs epsilon > 0".into(),
                ));
            }
            if g[0] <= eps {
                return Err(WiretapError::NotApplicable("no eigenmode is stronger than epsilon".into()));
            }
            let limit = high_snr_limit(g, eps);
            if regime == SnrRegime::HighSnr {
                limit
            } else {
                let b = beta_val.expect("eps > 0 and g1 > eps");
                limit - b * b / p_t
            }
        }
        SnrRegime::LowSnr => {
            if g[0] <= eps {
                return Err(WiretapError::NotApplicable("low-SNR form needs g1 > epsilon".into()));
            }
            mode_rate(g[0], eps, p_t)
        }
    };
    Ok(AsymptoticReport {
        value_nats: value,
        beta: beta_val,
        saturation_ratio: ratio,
        beamforming_threshold: bf,
        single_mode: p_t <= bf,
    })
}

pub const DEFAULT_NEGLIGIBILITY_THRESHOLD: f64 = 0.1;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NegligibilityReport {
    /// `ε · P_T`.
    pub snr_margin: f64,
    /// `max ε/g_i` over active modes.
    pub gain_margin: f64,
    /// Both margins are below the threshold.
    pub negligible: bool,
}

pub fn negligibility_margins(
    p: &IsotropicProblem,
    threshold: f64,
    search: &MultiplierSearch,
) -> Result<NegligibilityReport> {
    let sol = solve_isotropic(p, search)?;
    let snr_margin = p.epsilon * p.p_t;
    let gain_margin = sol
        .mode_powers
        .iter()
        .zip(&p.gains)
        .filter(|(&q, _)| q > 0.0)
        .map(|(_, &g)| p.epsilon / g)
        .fold(0.0_f64, f64::max);
    Ok(NegligibilityReport {
        snr_margin,
        gain_margin,
        negligible: snr_margin < threshold && gain_margin < threshold,
    })
}
