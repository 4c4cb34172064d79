//! Scalar multiplier searches shared by the power-allocation solvers.

use crate::error::{Result, WiretapError};

/// Stopping rule for the Lagrange-multiplier bisection.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MultiplierSearch {
    /// Accept when `|power(λ) - target| <= power_tol * max(1, target)`.
    pub power_tol: f64,
    pub max_iters: usize,
}

impl Default for MultiplierSearch {
    fn default() -> Self {
        Self { power_tol: 1e-12, max_iters: 200 }
    }
}

impl MultiplierSearch {
    pub fn validate(&self) -> Result<()> {
        if !(self.power_tol > 0.0) {
            return Err(WiretapError::NonPositive { name: "power_tol", value: self.power_tol });
        }
        if self.max_iters == 0 {
            return Err(WiretapError::InvalidInput("max_iters must be at least 1".into()));
        }
        Ok(())
    }

    /// Finds `λ ∈ (0, hi]` with `power(λ) = target` for a power curve that
    /// is non-increasing in `λ` and satisfies `power(hi) <= target`.
    ///
    /// The lower end of the bracket is found by halving from `hi`, so the
    /// search never needs an a-priori lower bound on `λ`.
    pub fn solve(&self, power: impl Fn(f64) -> f64, hi: f64, target: f64) -> Result<Multiplier> {
        self.validate()?;
        let tol = self.power_tol * target.max(1.0);
        let mut hi = hi;
        let mut best = Multiplier { lambda: hi, power: power(hi) };
        if (best.power - target).abs() <= tol {
            return Ok(best);
        }

        let mut lo = hi;
        let mut lo_power;
        let mut halvings = 0;
        loop {
            lo *= 0.5;
            halvings += 1;
            lo_power = power(lo);
            if (lo_power - target).abs() < (best.power - target).abs() {
                best = Multiplier { lambda: lo, power: lo_power };
            }
            if (lo_power - target).abs() <= tol {
                return Ok(best);
            }
            if lo_power > target {
                break;
            }
            hi = lo;
            if lo < f64::MIN_POSITIVE || halvings > 2100 {
                return Err(WiretapError::NonConvergence {
                    iterations: halvings,
                    residual: (lo_power - target).abs(),
                });
            }
        }

        for _ in 0..self.max_iters {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                // Bracket collapsed to adjacent floats.
                return Ok(best);
            }
            let p = power(mid);
            if (p - target).abs() < (best.power - target).abs() {
                best = Multiplier { lambda: mid, power: p };
            }
            if (p - target).abs() <= tol {
                return Ok(best);
            }
            if p > target {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        Err(WiretapError::NonConvergence {
            iterations: self.max_iters,
            residual: (best.power - target).abs(),
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Multiplier {
    pub lambda: f64,
    pub power: f64,
}

/// Standard water-filling `p_i = (1/λ - 1/g_i)_+` with `Σ p_i = total`.
///
/// Returns the powers (same order as `gains`) and the water level `λ`;
/// `None` when no gain is positive.
pub fn water_fill(gains: &[f64], total: f64) -> Option<(Vec<f64>, f64)> {
    let mut order: Vec<usize> = (0..gains.len()).filter(|&i| gains[i] > 0.0).collect();
    if order.is_empty() || !(total > 0.0) {
        return None;
    }
    order.sort_by(|&a, &b| gains[b].total_cmp(&gains[a]));

    let mut inv_sum = 0.0;
    let mut level = 0.0;
    for (k, &idx) in order.iter().enumerate() {
        inv_sum += 1.0 / gains[idx];
        let candidate = (total + inv_sum) / (k + 1) as f64;
        let next_inv = order.get(k + 1).map(|&j| 1.0 / gains[j]);
        level = candidate;
        if next_inv.is_none_or(|inv| candidate <= inv) {
            break;
        }
    }
    let powers = gains.iter().map(|&g| if g > 0.0 { (level - 1.0 / g).max(0.0) } else { 0.0 }).collect();
    Some((powers, 1.0 / level))
}
