//! Secrecy-rate objectives and small scalar helpers.

use crate::channel::ChannelPair;
use crate::error::{Result, WiretapError};
use crate::matrix::{hermitian_eigen, HermitianMatrix};

/// `ln|I + W R|` for PSD `W`, `R`, evaluated as `ln|I + R^{1/2} W R^{1/2}|`.
pub fn log_det_i_plus(w: &HermitianMatrix, r: &HermitianMatrix) -> f64 {
    let s = r.sqrt();
    let inner = s.as_matrix() * w.as_matrix() * s.as_matrix();
    hermitian_eigen(&inner).eigenvalues.iter().map(|&v| v.max(0.0).ln_1p()).sum()
}

/// Signed secrecy rate `ln|I + W1 R| - ln|I + W2 R|` in nats.
pub fn secrecy_rate(pair: &ChannelPair, r: &HermitianMatrix) -> Result<f64> {
    pair.check_covariance(r)?;
    Ok(log_det_i_plus(pair.w1(), r) - log_det_i_plus(pair.w2(), r))
}

/// Weak-eavesdropper objective `ln|I + W1 R| - tr(W2 R)` in nats.
pub fn weak_rate(pair: &ChannelPair, r: &HermitianMatrix) -> Result<f64> {
    pair.check_covariance(r)?;
    Ok(log_det_i_plus(pair.w1(), r) - pair.w2().trace_product(r))
}

/// Negative rates are zero secrecy rate.
pub fn clamp_rate(rate: f64) -> f64 {
    rate.max(0.0)
}

/// Isotropic bound on the eavesdropper gain from a minimum protection
/// distance: `alpha * n2 * m * r_min^(-nu)`.
pub fn epsilon_from_pathloss(alpha: f64, n2: f64, m: f64, r_min: f64, nu: f64) -> Result<f64> {
    for (name, value) in [("alpha", alpha), ("n2", n2), ("m", m), ("r_min", r_min), ("nu", nu)] {
        if !(value > 0.0) || !value.is_finite() {
            return Err(WiretapError::NonPositive { name, value });
        }
    }
    Ok(alpha * n2 * m * r_min.powf(-nu))
}

pub fn nats_to_bits(nats: f64) -> f64 {
    nats / std::f64::consts::LN_2
}
