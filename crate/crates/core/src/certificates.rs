//! Optimality certificates for zero-forcing, standard water-filling and
//! isotropic signaling, plus general KKT residuals for the exact problem.

use num_complex::Complex64;

use crate::channel::ChannelPair;
use crate::error::{Result, WiretapError};
use crate::matrix::{hermitian_eigen, unitarity_defect, CMatrix, HermitianMatrix};
use crate::rate::secrecy_rate;
use crate::rsv::{detect_common_rsv, CommonBasisChannel, DEFAULT_COMMUTE_TOL};
use crate::search::water_fill;
use crate::weak::{kkt_report, KktReport};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    SufficientHolds,
    NecessaryFails,
    Inconclusive,
}

impl Verdict {
    pub fn as_str(&self) -> &'static str {
        match self {
            Verdict::SufficientHolds => "sufficient_holds",
            Verdict::NecessaryFails => "necessary_fails",
            Verdict::Inconclusive => "inconclusive",
        }
    }
}

/// One checked condition; `margin >= 0` when it holds.
#[derive(Debug, Clone, PartialEq)]
pub struct ConditionCheck {
    pub name: &'static str,
    pub holds: bool,
    pub margin: f64,
}

impl ConditionCheck {
    fn new(name: &'static str, holds: bool, margin: f64) -> Self {
        Self { name, holds, margin }
    }
}

#[derive(Debug, Clone)]
pub struct CertificateReport {
    pub verdict: Verdict,
    pub details: Vec<ConditionCheck>,
    pub certified_covariance: Option<HermitianMatrix>,
    pub certified_capacity: Option<f64>,
    /// Power multiplier of the certified point: the water level for ZF,
    /// `λ'` of the exact KKT system for WF and IS.
    pub multiplier: Option<f64>,
    /// ZF only: the eavesdropper receives nothing, so no wiretap code is needed.
    pub regular_coding_suffices: bool,
}

impl CertificateReport {
    fn rejected(verdict: Verdict, details: Vec<ConditionCheck>) -> Self {
        Self {
            verdict,
            details,
            certified_covariance: None,
            certified_capacity: None,
            multiplier: None,
            regular_coding_suffices: false,
        }
    }

    pub fn holds(&self) -> bool {
        self.verdict == Verdict::SufficientHolds
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CertifyConfig {
    pub commute_tol: f64,
    /// Relative tolerance on the consistency of `α` (WF) and `λ` (IS).
    pub consistency_tol: f64,
}

impl Default for CertifyConfig {
    fn default() -> Self {
        Self { commute_tol: DEFAULT_COMMUTE_TOL, consistency_tol: 1e-8 }
    }
}

fn check_power(p_t: f64) -> Result<()> {
    if !(p_t > 0.0) || !p_t.is_finite() {
        return Err(WiretapError::NonPositive { name: "P_T", value: p_t });
    }
    Ok(())
}

fn shared_basis(
    pair: &ChannelPair,
    cfg: &CertifyConfig,
    details: &mut Vec<ConditionCheck>,
) -> Option<CommonBasisChannel> {
    match detect_common_rsv(pair, cfg.commute_tol) {
        Ok(ch) => {
            details.push(ConditionCheck::new("shared_eigenvectors", true, 0.0));
            Some(ch)
        }
        Err(e) => {
            details.push(ConditionCheck::new("shared_eigenvectors", false, e.allowed - e.commutator_norm));
            None
        }
    }
}

/// Spread `(max - min) / |mean|`, or `∞` for an empty slice.
fn relative_spread(v: &[f64]) -> (f64, f64) {
    if v.is_empty() {
        return (f64::INFINITY, 0.0);
    }
    let mean = v.iter().sum::<f64>() / v.len() as f64;
    let (lo, hi) = v.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &x| (a.min(x), b.max(x)));
    ((hi - lo) / mean.abs(), mean)
}

/// Zero-forcing: water-filling over the null modes of `W2` is optimal when
/// the channels share eigenvectors and `λ_1i <= λ_2i + λ` on every mode the
/// eavesdropper sees.
pub fn zf_certify(pair: &ChannelPair, p_t: f64, cfg: &CertifyConfig) -> Result<CertificateReport> {
    check_power(p_t)?;
    let mut details = Vec::new();
    let w2_eig = pair.w2().eigen();
    let w2_min = *w2_eig.eigenvalues.last().expect("non-empty");
    let has_null = w2_min <= w2_eig.zero_threshold(pair.rank_tol());
    details.push(ConditionCheck::new("eavesdropper_null_space", has_null, -w2_min));
    if !has_null {
        return Ok(CertificateReport::rejected(Verdict::NecessaryFails, details));
    }
    let Some(ch) = shared_basis(pair, cfg, &mut details) else {
        return Ok(CertificateReport::rejected(Verdict::Inconclusive, details));
    };

    let (l1, l2) = (ch.lam1(), ch.lam2());
    let null_gains: Vec<f64> = l1.iter().zip(l2).map(|(&a, &b)| if b == 0.0 { a } else { 0.0 }).collect();
    let Some((powers, lambda)) = water_fill(&null_gains, p_t) else {
        details.push(ConditionCheck::new("null_mode_gain", false, 0.0));
        return Ok(CertificateReport::rejected(Verdict::NecessaryFails, details));
    };
    details.push(ConditionCheck::new("null_mode_gain", true, lambda));

    let scale = l1.iter().chain(l2).fold(0.0_f64, |a, v| a.max(*v));
    let margin = l1
        .iter()
        .zip(l2)
        .filter(|(_, &b)| b > 0.0)
        .map(|(&a, &b)| b + lambda - a)
        .fold(f64::INFINITY, f64::min);
    let leak_ok = margin >= -1e-12 * scale.max(1.0);
    details.push(ConditionCheck::new("leakage_unprofitable", leak_ok, margin));
    if !leak_ok {
        return Ok(CertificateReport::rejected(Verdict::Inconclusive, details));
    }

    let r = ch.covariance(&powers)?;
    let leak = (pair.w2().as_matrix() * r.as_matrix()).norm();
    let leak_allowed = 1e-10 * (pair.w2().norm() * r.norm()).max(1.0);
    details.push(ConditionCheck::new(
        "orthogonal_to_eavesdropper",
        leak <= leak_allowed,
        leak_allowed - leak,
    ));
    if leak > leak_allowed {
        return Ok(CertificateReport::rejected(Verdict::Inconclusive, details));
    }
    let capacity = powers.iter().zip(l1).filter(|(&p, _)| p > 0.0).map(|(_, &a)| (a / lambda).ln()).sum();
    Ok(CertificateReport {
        verdict: Verdict::SufficientHolds,
        details,
        certified_covariance: Some(r),
        certified_capacity: Some(capacity),
        multiplier: Some(lambda),
        regular_coding_suffices: true,
    })
}

/// Residuals of the zero-forcing necessary conditions for a given `R`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ZfNecessityReport {
    pub active: usize,
    /// `‖W2 U_a‖_F` over active eigenvectors `U_a` of `R`.
    pub eavesdropper_leak: f64,
    /// `‖(I - U_a U_a†) W1 U_a‖_F`: active directions are eigenvectors of `W1`.
    pub invariance_residual: f64,
    /// Departure of the active powers from `1/λ - 1/λ_1i`.
    pub allocation_residual: f64,
    /// Water level implied by the active powers.
    pub implied_lambda: f64,
}

impl ZfNecessityReport {
    pub fn holds(&self, tol: f64) -> bool {
        self.active > 0
            && self.eavesdropper_leak <= tol
            && self.invariance_residual <= tol
            && self.allocation_residual <= tol
            && self.implied_lambda > 0.0
    }
}

pub fn zf_necessity_check(pair: &ChannelPair, r: &HermitianMatrix) -> Result<ZfNecessityReport> {
    pair.check_covariance(r)?;
    let eig = r.eigen();
    let thr = eig.zero_threshold(pair.rank_tol());
    let idx: Vec<usize> = (0..eig.dim()).filter(|&i| eig.eigenvalues[i] > thr).collect();
    let active = idx.len();
    if active == 0 {
        return Ok(ZfNecessityReport {
            active,
            eavesdropper_leak: 0.0,
            invariance_residual: 0.0,
            allocation_residual: 0.0,
            implied_lambda: 0.0,
        });
    }
    let m = pair.m();
    let ua = CMatrix::from_fn(m, active, |row, c| eig.eigenvectors[(row, idx[c])]);
    let w1 = pair.w1().as_matrix();
    let eavesdropper_leak = (pair.w2().as_matrix() * &ua).norm();
    let w1u = w1 * &ua;
    let invariance_residual = (&w1u - &ua * (ua.adjoint() * &w1u)).norm();

    // Λ + B^{-1} must equal (1/λ) I with B = U_a† W1 U_a ≻ 0.
    let b = HermitianMatrix::new(ua.adjoint() * &w1u)?;
    if b.min_eigenvalue() <= 0.0 {
        return Ok(ZfNecessityReport {
            active,
            eavesdropper_leak,
            invariance_residual,
            allocation_residual: f64::INFINITY,
            implied_lambda: 0.0,
        });
    }
    let binv = b.pinv();
    let lam = CMatrix::from_diagonal(&nalgebra::DVector::from_iterator(
        active,
        idx.iter().map(|&i| Complex64::new(eig.eigenvalues[i], 0.0)),
    ));
    let sum = lam + binv.as_matrix();
    let level = sum.trace().re / active as f64;
    let mut dev = sum;
    for i in 0..active {
        dev[(i, i)] -= Complex64::new(level, 0.0);
    }
    Ok(ZfNecessityReport {
        active,
        eavesdropper_leak,
        invariance_residual,
        allocation_residual: dev.norm(),
        implied_lambda: 1.0 / level,
    })
}

/// Standard water-filling on `W1` is optimal when the channels share
/// eigenvectors and `1/λ_2i = 1/λ_1i + α` with one `α > 0` on active modes,
/// inactive modes obeying the same relation or `λ_1i <= λ_2i`.
pub fn wf_certify(pair: &ChannelPair, p_t: f64, cfg: &CertifyConfig) -> Result<CertificateReport> {
    check_power(p_t)?;
    let mut details = Vec::new();
    let Some(ch) = shared_basis(pair, cfg, &mut details) else {
        return Ok(CertificateReport::rejected(Verdict::Inconclusive, details));
    };
    let (l1, l2) = (ch.lam1(), ch.lam2());
    let Some((powers, lambda)) = water_fill(l1, p_t) else {
        details.push(ConditionCheck::new("legitimate_gain", false, 0.0));
        return Ok(CertificateReport::rejected(Verdict::Inconclusive, details));
    };

    let active: Vec<usize> = (0..ch.m()).filter(|&i| powers[i] > 0.0).collect();
    let visible = active.iter().all(|&i| l2[i] > 0.0);
    details.push(ConditionCheck::new("eavesdropper_sees_active_modes", visible, 0.0));
    if !visible {
        return Ok(CertificateReport::rejected(Verdict::Inconclusive, details));
    }
    let alphas: Vec<f64> = active.iter().map(|&i| 1.0 / l2[i] - 1.0 / l1[i]).collect();
    let (spread, alpha) = relative_spread(&alphas);
    let consistent = alphas.iter().all(|&a| a > 0.0) && spread <= cfg.consistency_tol;
    details.push(ConditionCheck::new("common_alpha", consistent, cfg.consistency_tol - spread));
    if !consistent {
        return Ok(CertificateReport::rejected(Verdict::Inconclusive, details));
    }

    let inactive_ok = (0..ch.m()).filter(|&i| powers[i] == 0.0).all(|i| {
        let (a, b) = (l1[i], l2[i]);
        a <= b || (b > 0.0 && ((1.0 / b - 1.0 / a) - alpha).abs() <= cfg.consistency_tol * alpha)
    });
    details.push(ConditionCheck::new("inactive_modes", inactive_ok, 0.0));
    if !inactive_ok {
        return Ok(CertificateReport::rejected(Verdict::Inconclusive, details));
    }

    let r = ch.covariance(&powers)?;
    let capacity = secrecy_rate(pair, &r)?.max(0.0);
    Ok(CertificateReport {
        verdict: Verdict::SufficientHolds,
        details,
        certified_covariance: Some(r),
        certified_capacity: Some(capacity),
        multiplier: Some(alpha * lambda * lambda / (1.0 + alpha * lambda)),
        regular_coding_suffices: false,
    })
}

/// Channel pair with eigenvalues `λ_2i = λ_1i / (1 + α λ_1i)` in `basis`,
/// for which water-filling on `W1` is optimal at any power.
pub fn construct_wf_optimal_channel(lam1: &[f64], alpha: f64, basis: &CMatrix) -> Result<ChannelPair> {
    if !(alpha > 0.0) || !alpha.is_finite() {
        return Err(WiretapError::NonPositive { name: "alpha", value: alpha });
    }
    let lam2: Vec<f64> = lam1.iter().map(|&a| a / (1.0 + alpha * a)).collect();
    ChannelPair::from_gram(
        HermitianMatrix::from_spectrum(basis, lam1)?,
        HermitianMatrix::from_spectrum(basis, &lam2)?,
    )
}

/// Builds `W1 = U diag(1/a_i) U†`, `W2 = U diag(1/b_i) U†` for which
/// `R = (P_T/m) I` is optimal. `b_rest` holds `b_2, ..., b_m`.
pub fn construct_is_optimal_channel(
    m: usize,
    p_t: f64,
    b1: f64,
    a1: f64,
    b_rest: &[f64],
    basis: &CMatrix,
) -> Result<ChannelPair> {
    check_power(p_t)?;
    if m == 0 || b_rest.len() + 1 != m {
        return Err(WiretapError::DimensionMismatch { expected: m.saturating_sub(1), found: b_rest.len() });
    }
    if basis.nrows() != m || basis.ncols() != m {
        return Err(WiretapError::DimensionMismatch { expected: m, found: basis.nrows() });
    }
    let defect = unitarity_defect(basis);
    if defect > 1e-10 {
        return Err(WiretapError::InvalidInput(format!("basis is not unitary (defect {defect:.2e})")));
    }
    if !(b1 > 0.0) || !b1.is_finite() {
        return Err(WiretapError::NonPositive { name: "b1", value: b1 });
    }
    if !(a1 > 0.0) || !(a1 < b1) {
        return Err(WiretapError::InvalidInput(format!("need 0 < a1 < b1, got a1 = {a1}, b1 = {b1}")));
    }
    let a = p_t / m as f64;
    let lambda = 1.0 / (a1 + a) - 1.0 / (b1 + a);
    if !(lambda > 0.0) {
        return Err(WiretapError::InvalidInput(format!("lambda = {lambda} must be positive")));
    }
    let floor = lambda * a * a / (1.0 - lambda * a);
    let mut a_vals = vec![a1];
    let mut b_vals = vec![b1];
    for (k, &b) in b_rest.iter().enumerate() {
        if !(b > floor) || !b.is_finite() {
            return Err(WiretapError::InvalidInput(format!(
                "b_{} = {b} violates b_i > lambda a^2 / (1 - lambda a) = {floor}",
                k + 2
            )));
        }
        let ai = -a + 1.0 / (lambda + 1.0 / (b + a));
        if !(ai > 0.0) {
            return Err(WiretapError::InvalidInput(format!("a_{} = {ai} is not positive", k + 2)));
        }
        a_vals.push(ai);
        b_vals.push(b);
    }
    let l1: Vec<f64> = a_vals.iter().map(|v| 1.0 / v).collect();
    let l2: Vec<f64> = b_vals.iter().map(|v| 1.0 / v).collect();
    ChannelPair::from_gram(
        HermitianMatrix::from_spectrum(basis, &l1)?,
        HermitianMatrix::from_spectrum(basis, &l2)?,
    )
}

/// Isotropic signaling `R = (P_T/m) I` is optimal when the channels share
/// eigenvectors, `W1 ≻ W2`, and `λ_1i/(1+λ_1i a) - λ_2i/(1+λ_2i a)` is the
/// same positive value on every mode.
pub fn is_certify(pair: &ChannelPair, p_t: f64, cfg: &CertifyConfig) -> Result<CertificateReport> {
    check_power(p_t)?;
    let mut details = Vec::new();
    let Some(ch) = shared_basis(pair, cfg, &mut details) else {
        return Ok(CertificateReport::rejected(Verdict::Inconclusive, details));
    };
    let (l1, l2) = (ch.lam1(), ch.lam2());
    let diff_min = pair.w1().sub(pair.w2()).min_eigenvalue();
    let ordered = l2.iter().all(|&b| b > 0.0) && diff_min > 0.0;
    details.push(ConditionCheck::new("legitimate_dominates", ordered, diff_min));
    if !ordered {
        return Ok(CertificateReport::rejected(Verdict::Inconclusive, details));
    }
    let m = ch.m();
    let a = p_t / m as f64;
    let lambdas: Vec<f64> = l1.iter().zip(l2).map(|(&x, &y)| x / (1.0 + x * a) - y / (1.0 + y * a)).collect();
    let (spread, lambda) = relative_spread(&lambdas);
    let consistent = lambda > 0.0 && spread <= cfg.consistency_tol;
    details.push(ConditionCheck::new("common_lambda", consistent, cfg.consistency_tol - spread));
    if !consistent {
        return Ok(CertificateReport::rejected(Verdict::Inconclusive, details));
    }
    let r = HermitianMatrix::identity(m).scale(a);
    let capacity = secrecy_rate(pair, &r)?.max(0.0);
    Ok(CertificateReport {
        verdict: Verdict::SufficientHolds,
        details,
        certified_covariance: Some(r),
        certified_capacity: Some(capacity),
        multiplier: Some(lambda),
        regular_coding_suffices: false,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum KktForm {
    /// `M = λ W1 R - W1 + W2 + λ I`, valid when `W2 R = 0`.
    ZfForm,
    /// `M = λ' I - (W1^{-1} + R)^{-1} + (W2^{-1} + R)^{-1}`.
    WfForm,
}

/// `(W^{-1} + R)^{-1}` written as `W^{1/2} (I + W^{1/2} R W^{1/2})^{-1} W^{1/2}`,
/// which stays defined for singular `W`.
fn resolvent(w: &HermitianMatrix, r: &HermitianMatrix) -> Result<CMatrix> {
    let s = w.sqrt();
    let m = w.dim();
    let inner = CMatrix::identity(m, m) + s.as_matrix() * r.as_matrix() * s.as_matrix();
    let inv = inner
        .try_inverse()
        .ok_or_else(|| WiretapError::InvalidInput("I + W^{1/2} R W^{1/2} is singular".into()))?;
    Ok(s.as_matrix() * inv * s.as_matrix())
}

/// KKT residuals of the exact problem at `(R, λ)`.
pub fn kkt_residual_general(
    pair: &ChannelPair,
    r: &HermitianMatrix,
    lambda: f64,
    form: KktForm,
    p_t: f64,
) -> Result<KktReport> {
    pair.check_covariance(r)?;
    let m = pair.m();
    let eye = CMatrix::identity(m, m);
    let dual = match form {
        KktForm::ZfForm => {
            let w1 = pair.w1().as_matrix();
            (w1 * r.as_matrix()).map(|z| z * lambda) - w1 + pair.w2().as_matrix() + eye.map(|z| z * lambda)
        }
        KktForm::WfForm => {
            let grad = resolvent(pair.w1(), r)? - resolvent(pair.w2(), r)?;
            eye.map(|z| z * lambda) - grad
        }
    };
    let dual = HermitianMatrix::from_trusted(crate::matrix::symmetrize(&dual), pair.rank_tol());
    Ok(kkt_report(&dual, r, lambda, p_t))
}

/// Eigenvalues of `U† W U` for a unitary `U`, in column order.
pub fn diagonal_in_basis(w: &HermitianMatrix, basis: &CMatrix) -> Vec<f64> {
    let d = basis.adjoint() * w.as_matrix() * basis;
    (0..d.nrows()).map(|i| d[(i, i)].re).collect()
}

/// Largest off-diagonal modulus of `U† W U`.
pub fn off_diagonal_in_basis(w: &HermitianMatrix, basis: &CMatrix) -> f64 {
    let d = basis.adjoint() * w.as_matrix() * basis;
    let mut worst = 0.0_f64;
    for i in 0..d.nrows() {
        for j in 0..d.ncols() {
            if i != j {
                worst = worst.max(d[(i, j)].norm());
            }
        }
    }
    worst
}

/// Sorted spectrum of `w`, used by the certificate constructions' checks.
pub fn spectrum(w: &HermitianMatrix) -> Vec<f64> {
    hermitian_eigen(w.as_matrix()).eigenvalues
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::real_matrix;

    fn cfg() -> CertifyConfig {
        CertifyConfig::default()
    }

    fn rotation(theta: f64) -> CMatrix {
        let (s, c) = theta.sin_cos();
        real_matrix(&[vec![c, -s], vec![s, c]])
    }

    #[test]
    fn zf_example() {
        let pair = ChannelPair::from_diagonals(&[3.0, 2.0], &[0.0, 5.0]).unwrap();
        let rep = zf_certify(&pair, 1.0, &cfg()).unwrap();
        assert!(rep.holds() && rep.regular_coding_suffices);
        assert!((rep.multiplier.unwrap() - 0.75).abs() < 1e-14);
        assert!((rep.certified_capacity.unwrap() - 4.0_f64.ln()).abs() < 1e-12);
        let r = rep.certified_covariance.unwrap();
        assert!((r.get(0, 0).re - 1.0).abs() < 1e-14 && r.get(1, 1).re.abs() < 1e-14);
        assert_eq!((pair.w2().as_matrix() * r.as_matrix()).norm(), 0.0);
        let kkt = kkt_residual_general(&pair, &r, 0.75, KktForm::ZfForm, 1.0).unwrap();
        assert!(kkt.satisfied(1e-12), "{kkt:?}");
        let direct = secrecy_rate(&pair, &r).unwrap();
        assert!((direct - 4.0_f64.ln()).abs() < 1e-12);
    }

    #[test]
    fn zf_needs_null_space() {
        let pair = ChannelPair::from_diagonals(&[3.0, 2.0], &[0.1, 5.0]).unwrap();
        assert_eq!(zf_certify(&pair, 1.0, &cfg()).unwrap().verdict, Verdict::NecessaryFails);
    }

    #[test]
    fn zf_leakage_condition_fails_at_high_power() {
        // Mode 2 becomes profitable once λ < 1.9, i.e. P_T > 1/1.9 - 1/3.
        let pair = ChannelPair::from_diagonals(&[3.0, 2.0], &[0.0, 0.1]).unwrap();
        let edge = 1.0 / 1.9 - 1.0 / 3.0;
        assert!(zf_certify(&pair, 0.9 * edge, &cfg()).unwrap().holds());
        let rep = zf_certify(&pair, 1.1 * edge, &cfg()).unwrap();
        assert_eq!(rep.verdict, Verdict::Inconclusive);
        assert!(rep.certified_covariance.is_none());
    }

    #[test]
    fn zf_necessity_block_structure() {
        let pair = ChannelPair::from_diagonals(&[3.0, 2.0, 1.0], &[0.0, 0.0, 4.0]).unwrap();
        let rep = zf_certify(&pair, 1.0, &cfg()).unwrap();
        let r = rep.certified_covariance.unwrap();
        let nec = zf_necessity_check(&pair, &r).unwrap();
        assert!(nec.holds(1e-9), "{nec:?}");
        assert!((nec.implied_lambda - rep.multiplier.unwrap()).abs() < 1e-9);

        let bad = HermitianMatrix::from_diagonal(&[0.5, 0.0, 0.5]);
        assert!(!zf_necessity_check(&pair, &bad).unwrap().holds(1e-9));
        let skewed = HermitianMatrix::from_diagonal(&[0.9, 0.1, 0.0]);
        assert!(!zf_necessity_check(&pair, &skewed).unwrap().holds(1e-9));
    }

    #[test]
    fn wf_alpha_example() {
        let pair = ChannelPair::from_diagonals(&[2.0, 1.0], &[2.0 / 3.0, 0.5]).unwrap();
        let rep = wf_certify(&pair, 1.5, &cfg()).unwrap();
        assert!(rep.holds(), "{:?}", rep.details);
        let r = rep.certified_covariance.unwrap();
        assert!((r.get(0, 0).re - 1.0).abs() < 1e-12 && (r.get(1, 1).re - 0.5).abs() < 1e-12);
        let kkt = kkt_residual_general(&pair, &r, rep.multiplier.unwrap(), KktForm::WfForm, 1.5).unwrap();
        assert!(kkt.satisfied(1e-8), "{kkt:?}");
        let off = kkt_residual_general(
            &pair,
            &HermitianMatrix::from_diagonal(&[0.2, 1.3]),
            rep.multiplier.unwrap(),
            KktForm::WfForm,
            1.5,
        )
        .unwrap();
        assert!(off.max_residual() > 1e-3);
    }

    #[test]
    fn wf_inconclusive_cases() {
        let free = ChannelPair::from_diagonals(&[2.0, 1.0], &[0.0, 0.0]).unwrap();
        assert_eq!(wf_certify(&free, 1.5, &cfg()).unwrap().verdict, Verdict::Inconclusive);
        let fig1 =
            ChannelPair::from_real_rows(&[vec![2.0, 0.0], vec![0.0, 1.0]], &[vec![0.2, 0.1], vec![0.1, 0.1]])
                .unwrap();
        assert_eq!(wf_certify(&fig1, 1.0, &cfg()).unwrap().verdict, Verdict::Inconclusive);
        let mixed = ChannelPair::from_diagonals(&[2.0, 1.0], &[1.0, 0.5]).unwrap();
        assert_eq!(wf_certify(&mixed, 5.0, &cfg()).unwrap().verdict, Verdict::Inconclusive);
    }

    #[test]
    fn wf_construction_rotated() {
        let pair = construct_wf_optimal_channel(&[3.0, 0.5], 0.7, &rotation(0.4)).unwrap();
        for p_t in [0.1, 4.0] {
            let rep = wf_certify(&pair, p_t, &cfg()).unwrap();
            assert!(rep.holds());
        }
    }

    #[test]
    fn is_construction_example() {
        let basis = CMatrix::identity(2, 2);
        let pair = construct_is_optimal_channel(2, 2.0, 2.0, 1.0, &[3.0], &basis).unwrap();
        let e1 = spectrum(pair.w1());
        let e2 = spectrum(pair.w2());
        assert!((e1[0] - 1.0).abs() < 1e-12 && (e1[1] - 1.0 / 1.4).abs() < 1e-12);
        assert!((e2[0] - 0.5).abs() < 1e-12 && (e2[1] - 1.0 / 3.0).abs() < 1e-12);
        let rep = is_certify(&pair, 2.0, &cfg()).unwrap();
        assert!(rep.holds());
        assert!((rep.multiplier.unwrap() - 1.0 / 6.0).abs() < 1e-12);
        let r = rep.certified_covariance.unwrap();
        let kkt = kkt_residual_general(&pair, &r, 1.0 / 6.0, KktForm::WfForm, 2.0).unwrap();
        assert!(kkt.satisfied(1e-10), "{kkt:?}");
    }

    #[test]
    fn is_construction_boundaries() {
        let basis = CMatrix::identity(2, 2);
        // λ = 1/6, a = 1: floor = (1/6) / (5/6) = 0.2.
        let floor = (1.0 / 6.0) / (1.0 - 1.0 / 6.0);
        assert!(construct_is_optimal_channel(2, 2.0, 2.0, 1.0, &[floor], &basis).is_err());
        assert!(construct_is_optimal_channel(2, 2.0, 2.0, 3.0, &[3.0], &basis).is_err());
        let equal = construct_is_optimal_channel(2, 2.0, 2.0, 1.0, &[2.0], &basis).unwrap();
        let e1 = spectrum(equal.w1());
        assert!((e1[0] - e1[1]).abs() < 1e-12);
        assert!(is_certify(&equal, 2.0, &cfg()).unwrap().holds());
    }

    #[test]
    fn is_rejects_fig1() {
        let fig1 =
            ChannelPair::from_real_rows(&[vec![2.0, 0.0], vec![0.0, 1.0]], &[vec![0.2, 0.1], vec![0.1, 0.1]])
                .unwrap();
        assert_eq!(is_certify(&fig1, 1.0, &cfg()).unwrap().verdict, Verdict::Inconclusive);
    }

    #[test]
    fn resolvent_matches_inverse_form() {
        let w = HermitianMatrix::from_real_rows(&[vec![2.0, 0.3], vec![0.3, 1.0]]).unwrap();
        let r = HermitianMatrix::from_diagonal(&[0.4, 0.7]);
        let direct = (w.as_matrix().clone().try_inverse().unwrap() + r.as_matrix()).try_inverse().unwrap();
        assert!((resolvent(&w, &r).unwrap() - direct).norm() < 1e-12);
        let singular = HermitianMatrix::from_diagonal(&[1.0, 0.0]);
        let got = resolvent(&singular, &r).unwrap();
        assert!((got[(0, 0)].re - 1.0 / 1.4).abs() < 1e-12 && got[(1, 1)].norm() < 1e-14);
    }
}
