//! Omnidirectional eavesdropper: `W2 = ε U2 U2†` with `U2` semi-unitary,
//! i.e. equal gain over an `r2`-dimensional active subspace.
//!
//! When `R(W1) ⊆ R(W2)` the capacity equals the isotropic one with the same
//! `ε`; otherwise only the isotropic bounds are reported.

use crate::channel::ChannelPair;
use crate::error::{Result, WiretapError};
use crate::isotropic::{isotropic_bounds_detail, solve_isotropic_in_basis, IsotropicProblem};
use crate::matrix::{hermitian_eigen, CMatrix, HermitianMatrix};
use crate::search::MultiplierSearch;
use crate::solution::{CapacityBounds, SolveResult, SolveStatus};

pub const DEFAULT_OMNI_DELTA: f64 = 1e-8;
pub const CONTAINMENT_TOL: f64 = 1e-8;

#[derive(Debug, Clone)]
pub struct OmniClassification {
    pub is_omni: bool,
    /// Mean of the positive eigenvalues of `W2` (zero when `W2 = 0`).
    pub epsilon: f64,
    /// `m × r2` orthonormal basis of `R(W2)`.
    pub active_basis: CMatrix,
    pub r2: usize,
}

/// `W2` is omnidirectional when its positive eigenvalues agree with their
/// mean within relative tolerance `delta`. `W2 = 0` is not.
pub fn classify_omni(w2: &HermitianMatrix, delta: f64) -> OmniClassification {
    let eig = w2.eigen();
    let thr = eig.zero_threshold(w2.rank_tol());
    let idx: Vec<usize> = (0..eig.dim()).filter(|&i| eig.eigenvalues[i] > thr).collect();
    let r2 = idx.len();
    let active_basis = CMatrix::from_fn(eig.dim(), r2, |r, c| eig.eigenvectors[(r, idx[c])]);
    if r2 == 0 {
        return OmniClassification { is_omni: false, epsilon: 0.0, active_basis, r2 };
    }
    let positive: Vec<f64> = idx.iter().map(|&i| eig.eigenvalues[i]).collect();
    let epsilon = positive.iter().sum::<f64>() / r2 as f64;
    let spread = positive.iter().fold(0.0_f64, |a, v| a.max((v - epsilon).abs()));
    OmniClassification { is_omni: spread <= delta * epsilon, epsilon, active_basis, r2 }
}

/// `‖(I - U U†) W1‖_F / ‖W1‖_F`, zero for `W1 = 0`.
pub fn containment_residual(w1: &HermitianMatrix, basis: &CMatrix) -> f64 {
    let n = w1.norm();
    if n == 0.0 {
        return 0.0;
    }
    let w = w1.as_matrix();
    let leak = w - basis * (basis.adjoint() * w);
    leak.norm() / n
}

#[derive(Debug, Clone)]
pub struct OmniOutcome {
    /// `Solved` under containment. Otherwise `BoundsOnly`, carrying the
    /// achievable lower-bound covariance and its rate.
    pub result: SolveResult,
    pub bounds: Option<CapacityBounds>,
    pub projector_residual: f64,
    pub classification: OmniClassification,
}

pub fn solve_omni(pair: &ChannelPair, p_t: f64, search: &MultiplierSearch) -> Result<OmniOutcome> {
    if !(p_t > 0.0) {
        return Err(WiretapError::NonPositive { name: "P_T", value: p_t });
    }
    let classification = classify_omni(pair.w2(), DEFAULT_OMNI_DELTA);
    if !classification.is_omni {
        return Err(WiretapError::NotApplicable("eavesdropper is not omnidirectional".into()));
    }
    if pair.w1().is_zero() {
        return Ok(OmniOutcome {
            result: SolveResult::zero(pair.m(), 0.0),
            bounds: None,
            projector_residual: 0.0,
            classification,
        });
    }
    let residual = containment_residual(pair.w1(), &classification.active_basis);
    if residual <= CONTAINMENT_TOL {
        let eig1 = pair.w1().eigen();
        let gains: Vec<f64> = eig1.eigenvalues.iter().map(|&g| g.max(0.0)).collect();
        let problem = IsotropicProblem::new(&gains, classification.epsilon, p_t)?;
        let result = solve_isotropic_in_basis(&problem, &eig1.eigenvectors, search)?;
        return Ok(OmniOutcome { result, bounds: None, projector_residual: residual, classification });
    }
    let detail = isotropic_bounds_detail(pair, p_t, search)?;
    let mut result = detail.lower_solution;
    result.status = SolveStatus::BoundsOnly;
    Ok(OmniOutcome { result, bounds: Some(detail.bounds), projector_residual: residual, classification })
}

/// Eigenvalues of `U† W1 U`, descending.
pub fn compressed_eigenvalues(w1: &HermitianMatrix, basis: &CMatrix) -> Vec<f64> {
    hermitian_eigen(&(basis.adjoint() * w1.as_matrix() * basis)).eigenvalues
}

/// Indices `i` where `λ_i(U† W1 U) > λ_i(W1) + tol`.
pub fn interlacing_violations(w1: &HermitianMatrix, basis: &CMatrix, tol: f64) -> Vec<usize> {
    let full = w1.eigenvalues();
    compressed_eigenvalues(w1, basis)
        .iter()
        .enumerate()
        .filter(|(i, v)| **v > full[*i] + tol)
        .map(|(i, _)| i)
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::isotropic::solve_isotropic;

    fn s() -> MultiplierSearch {
        MultiplierSearch::default()
    }

    #[test]
    fn classification_examples() {
        let c = classify_omni(&HermitianMatrix::identity(3).scale(0.5), DEFAULT_OMNI_DELTA);
        assert!(c.is_omni && c.r2 == 3 && (c.epsilon - 0.5).abs() < 1e-15);
        let c = classify_omni(&HermitianMatrix::from_diagonal(&[0.5, 0.5, 0.0]), DEFAULT_OMNI_DELTA);
        assert!(c.is_omni && c.r2 == 2);
        let g = c.active_basis.adjoint() * &c.active_basis;
        assert!((g - CMatrix::identity(2, 2)).norm() < 1e-10);
        assert!(!classify_omni(&HermitianMatrix::from_diagonal(&[0.5, 0.3]), DEFAULT_OMNI_DELTA).is_omni);
        assert!(!classify_omni(&HermitianMatrix::zeros(2), DEFAULT_OMNI_DELTA).is_omni);
    }

    #[test]
    fn contained_single_mode() {
        let pair = ChannelPair::from_diagonals(&[2.0, 0.0], &[0.5, 0.0]).unwrap();
        let out = solve_omni(&pair, 1.0, &s()).unwrap();
        assert_eq!(out.result.status, SolveStatus::Solved);
        assert!((out.result.capacity_nats - 2.0_f64.ln()).abs() < 1e-12);
        assert!(out.bounds.is_none());
    }

    #[test]
    fn zero_legitimate_channel() {
        let pair = ChannelPair::from_diagonals(&[0.0, 0.0], &[0.5, 0.0]).unwrap();
        let out = solve_omni(&pair, 1.0, &s()).unwrap();
        assert_eq!(out.result.capacity_nats, 0.0);
    }

    #[test]
    fn containment_failure_gives_bounds() {
        let pair = ChannelPair::from_diagonals(&[2.0, 1.0], &[0.5, 0.0]).unwrap();
        let out = solve_omni(&pair, 1.0, &s()).unwrap();
        assert_eq!(out.result.status, SolveStatus::BoundsOnly);
        assert!(out.projector_residual > 0.4);
        let b = out.bounds.unwrap();
        assert!(b.lower_nats <= b.upper_nats);
        assert_eq!(out.result.capacity_nats, b.lower_nats);
    }

    #[test]
    fn rejects_non_omni() {
        let pair = ChannelPair::from_diagonals(&[2.0, 1.0], &[0.5, 0.3]).unwrap();
        assert!(matches!(solve_omni(&pair, 1.0, &s()), Err(WiretapError::NotApplicable(_))));
    }

    #[test]
    fn isotropic_case_matches() {
        let pair = ChannelPair::from_diagonals(&[3.0, 1.0], &[0.4, 0.4]).unwrap();
        let out = solve_omni(&pair, 2.0, &s()).unwrap();
        let iso = solve_isotropic(&IsotropicProblem::new(&[3.0, 1.0], 0.4, 2.0).unwrap(), &s()).unwrap();
        assert!((out.result.capacity_nats - iso.capacity_nats).abs() < 1e-12);
    }

    #[test]
    fn interlacing_on_diagonal() {
        let w1 = HermitianMatrix::from_diagonal(&[1.0, 3.0, 2.0]);
        let u = CMatrix::from_fn(3, 2, |r, c| if r == c + 1 { 1.0.into() } else { 0.0.into() });
        assert_eq!(compressed_eigenvalues(&w1, &u), vec![3.0, 2.0]);
        assert!(interlacing_violations(&w1, &u, 0.0).is_empty());
    }
}
