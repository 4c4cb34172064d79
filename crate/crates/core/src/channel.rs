use crate::error::{Result, WiretapError};
use crate::matrix::{CMatrix, HermitianMatrix};

/// Legitimate and eavesdropper Gram matrices `W_k = H_k† H_k` over `m`
/// transmit antennas.
#[derive(Debug, Clone)]
pub struct ChannelPair {
    w1: HermitianMatrix,
    w2: HermitianMatrix,
}

impl ChannelPair {
    pub fn from_gram(w1: HermitianMatrix, w2: HermitianMatrix) -> Result<Self> {
        if w1.dim() != w2.dim() {
            return Err(WiretapError::DimensionMismatch { expected: w1.dim(), found: w2.dim() });
        }
        w1.ensure_psd("W1")?;
        w2.ensure_psd("W2")?;
        Ok(Self { w1, w2 })
    }

    /// Builds the pair from raw channel matrices `H1` (`n1 x m`) and `H2` (`n2 x m`).
    pub fn from_channels(h1: &CMatrix, h2: &CMatrix) -> Result<Self> {
        if h1.ncols() != h2.ncols() {
            return Err(WiretapError::DimensionMismatch { expected: h1.ncols(), found: h2.ncols() });
        }
        Self::from_gram(HermitianMatrix::gram(h1)?, HermitianMatrix::gram(h2)?)
    }

    pub fn from_real_rows(w1: &[Vec<f64>], w2: &[Vec<f64>]) -> Result<Self> {
        Self::from_gram(HermitianMatrix::from_real_rows(w1)?, HermitianMatrix::from_real_rows(w2)?)
    }

    pub fn from_diagonals(d1: &[f64], d2: &[f64]) -> Result<Self> {
        Self::from_gram(HermitianMatrix::from_diagonal(d1), HermitianMatrix::from_diagonal(d2))
    }

    pub fn w1(&self) -> &HermitianMatrix {
        &self.w1
    }

    pub fn w2(&self) -> &HermitianMatrix {
        &self.w2
    }

    /// Number of transmit antennas.
    pub fn m(&self) -> usize {
        self.w1.dim()
    }

    pub fn rank_tol(&self) -> f64 {
        self.w1.rank_tol()
    }

    pub(crate) fn check_covariance(&self, r: &HermitianMatrix) -> Result<()> {
        if r.dim() != self.m() {
            return Err(WiretapError::DimensionMismatch { expected: self.m(), found: r.dim() });
        }
        r.ensure_psd("R")
    }
}
