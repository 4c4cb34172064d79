//! Hermitian matrices and the spectral helpers every solver is built on.
//!
//! All functions of a matrix (square root, pseudo-inverse, positive part)
//! go through a single eigendecomposition with a relative rank tolerance:
//! eigenvalues with `|λ| <= rank_tol * max|λ|` are treated as exactly zero.

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;

use crate::error::{Result, WiretapError};

/// Dense complex matrix used for channels, bases and intermediate products.
pub type CMatrix = DMatrix<Complex64>;

pub const DEFAULT_RANK_TOL: f64 = 1e-10;

/// Relative asymmetry allowed before symmetrization.
pub const HERMITIAN_TOL: f64 = 1e-8;

/// A square Hermitian matrix together with the rank tolerance used for
/// all rank and null-space decisions made on it.
#[derive(Debug, Clone, PartialEq)]
pub struct HermitianMatrix {
    data: CMatrix,
    rank_tol: f64,
}

/// Eigenvalues in decreasing order with the matching orthonormal eigenvectors
/// stored column by column.
#[derive(Debug, Clone)]
pub struct SpectralDecomposition {
    pub eigenvalues: Vec<f64>,
    pub eigenvectors: CMatrix,
}

impl SpectralDecomposition {
    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }

    /// Threshold below which an eigenvalue counts as zero.
    pub fn zero_threshold(&self, rank_tol: f64) -> f64 {
        let scale = self.eigenvalues.iter().fold(0.0_f64, |acc, v| acc.max(v.abs()));
        rank_tol * scale
    }

    pub fn rank(&self, rank_tol: f64) -> usize {
        let thr = self.zero_threshold(rank_tol);
        self.eigenvalues.iter().filter(|v| v.abs() > thr).count()
    }

    pub fn eigenvector(&self, i: usize) -> CMatrix {
        self.eigenvectors.columns(i, 1).into_owned()
    }

    /// `U f(Λ) U†`.
    pub fn compose(&self, spectrum: &[f64]) -> CMatrix {
        let n = self.dim();
        let mut scaled = self.eigenvectors.clone();
        for (j, &s) in spectrum.iter().enumerate() {
            for i in 0..n {
                scaled[(i, j)] *= s;
            }
        }
        let out = scaled * self.eigenvectors.adjoint();
        symmetrize(&out)
    }

    pub fn reconstruct(&self) -> CMatrix {
        self.compose(&self.eigenvalues)
    }
}

impl HermitianMatrix {
    /// Validates near-Hermitian input and symmetrizes it as `(A + A†)/2`.
    pub fn new(data: CMatrix) -> Result<Self> {
        if data.nrows() != data.ncols() {
            return Err(WiretapError::NotSquare { rows: data.nrows(), cols: data.ncols() });
        }
        if data.nrows() == 0 {
            return Err(WiretapError::InvalidInput("empty matrix".into()));
        }
        if data.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(WiretapError::InvalidInput("matrix has non-finite entries".into()));
        }
        let asym = max_asymmetry(&data);
        let allowed = HERMITIAN_TOL * data.norm();
        if asym > allowed {
            return Err(WiretapError::NotHermitian { asymmetry: asym, allowed });
        }
        Ok(Self { data: symmetrize(&data), rank_tol: DEFAULT_RANK_TOL })
    }

    pub fn from_real_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let n = rows.len();
        if rows.iter().any(|r| r.len() != n) {
            return Err(WiretapError::NotSquare { rows: n, cols: rows.first().map_or(0, |r| r.len()) });
        }
        Self::new(CMatrix::from_fn(n, n, |i, j| Complex64::new(rows[i][j], 0.0)))
    }

    pub fn from_diagonal(diag: &[f64]) -> Self {
        let n = diag.len();
        let data = CMatrix::from_fn(n, n, |i, j| {
            if i == j {
                Complex64::new(diag[i], 0.0)
            } else {
                Complex64::new(0.0, 0.0)
            }
        });
        Self { data, rank_tol: DEFAULT_RANK_TOL }
    }

    pub fn identity(m: usize) -> Self {
        Self::from_diagonal(&vec![1.0; m])
    }

    pub fn zeros(m: usize) -> Self {
        Self::from_diagonal(&vec![0.0; m])
    }

    /// `H† H` for an `n x m` channel matrix.
    pub fn gram(h: &CMatrix) -> Result<Self> {
        if h.ncols() == 0 {
            return Err(WiretapError::InvalidInput("channel matrix has no columns".into()));
        }
        Self::new(h.adjoint() * h)
    }

    /// `U diag(d) U†`.
    pub fn from_spectrum(basis: &CMatrix, diag: &[f64]) -> Result<Self> {
        if basis.nrows() != diag.len() || basis.ncols() != diag.len() {
            return Err(WiretapError::DimensionMismatch { expected: diag.len(), found: basis.ncols() });
        }
        let sd = SpectralDecomposition { eigenvalues: diag.to_vec(), eigenvectors: basis.clone() };
        Ok(Self { data: sd.compose(diag), rank_tol: DEFAULT_RANK_TOL })
    }

    /// Wraps a matrix already known to be Hermitian up to rounding.
    pub(crate) fn from_trusted(data: CMatrix, rank_tol: f64) -> Self {
        Self { data: symmetrize(&data), rank_tol }
    }

    pub fn with_rank_tol(mut self, rank_tol: f64) -> Self {
        self.rank_tol = rank_tol;
        self
    }

    pub fn rank_tol(&self) -> f64 {
        self.rank_tol
    }

    pub fn dim(&self) -> usize {
        self.data.nrows()
    }

    pub fn as_matrix(&self) -> &CMatrix {
        &self.data
    }

    pub fn into_matrix(self) -> CMatrix {
        self.data
    }

    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.data[(i, j)]
    }

    pub fn trace(&self) -> f64 {
        (0..self.dim()).map(|i| self.data[(i, i)].re).sum()
    }

    /// Frobenius norm.
    pub fn norm(&self) -> f64 {
        self.data.norm()
    }

    pub fn eigen(&self) -> SpectralDecomposition {
        hermitian_eigen(&self.data)
    }

    pub fn eigenvalues(&self) -> Vec<f64> {
        self.eigen().eigenvalues
    }

    pub fn max_eigenvalue(&self) -> f64 {
        self.eigenvalues()[0]
    }

    pub fn min_eigenvalue(&self) -> f64 {
        *self.eigenvalues().last().expect("non-empty matrix")
    }

    pub fn rank(&self) -> usize {
        self.eigen().rank(self.rank_tol)
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|z| z.norm_sqr() == 0.0)
    }

    /// PSD within the rank tolerance.
    pub fn is_psd(&self) -> bool {
        let sd = self.eigen();
        let thr = sd.zero_threshold(self.rank_tol);
        sd.eigenvalues.last().is_none_or(|&v| v >= -thr)
    }

    pub fn ensure_psd(&self, name: &'static str) -> Result<()> {
        if self.is_psd() {
            Ok(())
        } else {
            Err(WiretapError::NotPsd { name, min_eigenvalue: self.min_eigenvalue() })
        }
    }

    /// Applies `f` to every eigenvalue; eigenvalues under the rank threshold
    /// are passed to `f` as exact zeros.
    pub fn map_spectrum(&self, f: impl Fn(f64) -> f64) -> Self {
        let sd = self.eigen();
        let thr = sd.zero_threshold(self.rank_tol);
        let spectrum: Vec<f64> =
            sd.eigenvalues.iter().map(|&v| if v.abs() <= thr { f(0.0) } else { f(v) }).collect();
        Self::from_trusted(sd.compose(&spectrum), self.rank_tol)
    }

    /// Moore-Penrose pseudo-inverse with the relative rank cutoff.
    pub fn pinv(&self) -> Self {
        self.map_spectrum(|v| if v == 0.0 { 0.0 } else { 1.0 / v })
    }

    /// Principal square root; negative eigenvalues within tolerance clamp to 0.
    pub fn sqrt(&self) -> Self {
        self.map_spectrum(|v| v.max(0.0).sqrt())
    }

    /// `(A)_+`: keeps eigenmodes with eigenvalue above the rank threshold.
    pub fn positive_part(&self) -> Self {
        self.map_spectrum(|v| v.max(0.0))
    }

    /// `B A B†`.
    pub fn congruence(&self, b: &CMatrix) -> Self {
        Self::from_trusted(b * &self.data * b.adjoint(), self.rank_tol)
    }

    pub fn add(&self, other: &Self) -> Self {
        Self::from_trusted(&self.data + &other.data, self.rank_tol)
    }

    pub fn sub(&self, other: &Self) -> Self {
        Self::from_trusted(&self.data - &other.data, self.rank_tol)
    }

    pub fn scale(&self, s: f64) -> Self {
        Self::from_trusted(self.data.map(|z| z * s), self.rank_tol)
    }

    /// `A + s I`.
    pub fn shift(&self, s: f64) -> Self {
        let mut data = self.data.clone();
        for i in 0..self.dim() {
            data[(i, i)] += Complex64::new(s, 0.0);
        }
        Self::from_trusted(data, self.rank_tol)
    }

    /// `Re tr(A B)`.
    pub fn trace_product(&self, other: &Self) -> f64 {
        let n = self.dim();
        let mut acc = 0.0;
        for i in 0..n {
            for k in 0..n {
                acc += (self.data[(i, k)] * other.data[(k, i)]).re;
            }
        }
        acc
    }
}

/// `(A)_+` of a Hermitian matrix.
pub fn positive_part(a: &HermitianMatrix) -> HermitianMatrix {
    a.positive_part()
}

/// `(A + A†)/2`.
pub fn symmetrize(a: &CMatrix) -> CMatrix {
    (a + a.adjoint()).map(|z| z * 0.5)
}

/// Largest entrywise deviation `|A_ij - conj(A_ji)|`.
pub fn max_asymmetry(a: &CMatrix) -> f64 {
    let n = a.nrows();
    let mut worst = 0.0_f64;
    for i in 0..n {
        for j in i..n {
            worst = worst.max((a[(i, j)] - a[(j, i)].conj()).norm());
        }
    }
    worst
}

/// Eigendecomposition of a Hermitian matrix, eigenvalues sorted descending.
pub fn hermitian_eigen(a: &CMatrix) -> SpectralDecomposition {
    let n = a.nrows();
    let eig = SymmetricEigen::new(symmetrize(a));
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[j].total_cmp(&eig.eigenvalues[i]));
    let eigenvalues = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let eigenvectors = CMatrix::from_fn(n, n, |r, c| eig.eigenvectors[(r, order[c])]);
    SpectralDecomposition { eigenvalues, eigenvectors }
}

/// Largest singular value.
pub fn spectral_norm(a: &CMatrix) -> f64 {
    let g = a.adjoint() * a;
    hermitian_eigen(&g).eigenvalues[0].max(0.0).sqrt()
}

/// `max |U†U - I|` over entries.
pub fn unitarity_defect(u: &CMatrix) -> f64 {
    let g = u.adjoint() * u;
    let mut worst = 0.0_f64;
    for i in 0..g.nrows() {
        for j in 0..g.ncols() {
            let target = if i == j { 1.0 } else { 0.0 };
            worst = worst.max((g[(i, j)] - Complex64::new(target, 0.0)).norm());
        }
    }
    worst
}

pub fn real_matrix(rows: &[Vec<f64>]) -> CMatrix {
    let n = rows.len();
    let m = rows.first().map_or(0, |r| r.len());
    CMatrix::from_fn(n, m, |i, j| Complex64::new(rows[i][j], 0.0))
}
