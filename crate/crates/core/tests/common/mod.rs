#![allow(dead_code)]

use num_complex::Complex64;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use wiretap_core::{CMatrix, ChannelPair, HermitianMatrix};

pub fn gaussian_matrix(rng: &mut ChaCha8Rng, rows: usize, cols: usize) -> CMatrix {
    CMatrix::from_fn(rows, cols, |_, _| {
        let re: f64 = rng.sample(StandardNormal);
        let im: f64 = rng.sample(StandardNormal);
        Complex64::new(re, im)
    })
}

/// Haar-like unitary from the QR factor of a complex Gaussian matrix.
pub fn random_unitary(rng: &mut ChaCha8Rng, m: usize) -> CMatrix {
    gaussian_matrix(rng, m, m).qr().q()
}

/// First `r` columns of a random unitary.
pub fn random_semi_unitary(rng: &mut ChaCha8Rng, m: usize, r: usize) -> CMatrix {
    random_unitary(rng, m).columns(0, r).into_owned()
}

pub fn random_psd(rng: &mut ChaCha8Rng, m: usize, scale: f64) -> HermitianMatrix {
    let a = gaussian_matrix(rng, m, m);
    HermitianMatrix::gram(&a).unwrap().scale(scale / m as f64)
}

pub fn commuting_pair(basis: &CMatrix, l1: &[f64], l2: &[f64]) -> ChannelPair {
    ChannelPair::from_gram(
        HermitianMatrix::from_spectrum(basis, l1).unwrap(),
        HermitianMatrix::from_spectrum(basis, l2).unwrap(),
    )
    .unwrap()
}

pub fn fig1() -> ChannelPair {
    ChannelPair::from_real_rows(&[vec![2.0, 0.0], vec![0.0, 1.0]], &[vec![0.2, 0.1], vec![0.1, 0.1]]).unwrap()
}

pub fn uniform(rng: &mut ChaCha8Rng, lo: f64, hi: f64) -> f64 {
    lo + (hi - lo) * rng.random::<f64>()
}

/// Uniform on `(0, hi]`.
pub fn open_uniform(rng: &mut ChaCha8Rng, hi: f64) -> f64 {
    hi * (1.0 - rng.random::<f64>())
}
