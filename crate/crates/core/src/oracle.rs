//! Brute-force references used to check the closed forms.
//!
//! [`mc_capacity`] draws random feasible covariances and keeps the best;
//! [`separable_oracle`] maximizes a sum of scalar secrecy rates by a
//! multiplier search with per-mode grid searches.
//!
//! Sampling is split into fixed-size chunks. Chunk `c` draws from the
//! ChaCha stream `(seed, c)`, so every sample is a deterministic function
//! of `(seed, index)` and the result does not depend on how many threads
//! evaluate the chunks.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;

use crate::certificates::{is_certify, wf_certify, zf_certify, CertifyConfig};
use crate::channel::ChannelPair;
use crate::error::{Result, WiretapError};
use crate::isotropic::isotropic_bounds_detail;
use crate::matrix::{CMatrix, HermitianMatrix};
use crate::omni::solve_omni;
use crate::rsv::{detect_common_rsv, solve_common_rsv, DEFAULT_COMMUTE_TOL};
use crate::search::MultiplierSearch;
use crate::weak::{solve_weak, WeakSolveConfig};

const CHUNK: usize = 1024;
const REFINE_STREAM: u64 = 1 << 40;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Objective {
    /// `ln|I + W1 R| - ln|I + W2 R|`.
    Exact,
    /// `ln|I + W1 R| - tr(W2 R)`.
    Weak,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OracleConfig {
    pub samples: usize,
    pub seed: u64,
    pub refine_rounds: usize,
    /// Perturbations tried per refinement round.
    pub refine_samples: usize,
    /// Grid size of the separable oracle (odd, at least 3).
    pub grid_points: usize,
    /// Add the closed-form solutions to the candidate pool.
    pub seed_candidates: bool,
    /// Draw real instead of complex Gaussian factors.
    pub real_only: bool,
}

impl Default for OracleConfig {
    fn default() -> Self {
        Self {
            samples: 200_000,
            seed: 0x0dd_ba11,
            refine_rounds: 3,
            refine_samples: 4096,
            grid_points: 2001,
            seed_candidates: true,
            real_only: false,
        }
    }
}

impl OracleConfig {
    pub fn validate(&self) -> Result<()> {
        if self.samples == 0 {
            return Err(WiretapError::InvalidInput("samples must be at least 1".into()));
        }
        if self.grid_points < 3 || self.grid_points.is_multiple_of(2) {
            return Err(WiretapError::InvalidInput(format!(
                "grid_points must be odd and at least 3, got {}",
                self.grid_points
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone)]
pub struct McOutcome {
    /// Best clamped objective value found.
    pub best_value: f64,
    pub best_covariance: HermitianMatrix,
    /// Position of the winner in the evaluation order (candidates first).
    pub best_index: usize,
    pub evaluations: usize,
}

#[derive(Debug, Clone)]
struct Best {
    value: f64,
    index: usize,
    r: Vec<Complex64>,
}

impl Best {
    fn better(self, other: Self) -> Self {
        if other.value > self.value || (other.value == self.value && other.index < self.index) {
            other
        } else {
            self
        }
    }
}

fn merge(a: Option<Best>, b: Option<Best>) -> Option<Best> {
    match (a, b) {
        (Some(x), Some(y)) => Some(x.better(y)),
        (x, None) => x,
        (None, y) => y,
    }
}

/// Row-major objective evaluator with no per-call allocation.
struct Evaluator {
    m: usize,
    w1: Vec<Complex64>,
    w2: Vec<Complex64>,
    objective: Objective,
}

struct Scratch {
    a: Vec<Complex64>,
    r: Vec<Complex64>,
    lu: Vec<Complex64>,
}

fn flatten(a: &CMatrix) -> Vec<Complex64> {
    let m = a.nrows();
    (0..m * m).map(|k| a[(k / m, k % m)]).collect()
}

/// `ln|I + W R|` by LU with partial pivoting.
fn log_det_i_plus(w: &[Complex64], r: &[Complex64], m: usize, lu: &mut [Complex64]) -> f64 {
    for i in 0..m {
        for j in 0..m {
            let mut s = if i == j { Complex64::new(1.0, 0.0) } else { Complex64::new(0.0, 0.0) };
            for k in 0..m {
                s += w[i * m + k] * r[k * m + j];
            }
            lu[i * m + j] = s;
        }
    }
    let mut acc = 0.0;
    for col in 0..m {
        let mut piv = col;
        let mut best = lu[col * m + col].norm_sqr();
        for row in col + 1..m {
            let v = lu[row * m + col].norm_sqr();
            if v > best {
                best = v;
                piv = row;
            }
        }
        if best == 0.0 {
            return f64::NEG_INFINITY;
        }
        if piv != col {
            for j in 0..m {
                lu.swap(col * m + j, piv * m + j);
            }
        }
        let p = lu[col * m + col];
        acc += 0.5 * best.ln();
        let inv = p.inv();
        for row in col + 1..m {
            let f = lu[row * m + col] * inv;
            for j in col + 1..m {
                let upper = lu[col * m + j];
                lu[row * m + j] -= f * upper;
            }
        }
    }
    acc
}

impl Evaluator {
    fn new(pair: &ChannelPair, objective: Objective) -> Self {
        Self {
            m: pair.m(),
            w1: flatten(pair.w1().as_matrix()),
            w2: flatten(pair.w2().as_matrix()),
            objective,
        }
    }

    fn scratch(&self) -> Scratch {
        let n = self.m * self.m;
        let z = Complex64::new(0.0, 0.0);
        Scratch { a: vec![z; n], r: vec![z; n], lu: vec![z; n] }
    }

    fn value(&self, r: &[Complex64], lu: &mut [Complex64]) -> f64 {
        let m = self.m;
        let legit = log_det_i_plus(&self.w1, r, m, lu);
        let leak = match self.objective {
            Objective::Exact => log_det_i_plus(&self.w2, r, m, lu),
            Objective::Weak => (0..m)
                .flat_map(|i| (0..m).map(move |j| (i, j)))
                .map(|(i, j)| (self.w2[i * m + j] * r[j * m + i]).re)
                .sum(),
        };
        legit - leak
    }

    /// Evaluates `len` draws from stream `stream`, indices from `base`.
    fn run_chunk<F>(&self, seed: u64, stream: u64, base: usize, len: usize, draw: &F) -> Option<Best>
    where
        F: Fn(&mut ChaCha8Rng, &mut Scratch) + Sync,
    {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(stream);
        let mut s = self.scratch();
        let mut best: Option<Best> = None;
        for k in 0..len {
            draw(&mut rng, &mut s);
            let v = self.value(&s.r, &mut s.lu);
            if v.is_nan() {
                continue;
            }
            if best.as_ref().is_none_or(|b| v > b.value) {
                best = Some(Best { value: v, index: base + k, r: s.r.clone() });
            }
        }
        best
    }

    fn run<F>(&self, seed: u64, stream_base: u64, base: usize, count: usize, draw: &F) -> Option<Best>
    where
        F: Fn(&mut ChaCha8Rng, &mut Scratch) + Sync,
    {
        let chunks = count.div_ceil(CHUNK);
        (0..chunks)
            .into_par_iter()
            .map(|c| {
                let len = CHUNK.min(count - c * CHUNK);
                self.run_chunk(seed, stream_base + c as u64, base + c * CHUNK, len, draw)
            })
            .reduce(|| None, merge)
    }
}

fn gaussian(rng: &mut ChaCha8Rng, real_only: bool) -> Complex64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = if real_only { 0.0 } else { rng.sample(StandardNormal) };
    Complex64::new(re, im)
}

/// `r = A A†`, returning the trace.
fn gram_into(a: &[Complex64], m: usize, r: &mut [Complex64]) -> f64 {
    let mut tr = 0.0;
    for i in 0..m {
        for j in i..m {
            let mut s = Complex64::new(0.0, 0.0);
            for k in 0..m {
                s += a[i * m + k] * a[j * m + k].conj();
            }
            if i == j {
                s.im = 0.0;
                tr += s.re;
                r[i * m + i] = s;
            } else {
                r[i * m + j] = s;
                r[j * m + i] = s.conj();
            }
        }
    }
    tr
}

/// Feasible closed-form covariances from every solver that applies.
pub fn closed_form_candidates(pair: &ChannelPair, p_t: f64) -> Vec<HermitianMatrix> {
    let search = MultiplierSearch::default();
    let mut out = Vec::new();
    if let Ok(sol) = solve_weak(pair, p_t, &WeakSolveConfig::default()) {
        out.push(sol.covariance);
    }
    if let Ok(d) = isotropic_bounds_detail(pair, p_t, &search) {
        out.push(d.lower_solution.covariance);
        out.push(d.upper_solution.covariance);
    }
    if let Ok(ch) = detect_common_rsv(pair, DEFAULT_COMMUTE_TOL) {
        if let Ok(sol) = solve_common_rsv(&ch, p_t, &search) {
            out.push(sol.covariance);
        }
    }
    if let Ok(o) = solve_omni(pair, p_t, &search) {
        out.push(o.result.covariance);
    }
    let cc = CertifyConfig::default();
    for rep in [zf_certify(pair, p_t, &cc), wf_certify(pair, p_t, &cc), is_certify(pair, p_t, &cc)]
        .into_iter()
        .flatten()
    {
        if let Some(r) = rep.certified_covariance {
            out.push(r);
        }
    }
    out.push(HermitianMatrix::identity(pair.m()).scale(p_t / pair.m() as f64));
    out
}

/// Monte-Carlo search for the best covariance with `tr R <= P_T`.
pub fn mc_capacity(
    pair: &ChannelPair,
    p_t: f64,
    objective: Objective,
    cfg: &OracleConfig,
) -> Result<McOutcome> {
    let extra = if cfg.seed_candidates { closed_form_candidates(pair, p_t) } else { Vec::new() };
    mc_capacity_with(pair, p_t, objective, cfg, &extra)
}

/// As [`mc_capacity`] with an explicit candidate pool evaluated first.
/// Candidates with `tr R > P_T` are scaled back onto the power budget.
pub fn mc_capacity_with(
    pair: &ChannelPair,
    p_t: f64,
    objective: Objective,
    cfg: &OracleConfig,
    candidates: &[HermitianMatrix],
) -> Result<McOutcome> {
    cfg.validate()?;
    if !(p_t > 0.0) || !p_t.is_finite() {
        return Err(WiretapError::NonPositive { name: "P_T", value: p_t });
    }
    let eval = Evaluator::new(pair, objective);
    let m = eval.m;
    let mut scratch = eval.scratch();

    // The zero covariance is always feasible; it realizes the clamp at zero.
    let mut pool = vec![vec![Complex64::new(0.0, 0.0); m * m]];
    for c in candidates {
        pair.check_covariance(c)?;
        let tr = c.trace();
        let c = if tr > p_t { c.scale(p_t / tr) } else { c.clone() };
        pool.push(flatten(c.as_matrix()));
    }
    let mut best: Option<Best> = None;
    for (i, r) in pool.iter().enumerate() {
        let v = eval.value(r, &mut scratch.lu);
        if !v.is_nan() {
            best = merge(best, Some(Best { value: v, index: i, r: r.clone() }));
        }
    }
    let mut index = pool.len();

    let real_only = cfg.real_only;
    let draw = |rng: &mut ChaCha8Rng, s: &mut Scratch| {
        for z in s.a.iter_mut() {
            *z = gaussian(rng, real_only);
        }
        let t = if rng.random::<f64>() < 0.5 { p_t } else { p_t * (1.0 - rng.random::<f64>()) };
        let tr = gram_into(&s.a, m, &mut s.r);
        let k = t / tr;
        for z in s.r.iter_mut() {
            *z *= k;
        }
    };
    best = merge(best, eval.run(cfg.seed, 0, index, cfg.samples, &draw));
    index += cfg.samples;

    let base_scale = (p_t / m as f64).sqrt();
    for round in 0..cfg.refine_rounds {
        let incumbent = best.as_ref().expect("pool is never empty");
        let r = HermitianMatrix::new(CMatrix::from_row_slice(m, m, &incumbent.r))?;
        let b = flatten(r.sqrt().as_matrix());
        let sigma = 0.1 * base_scale * 10f64.powi(-(round as i32));
        let perturb = |rng: &mut ChaCha8Rng, s: &mut Scratch| {
            for (z, &b0) in s.a.iter_mut().zip(&b) {
                *z = b0 + gaussian(rng, real_only) * sigma;
            }
            let tr = gram_into(&s.a, m, &mut s.r);
            if tr > p_t {
                let k = p_t / tr;
                for z in s.r.iter_mut() {
                    *z *= k;
                }
            }
        };
        let stream = REFINE_STREAM * (round as u64 + 1);
        best = merge(best, eval.run(cfg.seed, stream, index, cfg.refine_samples, &perturb));
        index += cfg.refine_samples;
    }

    let best = best.expect("pool is never empty");
    let (value, r) = if best.value > 0.0 { (best.value, best.r) } else { (0.0, pool[0].clone()) };
    Ok(McOutcome {
        best_value: value,
        best_covariance: HermitianMatrix::new(CMatrix::from_row_slice(m, m, &r))?,
        best_index: if best.value > 0.0 { best.index } else { 0 },
        evaluations: index,
    })
}

fn scalar_rate(l1: f64, l2: f64, p: f64) -> f64 {
    (l1 * p).ln_1p() - (l2 * p).ln_1p()
}

fn scalar_slope(l1: f64, l2: f64, p: f64) -> f64 {
    l1 / (1.0 + l1 * p) - l2 / (1.0 + l2 * p)
}

/// Maximizer of `rate(p) - μ p` over `[0, P_T]`: golden-section over the
/// grid indices, then bisection on the slope inside the winning cells.
fn mode_argmax(l1: f64, l2: f64, mu: f64, p_t: f64, grid: usize) -> f64 {
    if l1 <= l2 {
        return 0.0;
    }
    let step = p_t / (grid - 1) as f64;
    let g = |k: usize| scalar_rate(l1, l2, k as f64 * step) - mu * k as f64 * step;
    let (mut lo, mut hi) = (0usize, grid - 1);
    while hi - lo > 3 {
        let d = (((hi - lo) as f64) * 0.381_966_011_250_105).floor().max(1.0) as usize;
        let (x1, x2) = (lo + d, hi - d);
        if g(x1) < g(x2) {
            lo = x1;
        } else {
            hi = x2;
        }
    }
    let k = (lo..=hi).fold(lo, |b, k| if g(k) > g(b) { k } else { b });
    let mut a = k.saturating_sub(1) as f64 * step;
    let mut b = (k + 1).min(grid - 1) as f64 * step;
    let h = |p: f64| scalar_slope(l1, l2, p) - mu;
    if h(a) <= 0.0 {
        return a;
    }
    if h(b) >= 0.0 {
        return b;
    }
    loop {
        let mid = 0.5 * (a + b);
        if mid <= a || mid >= b {
            return a;
        }
        if h(mid) > 0.0 {
            a = mid;
        } else {
            b = mid;
        }
    }
}

/// Best separable allocation: returns the value and per-mode powers.
pub fn separable_allocation(
    lam1: &[f64],
    lam2: &[f64],
    p_t: f64,
    cfg: &OracleConfig,
) -> Result<(f64, Vec<f64>)> {
    cfg.validate()?;
    if lam1.len() != lam2.len() {
        return Err(WiretapError::DimensionMismatch { expected: lam1.len(), found: lam2.len() });
    }
    if lam1.iter().chain(lam2).any(|v| !(*v >= 0.0)) {
        return Err(WiretapError::InvalidInput("gains must be non-negative".into()));
    }
    if !(p_t > 0.0) || !p_t.is_finite() {
        return Err(WiretapError::NonPositive { name: "P_T", value: p_t });
    }
    let grid = cfg.grid_points;
    let alloc = |mu: f64| -> Vec<f64> {
        lam1.iter().zip(lam2).map(|(&a, &b)| mode_argmax(a, b, mu, p_t, grid)).collect()
    };
    let mut hi = lam1.iter().zip(lam2).map(|(a, b)| a - b).fold(0.0_f64, f64::max);
    if hi <= 0.0 {
        return Ok((0.0, vec![0.0; lam1.len()]));
    }
    let mut lo = 0.0;
    let mut best = alloc(hi);
    for _ in 0..400 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let p = alloc(mid);
        if p.iter().sum::<f64>() > p_t {
            lo = mid;
        } else {
            hi = mid;
            best = p;
        }
    }
    let value = best.iter().zip(lam1.iter().zip(lam2)).map(|(&p, (&a, &b))| scalar_rate(a, b, p)).sum();
    Ok((value, best))
}

/// `max Σ ln((1 + λ_1i p_i)/(1 + λ_2i p_i))` over `p ⪰ 0`, `Σ p_i <= P_T`.
pub fn separable_oracle(lam1: &[f64], lam2: &[f64], p_t: f64, cfg: &OracleConfig) -> Result<f64> {
    separable_allocation(lam1, lam2, p_t, cfg).map(|(v, _)| v)
}
