//! Per-point solver dispatch.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::Serialize;
use wiretap_core::isotropic::{isotropic_bounds_detail, solve_isotropic_in_basis};
use wiretap_core::omni::containment_residual;
use wiretap_core::weak::weak_bounds_detail;
use wiretap_core::*;

use crate::scenario::{power_to_db, Solver, Units};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Failure {
    NonConvergence,
    Input,
}

#[derive(Debug, Clone, Serialize)]
pub struct Row {
    pub snr_db: f64,
    pub p_t: f64,
    pub solver: String,
    pub capacity: Option<f64>,
    pub lower: Option<f64>,
    pub upper: Option<f64>,
    pub lambda: Option<f64>,
    pub active_modes: Option<usize>,
    pub status: String,
    /// Named capacities behind `capacity`, `lower` and `upper`.
    #[serde(skip_serializing_if = "BTreeMap::is_empty")]
    pub components: BTreeMap<&'static str, f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub covariance: Option<Vec<Vec<[f64; 2]>>>,
    #[serde(skip)]
    pub failure: Option<Failure>,
}

impl Row {
    fn new(p_t: f64, solver: impl Into<String>) -> Self {
        Self {
            snr_db: power_to_db(p_t),
            p_t,
            solver: solver.into(),
            capacity: None,
            lower: None,
            upper: None,
            lambda: None,
            active_modes: None,
            status: String::new(),
            components: BTreeMap::new(),
            covariance: None,
            failure: None,
        }
    }

    fn solved(p_t: f64, solver: &str, r: &SolveResult) -> Self {
        let mut row = Self::new(p_t, solver);
        row.capacity = Some(r.capacity_nats);
        row.lower = Some(r.capacity_nats);
        row.upper = Some(r.capacity_nats);
        row.lambda = Some(r.lagrange_lambda);
        row.active_modes = Some(r.active_modes);
        row.status = r.status.as_str().to_string();
        row.covariance = Some(matrix_entries(&r.covariance));
        row
    }

    fn failed(p_t: f64, solver: &str, err: &WiretapError) -> Self {
        let mut row = Self::new(p_t, solver);
        row.status = format!("error: {err}");
        row.failure = Some(if err.is_non_convergence() { Failure::NonConvergence } else { Failure::Input });
        row
    }

    fn convert(&mut self, units: Units) {
        for v in [&mut self.capacity, &mut self.lower, &mut self.upper].into_iter().flatten() {
            *v = units.convert(*v);
        }
        for v in self.components.values_mut() {
            *v = units.convert(*v);
        }
    }
}

fn matrix_entries(r: &HermitianMatrix) -> Vec<Vec<[f64; 2]>> {
    let m = r.dim();
    (0..m).map(|i| (0..m).map(|j| [r.get(i, j).re, r.get(i, j).im]).collect()).collect()
}

type Certifier = fn(&ChannelPair, f64, &CertifyConfig) -> Result<CertificateReport>;

#[derive(Debug, Clone)]
pub struct Plan {
    pub pair: ChannelPair,
    pub solver: Solver,
    /// Monte-Carlo rows next to the main solver (always used by `Solver::Oracle`).
    pub oracle: Option<OracleConfig>,
    /// Structure-detection tolerance (commuting channels, omnidirectional eavesdropper).
    pub tol: f64,
    pub units: Units,
    pub keep_covariance: bool,
}

impl Plan {
    fn search(&self) -> MultiplierSearch {
        MultiplierSearch::default()
    }

    fn weak_cfg(&self) -> WeakSolveConfig {
        WeakSolveConfig { commute_tol: self.tol, ..Default::default() }
    }

    /// Rows for every grid point, in grid order.
    pub fn sweep(&self, powers: &[f64]) -> Vec<Row> {
        let rows: Vec<Vec<Row>> = powers.par_iter().map(|&p| self.point(p)).collect();
        rows.into_iter().flatten().collect()
    }

    pub fn point(&self, p_t: f64) -> Vec<Row> {
        let mut rows = match self.solver {
            Solver::Auto => vec![self.auto(p_t)],
            Solver::Weak => vec![self.guard(p_t, "weak", |p| self.weak(p))],
            Solver::Isotropic => vec![self.guard(p_t, "isotropic", |p| self.isotropic(p))],
            Solver::Omni => vec![self.guard(p_t, "omni", |p| self.omni(p))],
            Solver::Rsv => vec![self.guard(p_t, "rsv", |p| self.rsv(p))],
            Solver::Certify => self.certify(p_t),
            Solver::Oracle => Vec::new(),
        };
        if self.solver == Solver::Oracle || self.oracle.is_some() {
            rows.push(self.guard(p_t, "oracle", |p| self.mc(p)));
        }
        for row in &mut rows {
            row.convert(self.units);
            if !self.keep_covariance {
                row.covariance = None;
            }
        }
        rows
    }

    fn guard(&self, p_t: f64, name: &str, f: impl FnOnce(f64) -> Result<Row>) -> Row {
        f(p_t).unwrap_or_else(|e| Row::failed(p_t, name, &e))
    }

    fn auto(&self, p_t: f64) -> Row {
        if let Ok(ch) = detect_common_rsv(&self.pair, self.tol) {
            return self.guard(p_t, "rsv", |p| {
                Ok(Row::solved(p, "rsv", &solve_common_rsv(&ch, p, &self.search())?))
            });
        }
        let class = classify_omni(self.pair.w2(), self.tol);
        if class.is_omni && containment_residual(self.pair.w1(), &class.active_basis) <= self.tol {
            return self.guard(p_t, "omni", |p| self.omni(p));
        }
        self.guard(p_t, "weak+isotropic", |p| self.combined(p))
    }

    fn weak(&self, p_t: f64) -> Result<Row> {
        let d = weak_bounds_detail(&self.pair, p_t, &self.weak_cfg())?;
        let mut row = Row::solved(p_t, "weak", &d.solution);
        row.lower = Some(d.bounds.mid_nats);
        row.upper = Some(d.bounds.upper_nats);
        row.components.insert("c_w", d.bounds.lower_nats);
        row.components.insert("c_mid", d.bounds.mid_nats);
        row.components.insert("c_upper", d.bounds.upper_nats);
        Ok(row)
    }

    /// Weak bounds intersected with the isotropic bounds.
    fn combined(&self, p_t: f64) -> Result<Row> {
        let mut row = self.weak(p_t)?;
        row.solver = "weak+isotropic".into();
        if !self.pair.w2().is_zero() {
            let iso = isotropic_bounds_detail(&self.pair, p_t, &self.search())?;
            row.components.insert("c_iso_lower", iso.bounds.lower_nats);
            row.components.insert("c_iso_upper", iso.bounds.upper_nats);
            if iso.bounds.lower_nats > row.lower.unwrap_or(0.0) {
                row.lower = Some(iso.bounds.lower_nats);
                row.covariance = Some(matrix_entries(&iso.lower_solution.covariance));
            }
            row.upper = row.upper.map(|u| u.min(iso.bounds.upper_nats));
        }
        row.capacity = row.lower;
        row.status = SolveStatus::BoundsOnly.as_str().into();
        Ok(row)
    }

    fn isotropic(&self, p_t: f64) -> Result<Row> {
        let eig2 = self.pair.w2().eigenvalues();
        let (hi, lo) = (eig2[0], eig2[eig2.len() - 1]);
        if hi - lo <= self.tol * hi.abs().max(1.0) {
            let eig1 = self.pair.w1().eigen();
            let gains: Vec<f64> = eig1.eigenvalues.iter().map(|g| g.max(0.0)).collect();
            let problem = IsotropicProblem::new(&gains, hi.max(0.0), p_t)?;
            let r = solve_isotropic_in_basis(&problem, &eig1.eigenvectors, &self.search())?;
            return Ok(Row::solved(p_t, "isotropic", &r));
        }
        let d = isotropic_bounds_detail(&self.pair, p_t, &self.search())?;
        let mut row = Row::solved(p_t, "isotropic", &d.lower_solution);
        row.upper = Some(d.bounds.upper_nats);
        row.components.insert("c_iso_lower", d.bounds.lower_nats);
        row.components.insert("c_iso_upper", d.bounds.upper_nats);
        row.status = SolveStatus::BoundsOnly.as_str().into();
        Ok(row)
    }

    fn omni(&self, p_t: f64) -> Result<Row> {
        let out = solve_omni(&self.pair, p_t, &self.search())?;
        let mut row = Row::solved(p_t, "omni", &out.result);
        if let Some(b) = out.bounds {
            row.lower = Some(b.lower_nats);
            row.upper = Some(b.upper_nats);
            row.components.insert("c_iso_lower", b.lower_nats);
            row.components.insert("c_iso_upper", b.upper_nats);
        }
        Ok(row)
    }

    fn rsv(&self, p_t: f64) -> Result<Row> {
        let ch = detect_common_rsv(&self.pair, self.tol).map_err(|e| {
            WiretapError::NotApplicable(format!(
                "channels do not commute (commutator {:.3e} > {:.3e})",
                e.commutator_norm, e.allowed
            ))
        })?;
        Ok(Row::solved(p_t, "rsv", &solve_common_rsv(&ch, p_t, &self.search())?))
    }

    fn certify(&self, p_t: f64) -> Vec<Row> {
        let cfg = CertifyConfig { commute_tol: self.tol, ..Default::default() };
        let runs: [(&str, Certifier); 3] = [("zf", zf_certify), ("wf", wf_certify), ("is", is_certify)];
        runs.iter()
            .map(|&(name, f)| {
                self.guard(p_t, name, |p| {
                    let rep = f(&self.pair, p, &cfg)?;
                    let mut row = Row::new(p, name);
                    row.capacity = rep.certified_capacity;
                    row.lower = rep.certified_capacity;
                    row.upper = rep.certified_capacity;
                    row.lambda = rep.multiplier;
                    row.active_modes = rep.certified_covariance.as_ref().map(HermitianMatrix::rank);
                    row.covariance = rep.certified_covariance.as_ref().map(matrix_entries);
                    row.status = rep.verdict.as_str().into();
                    Ok(row)
                })
            })
            .collect()
    }

    fn mc(&self, p_t: f64) -> Result<Row> {
        let cfg = self.oracle.unwrap_or_default();
        let out = mc_capacity(&self.pair, p_t, Objective::Exact, &cfg)?;
        let mut row = Row::new(p_t, "oracle");
        row.capacity = Some(out.best_value);
        row.lower = Some(out.best_value);
        row.active_modes = Some(out.best_covariance.rank());
        row.components.insert("c_mc", out.best_value);
        row.covariance = Some(matrix_entries(&out.best_covariance));
        row.status = "Estimate".into();
        Ok(row)
    }
}
