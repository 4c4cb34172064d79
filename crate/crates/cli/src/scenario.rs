//! JSON scenario files.
//!
//! ```json
//! {
//!   "matrix_kind": "W",
//!   "legitimate": [[2, 0], [0, 1]],
//!   "eavesdropper": [[0.2, [0.1, 0.05]], [[0.1, -0.05], 0.1]],
//!   "power": { "db_range": { "start": -10, "stop": 20, "step": 1 } },
//!   "solver": "auto",
//!   "oracle": { "samples": 200000, "seed": 7 }
//! }
//! ```
//!
//! Entries are reals or `[re, im]` pairs. With `"matrix_kind": "H"` the two
//! matrices are channel matrices (`n_k x m`) and the Gram matrices are formed
//! internally.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use wiretap_core::{CMatrix, ChannelPair, HermitianMatrix, OracleConfig};

use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize, Serialize)]
pub enum MatrixKind {
    W,
    H,
}

#[derive(Debug, Clone, Copy, PartialEq, Deserialize, Serialize)]
#[serde(untagged)]
pub enum Entry {
    Real(f64),
    Complex([f64; 2]),
}

impl Entry {
    fn value(self) -> Complex64 {
        match self {
            Entry::Real(x) => Complex64::new(x, 0.0),
            Entry::Complex([re, im]) => Complex64::new(re, im),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct DbRange {
    pub start: f64,
    pub stop: f64,
    pub step: f64,
}

#[derive(Debug, Clone, PartialEq, Deserialize, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum PowerGrid {
    /// Linear transmit powers.
    Values(Vec<f64>),
    /// `10 log10 P_T` from `start` to `stop` inclusive.
    DbRange(DbRange),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Deserialize, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Solver {
    #[default]
    Auto,
    Weak,
    Isotropic,
    Omni,
    Rsv,
    Certify,
    Oracle,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Deserialize, Serialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum Format {
    #[default]
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Deserialize, Serialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum Units {
    #[default]
    Nats,
    Bits,
}

impl Units {
    pub fn convert(self, nats: f64) -> f64 {
        match self {
            Units::Nats => nats,
            Units::Bits => nats / std::f64::consts::LN_2,
        }
    }
}

/// Monte-Carlo settings; missing fields keep the library defaults.
#[derive(Debug, Clone, Copy, PartialEq, Default, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct OracleSpec {
    pub samples: Option<usize>,
    pub seed: Option<u64>,
    pub refine_rounds: Option<usize>,
    pub refine_samples: Option<usize>,
    pub seed_candidates: Option<bool>,
    pub real_only: Option<bool>,
}

impl OracleSpec {
    pub fn config(&self) -> OracleConfig {
        let d = OracleConfig::default();
        OracleConfig {
            samples: self.samples.unwrap_or(d.samples),
            seed: self.seed.unwrap_or(d.seed),
            refine_rounds: self.refine_rounds.unwrap_or(d.refine_rounds),
            refine_samples: self.refine_samples.unwrap_or(d.refine_samples),
            seed_candidates: self.seed_candidates.unwrap_or(d.seed_candidates),
            real_only: self.real_only.unwrap_or(d.real_only),
            ..d
        }
    }
}

#[derive(Debug, Clone, PartialEq, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioSpec {
    pub matrix_kind: MatrixKind,
    pub legitimate: Vec<Vec<Entry>>,
    pub eavesdropper: Vec<Vec<Entry>>,
    pub power: PowerGrid,
    #[serde(default)]
    pub solver: Solver,
    /// Present: add Monte-Carlo rows next to the selected solver.
    #[serde(default)]
    pub oracle: Option<OracleSpec>,
    #[serde(default)]
    pub format: Option<Format>,
    #[serde(default)]
    pub units: Option<Units>,
}

impl ScenarioSpec {
    pub fn from_json(text: &str) -> Result<Self, CliError> {
        serde_json::from_str(text).map_err(|e| CliError::Input(format!("scenario: {e}")))
    }

    pub fn channel(&self) -> Result<ChannelPair, CliError> {
        let h1 = to_matrix("legitimate", &self.legitimate)?;
        let h2 = to_matrix("eavesdropper", &self.eavesdropper)?;
        let pair = match self.matrix_kind {
            MatrixKind::H => ChannelPair::from_channels(&h1, &h2),
            MatrixKind::W => {
                for (name, h) in [("legitimate", &h1), ("eavesdropper", &h2)] {
                    if !h.is_square() {
                        return Err(CliError::Input(format!(
                            "{name}: Gram matrix must be square, got {}x{}",
                            h.nrows(),
                            h.ncols()
                        )));
                    }
                }
                HermitianMatrix::new(h1)
                    .and_then(|w1| Ok((w1, HermitianMatrix::new(h2)?)))
                    .and_then(|(w1, w2)| ChannelPair::from_gram(w1, w2))
            }
        };
        pair.map_err(|e| CliError::Input(format!("channel: {e}")))
    }

    pub fn powers(&self) -> Result<Vec<f64>, CliError> {
        let grid = match &self.power {
            PowerGrid::Values(v) => v.clone(),
            PowerGrid::DbRange(r) => db_grid(r)?,
        };
        if grid.is_empty() {
            return Err(CliError::Input("power: grid is empty".into()));
        }
        if let Some(p) = grid.iter().find(|p| !(p.is_finite() && **p > 0.0)) {
            return Err(CliError::Input(format!("power: every P_T must be positive and finite, got {p}")));
        }
        Ok(grid)
    }
}

pub fn db_grid(r: &DbRange) -> Result<Vec<f64>, CliError> {
    if !(r.start.is_finite() && r.stop.is_finite() && r.step.is_finite()) {
        return Err(CliError::Input("power.db_range: start, stop and step must be finite".into()));
    }
    if r.step <= 0.0 {
        return Err(CliError::Input(format!("power.db_range: step must be positive, got {}", r.step)));
    }
    if r.stop < r.start {
        return Ok(Vec::new());
    }
    let n = ((r.stop - r.start) / r.step + 1e-9).floor() as usize + 1;
    Ok((0..n).map(|i| db_to_power(r.start + i as f64 * r.step)).collect())
}

pub fn db_to_power(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

pub fn power_to_db(p: f64) -> f64 {
    10.0 * p.log10()
}

fn to_matrix(name: &str, rows: &[Vec<Entry>]) -> Result<CMatrix, CliError> {
    let cols = rows.first().map_or(0, Vec::len);
    if rows.is_empty() || cols == 0 {
        return Err(CliError::Input(format!("{name}: matrix is empty")));
    }
    if let Some(i) = rows.iter().position(|r| r.len() != cols) {
        return Err(CliError::Input(format!(
            "{name}: row {i} has {} entries, expected {cols}",
            rows[i].len()
        )));
    }
    let m = CMatrix::from_fn(rows.len(), cols, |i, j| rows[i][j].value());
    if m.iter().any(|z| !(z.re.is_finite() && z.im.is_finite())) {
        return Err(CliError::Input(format!("{name}: entries must be finite")));
    }
    Ok(m)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn base() -> serde_json::Value {
        serde_json::json!({
            "matrix_kind": "W",
            "legitimate": [[2, 0], [0, 1]],
            "eavesdropper": [[0.2, 0.1], [0.1, 0.1]],
            "power": {"values": [1.0]}
        })
    }

    fn parse(v: serde_json::Value) -> Result<ScenarioSpec, CliError> {
        ScenarioSpec::from_json(&v.to_string())
    }

    #[test]
    fn complex_entries_round_trip() {
        let mut v = base();
        v["eavesdropper"] = serde_json::json!([[0.2, [0.1, 0.05]], [[0.1, -0.05], 0.1]]);
        let s = parse(v).unwrap();
        let pair = s.channel().unwrap();
        assert_eq!(pair.w2().get(0, 1), Complex64::new(0.1, 0.05));
        let again = ScenarioSpec::from_json(&serde_json::to_string(&s).unwrap()).unwrap();
        assert_eq!(again, s);
    }

    #[test]
    fn db_grid_is_inclusive() {
        let g = db_grid(&DbRange { start: -10.0, stop: 20.0, step: 1.0 }).unwrap();
        assert_eq!(g.len(), 31);
        assert!((g[0] - 0.1).abs() < 1e-15);
        assert!((g[30] - 100.0).abs() < 1e-12);
        assert!(db_grid(&DbRange { start: 0.0, stop: 1.0, step: 0.0 }).is_err());
        assert!(db_grid(&DbRange { start: f64::NAN, stop: 1.0, step: 1.0 }).is_err());
    }

    #[test]
    fn empty_grid_rejected() {
        let mut v = base();
        v["power"] = serde_json::json!({"values": []});
        assert!(parse(v).unwrap().powers().is_err());
        let mut v = base();
        v["power"] = serde_json::json!({"db_range": {"start": 5, "stop": 0, "step": 1}});
        assert!(parse(v).unwrap().powers().is_err());
    }

    #[test]
    fn malformed_specs_name_the_problem() {
        let mut v = base();
        v["legitmate"] = v["legitimate"].clone();
        let err = parse(v).unwrap_err().to_string();
        assert!(err.contains("legitmate"), "{err}");

        let err = ScenarioSpec::from_json("{\n  \"matrix_kind\": \"Q\"\n}").unwrap_err().to_string();
        assert!(err.contains("line 2"), "{err}");

        let mut v = base();
        v["legitimate"] = serde_json::json!([[2, 0], [0]]);
        let err = parse(v).unwrap().channel().unwrap_err().to_string();
        assert!(err.contains("row 1"), "{err}");

        let mut v = base();
        v["legitimate"] = serde_json::json!([[2, 1, 0], [0, 1, 0]]);
        assert!(parse(v).unwrap().channel().is_err());
    }

    #[test]
    fn channel_matrices_form_grams() {
        let mut v = base();
        v["matrix_kind"] = serde_json::json!("H");
        v["legitimate"] = serde_json::json!([[1, 1]]);
        v["eavesdropper"] = serde_json::json!([[[0, 1], 0], [0, 2]]);
        let pair = parse(v).unwrap().channel().unwrap();
        assert_eq!(pair.m(), 2);
        assert!((pair.w1().get(0, 1).re - 1.0).abs() < 1e-15);
        assert!((pair.w2().get(1, 1).re - 4.0).abs() < 1e-15);
    }

    #[test]
    fn bits_are_nats_over_ln2() {
        assert_eq!(Units::Bits.convert(std::f64::consts::LN_2), 1.0);
        assert_eq!(Units::Nats.convert(0.3), 0.3);
    }
}
