//! `wiretap`: secrecy-capacity sweeps for Gaussian MIMO wiretap channels.
//!
//! Exit codes: 0 success, 1 input error, 2 solver non-convergence.

mod output;
mod run;
mod scenario;

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use wiretap_core::{ChannelPair, OracleConfig};

use run::{Failure, Plan, Row};
use scenario::{db_grid, DbRange, Format, ScenarioSpec, Solver, Units};

#[derive(Debug)]
pub enum CliError {
    Input(String),
    Io(io::Error),
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Input(msg) => write!(f, "{msg}"),
            CliError::Io(e) => write!(f, "i/o error: {e}"),
        }
    }
}

impl From<io::Error> for CliError {
    fn from(e: io::Error) -> Self {
        CliError::Io(e)
    }
}

#[derive(Parser, Debug)]
#[command(name = "wiretap", version, about = "Secrecy capacity of Gaussian MIMO wiretap channels")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Solve a scenario at a single transmit power; JSON output includes the covariance
    Solve {
        #[command(flatten)]
        common: Common,
        /// Transmit power overriding the scenario grid
        #[arg(long)]
        power: Option<f64>,
    },
    /// Evaluate the scenario's solver over its power grid
    Sweep(Common),
    /// Run the zero-forcing, water-filling and isotropic certificates
    Certify(Common),
    /// Monte-Carlo capacity estimate over the power grid
    Oracle(Common),
    /// Emit the data behind a built-in figure
    Figure(FigureArgs),
}

#[derive(Args, Debug, Clone)]
struct Output {
    /// Output file (stdout when omitted)
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum)]
    format: Option<Format>,
    #[arg(long, value_enum)]
    units: Option<Units>,
    /// Monte-Carlo seed
    #[arg(long)]
    seed: Option<u64>,
    /// Monte-Carlo samples per grid point
    #[arg(long)]
    samples: Option<usize>,
    /// Structure-detection tolerance for commuting and omnidirectional channels
    #[arg(long, default_value_t = 1e-8)]
    tol: f64,
}

#[derive(Args, Debug)]
struct Common {
    /// Scenario file (JSON)
    #[arg(long)]
    input: PathBuf,
    #[command(flatten)]
    output: Output,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
enum Figure {
    /// Weak-eavesdropper approximation against the Monte-Carlo estimate
    Fig1,
    /// Isotropic eavesdropper, g = [2, 1], several ε
    Fig3,
}

#[derive(Args, Debug)]
struct FigureArgs {
    #[arg(value_enum)]
    figure: Figure,
    #[arg(long, allow_hyphen_values = true)]
    db_start: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    db_stop: Option<f64>,
    #[arg(long, default_value_t = 1.0)]
    db_step: f64,
    /// Eavesdropper gains for fig3
    #[arg(long, value_delimiter = ',', default_values_t = [0.0, 0.1, 0.5])]
    epsilon: Vec<f64>,
    #[command(flatten)]
    output: Output,
}

impl Output {
    fn oracle(&self, base: OracleConfig) -> OracleConfig {
        OracleConfig {
            samples: self.samples.unwrap_or(base.samples),
            seed: self.seed.unwrap_or(base.seed),
            ..base
        }
    }

    fn validate(&self) -> Result<(), CliError> {
        if !(self.tol > 0.0 && self.tol.is_finite()) {
            return Err(CliError::Input(format!("--tol must be positive, got {}", self.tol)));
        }
        if self.samples == Some(0) {
            return Err(CliError::Input("--samples must be at least 1".into()));
        }
        Ok(())
    }

    fn emit(&self, rows: &[Row], format: Format, units: Units) -> Result<(), CliError> {
        match &self.out {
            Some(path) => {
                let file = File::create(path)
                    .map_err(|e| CliError::Input(format!("cannot create {}: {e}", path.display())))?;
                let mut w = BufWriter::new(file);
                output::write_rows(&mut w, rows, format, units)?;
                w.flush()?;
            }
            None => output::write_rows(io::stdout().lock(), rows, format, units)?,
        }
        Ok(())
    }
}

fn load(path: &PathBuf) -> Result<ScenarioSpec, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Input(format!("cannot read {}: {e}", path.display())))?;
    ScenarioSpec::from_json(&text).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
}

fn run_scenario(
    common: &Common,
    forced: Option<Solver>,
    power: Option<f64>,
    single: bool,
) -> Result<Vec<Row>, CliError> {
    common.output.validate()?;
    let spec = load(&common.input)?;
    let pair = spec.channel()?;
    let mut powers = spec.powers()?;
    if let Some(p) = power {
        if !(p > 0.0 && p.is_finite()) {
            return Err(CliError::Input(format!("--power must be positive, got {p}")));
        }
        powers = vec![p];
    }
    if single && powers.len() != 1 {
        return Err(CliError::Input(format!(
            "solve needs a single transmit power, the grid has {} (use --power or `sweep`)",
            powers.len()
        )));
    }
    let solver = forced.unwrap_or(spec.solver);
    let oracle_spec = spec.oracle.unwrap_or_default();
    let wants_oracle = spec.oracle.is_some() || solver == Solver::Oracle;
    let plan = Plan {
        pair,
        solver,
        oracle: wants_oracle.then(|| common.output.oracle(oracle_spec.config())),
        tol: common.output.tol,
        units: common.output.units.or(spec.units).unwrap_or_default(),
        keep_covariance: single,
    };
    let rows = plan.sweep(&powers);
    let format = common.output.format.or(spec.format).unwrap_or_default();
    common.output.emit(&rows, format, plan.units)?;
    Ok(rows)
}

fn db_range(start: f64, stop: f64, step: f64) -> Result<Vec<f64>, CliError> {
    let grid = db_grid(&DbRange { start, stop, step })?;
    if grid.is_empty() {
        return Err(CliError::Input("power: grid is empty".into()));
    }
    Ok(grid)
}

fn run_figure(args: &FigureArgs) -> Result<Vec<Row>, CliError> {
    let out = &args.output;
    out.validate()?;
    let units = out.units.unwrap_or_default();
    let mut rows = Vec::new();
    match args.figure {
        Figure::Fig1 => {
            let powers =
                db_range(args.db_start.unwrap_or(-10.0), args.db_stop.unwrap_or(20.0), args.db_step)?;
            let pair = ChannelPair::from_real_rows(
                &[vec![2.0, 0.0], vec![0.0, 1.0]],
                &[vec![0.2, 0.1], vec![0.1, 0.1]],
            )
            .map_err(|e| CliError::Input(e.to_string()))?;
            let plan = Plan {
                pair,
                solver: Solver::Weak,
                oracle: Some(out.oracle(OracleConfig::default())),
                tol: out.tol,
                units,
                keep_covariance: false,
            };
            rows = plan.sweep(&powers);
        }
        Figure::Fig3 => {
            let powers =
                db_range(args.db_start.unwrap_or(-20.0), args.db_stop.unwrap_or(30.0), args.db_step)?;
            for &eps in &args.epsilon {
                if !(eps >= 0.0 && eps.is_finite()) {
                    return Err(CliError::Input(format!("--epsilon must be non-negative, got {eps}")));
                }
                let pair = ChannelPair::from_diagonals(&[2.0, 1.0], &[eps, eps])
                    .map_err(|e| CliError::Input(e.to_string()))?;
                let plan = Plan {
                    pair,
                    solver: Solver::Isotropic,
                    oracle: None,
                    tol: out.tol,
                    units,
                    keep_covariance: false,
                };
                rows.extend(plan.sweep(&powers).into_iter().map(|mut r| {
                    r.solver = format!("isotropic(eps={eps})");
                    r
                }));
            }
        }
    }
    out.emit(&rows, out.format.unwrap_or_default(), units)?;
    Ok(rows)
}

fn exit_code(rows: &[Row]) -> ExitCode {
    let failures: Vec<Failure> = rows.iter().filter_map(|r| r.failure).collect();
    if failures.contains(&Failure::NonConvergence) {
        ExitCode::from(2)
    } else if failures.is_empty() {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    let result = match &cli.command {
        Command::Solve { common, power } => run_scenario(common, None, *power, true),
        Command::Sweep(common) => run_scenario(common, None, None, false),
        Command::Certify(common) => run_scenario(common, Some(Solver::Certify), None, false),
        Command::Oracle(common) => run_scenario(common, Some(Solver::Oracle), None, false),
        Command::Figure(args) => run_figure(args),
    };
    match result {
        Ok(rows) => {
            for r in rows.iter().filter(|r| r.failure.is_some()) {
                eprintln!("wiretap: P_T = {}: {}", r.p_t, r.status);
            }
            exit_code(&rows)
        }
        Err(e) => {
            eprintln!("wiretap: {e}");
            ExitCode::from(1)
        }
    }
}
