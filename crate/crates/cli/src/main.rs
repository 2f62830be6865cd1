//! `planar-cc`: planarity diagnostics, central configuration solves, residuals,
//! classification and seeded verification suites, as JSON reports.
//!
//! Exit codes: 0 success, 1 output write failure, 2 unreadable or invalid input,
//! 3 no convergence, 4 degenerate or unrealizable geometry, 5 unknown suite.

mod input;
mod svg;

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use serde_json::{json, Value};
use thiserror::Error;

use planar_cc::cc::{
    dziobek_residuals, fit_multipliers, lambda_from_config, multiplier_estimate, position_cc_residual,
    system_residuals, System,
};
use planar_cc::classify::{classify_configuration, verify_propositions};
use planar_cc::planarity::{planarity_report, planarity_report_from_distances};
use planar_cc::solver::{mass_sweep, solve_distance_space, solve_position_space, SolveOptions, SolveResult};
use planar_cc::suites::run_suite;
use planar_cc::Error;

use input::{Constraint, ExperimentSpec};

const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("cannot read {path}: {source}")]
    Read { path: PathBuf, source: std::io::Error },
    #[error("invalid input: {0}")]
    Parse(String),
    #[error("cannot write {path}: {source}")]
    Write { path: PathBuf, source: std::io::Error },
    #[error(transparent)]
    Model(#[from] Error),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Write { .. } => 1,
            CliError::Read { .. } | CliError::Parse(_) => 2,
            CliError::Model(e) => match e {
                Error::InvalidMasses(_) | Error::PreconditionViolated(_) => 2,
                Error::NoConvergence { .. } | Error::ContinuationBreak { .. } => 3,
                Error::UnknownSuite(_) => 5,
                _ => 4,
            },
        }
    }
}

#[derive(Parser)]
#[command(name = "planar-cc", version, about = "Planar four-body central configurations")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Io {
    /// JSON input document.
    #[arg(long)]
    input: PathBuf,
    /// Write the JSON report here instead of stdout.
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct SolveFlags {
    /// Distance-space constraint; without it the position-space equations are solved.
    #[arg(long, value_enum)]
    constraint: Option<Constraint>,
    /// Convergence tolerance on the scaled residual norm.
    #[arg(long)]
    tol: Option<f64>,
}

#[derive(Subcommand)]
enum Command {
    /// Planarity certificates for a configuration.
    Planarity {
        #[command(flatten)]
        io: Io,
    },
    /// Solve for a central configuration from an initial guess.
    Solve {
        #[command(flatten)]
        io: Io,
        #[command(flatten)]
        flags: SolveFlags,
        /// Also draw the solution as SVG.
        #[arg(long)]
        svg: Option<PathBuf>,
    },
    /// Evaluate the equations at given (or fitted) multipliers.
    Residuals {
        #[command(flatten)]
        io: Io,
        #[arg(long, value_enum)]
        constraint: Option<Constraint>,
    },
    /// Shape, convexity and co-circularity of a configuration.
    Classify {
        #[command(flatten)]
        io: Io,
        #[arg(long)]
        svg: Option<PathBuf>,
    },
    /// Run a named randomized suite.
    Verify {
        suite: String,
        #[arg(long)]
        seed: u64,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Continue a solution along the input's mass_path.
    Sweep {
        #[command(flatten)]
        io: Io,
        #[command(flatten)]
        flags: SolveFlags,
    },
}

fn read_spec(path: &Path) -> Result<ExperimentSpec, CliError> {
    let text = fs::read_to_string(path).map_err(|source| CliError::Read {
        path: path.to_path_buf(),
        source,
    })?;
    ExperimentSpec::parse(&text)
}

fn write_text(path: &Path, text: &str) -> Result<(), CliError> {
    fs::write(path, text).map_err(|source| CliError::Write {
        path: path.to_path_buf(),
        source,
    })
}

fn emit(command: &str, result: impl Serialize, output: Option<&Path>) -> Result<(), CliError> {
    let doc = json!({
        "schema_version": SCHEMA_VERSION,
        "command": command,
        "result": result,
    });
    let mut text = serde_json::to_string_pretty(&doc).expect("reports serialize");
    text.push('\n');
    match output {
        Some(path) => write_text(path, &text),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn solve_options(spec: &ExperimentSpec, tol: Option<f64>) -> SolveOptions {
    let mut opts = SolveOptions::default();
    if let Some(t) = tol.or(spec.tol) {
        opts = opts.with_tol(t);
    }
    if let Some(i0) = spec.i0 {
        opts = opts.with_i0(i0);
    }
    opts
}

fn run_solve(spec: &ExperimentSpec, flags: &SolveFlags) -> Result<SolveResult, CliError> {
    let masses = spec.masses()?;
    let opts = solve_options(spec, flags.tol);
    let result = match flags.constraint.or(spec.constraint) {
        Some(c) => solve_distance_space(&masses, &spec.distances()?, c.into(), &opts)?,
        None => solve_position_space(&masses, &spec.configuration()?, &opts)?,
    };
    Ok(result)
}

fn solve_report(result: &SolveResult) -> Value {
    let classification = result.configuration().map(|c| classify_configuration(&c));
    let (d1, d2) = dziobek_residuals(&result.distances, result.multipliers.lambda);
    let proposition = match verify_propositions(&result.masses, result) {
        Ok(p) => json!(p),
        Err(e) => json!({ "not_applicable": e.to_string() }),
    };
    json!({
        "solution": result,
        "classification": classification,
        "dziobek_residuals": [d1, d2],
        "proposition": proposition,
    })
}

fn residuals(spec: &ExperimentSpec, constraint: Option<Constraint>) -> Result<Value, CliError> {
    let masses = spec.masses()?;
    match constraint.or(spec.constraint) {
        Some(c) => {
            let system: System = c.into();
            let dist = spec.distances()?;
            let (mut multipliers, fitted) = match spec.multipliers {
                Some(m) => {
                    let extra = match system {
                        System::Both => [m.eta, m.eta2].into_iter().collect::<Option<Vec<f64>>>(),
                        System::Cocircular => m.sigma.map(|s| vec![s]),
                        _ => m.eta.map(|e| vec![e]),
                    }
                    .ok_or_else(|| CliError::Parse(format!("multipliers for {system:?} are incomplete")))?;
                    (multiplier_estimate(system, m.lambda, &extra, 0.0), false)
                }
                None => (fit_multipliers(&masses, &dist, system)?, true),
            };
            let report = system_residuals(&masses, &dist, system, &multipliers, spec.i0)?;
            multipliers.residual_norm = report.pairs.norm();
            let (d1, d2) = dziobek_residuals(&dist, multipliers.lambda);
            Ok(json!({
                "multipliers": multipliers,
                "fitted": fitted,
                "report": report,
                "dziobek_residuals": [d1, d2],
            }))
        }
        None => {
            let config = spec.configuration()?;
            let (lambda_position, fitted) = match spec.multipliers {
                Some(m) => (m.lambda * masses.total(), false),
                None => (lambda_from_config(&config)?.lambda, true),
            };
            let r = position_cc_residual(&config, lambda_position)?;
            let norm = r.iter().map(|x| x * x).sum::<f64>().sqrt();
            Ok(json!({
                "lambda_position": lambda_position,
                "lambda": lambda_position / masses.total(),
                "fitted": fitted,
                "residual": r,
                "residual_norm": norm,
            }))
        }
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Planarity { io } => {
            let spec = read_spec(&io.input)?;
            let report = match spec.positions {
                Some(_) => planarity_report(&spec.configuration()?)?,
                None => planarity_report_from_distances(&spec.distances()?)?,
            };
            emit("planarity", report, io.output.as_deref())
        }
        Command::Solve { io, flags, svg } => {
            let spec = read_spec(&io.input)?;
            let result = run_solve(&spec, &flags)?;
            if let (Some(path), Some(config)) = (svg, result.configuration()) {
                write_text(&path, &svg::render(&config))?;
            }
            emit("solve", solve_report(&result), io.output.as_deref())
        }
        Command::Residuals { io, constraint } => {
            let spec = read_spec(&io.input)?;
            emit("residuals", residuals(&spec, constraint)?, io.output.as_deref())
        }
        Command::Classify { io, svg } => {
            let spec = read_spec(&io.input)?;
            let config = spec.configuration()?;
            if let Some(path) = svg {
                write_text(&path, &svg::render(&config))?;
            }
            emit("classify", classify_configuration(&config), io.output.as_deref())
        }
        Command::Verify { suite, seed, output } => {
            let summary = run_suite(&suite, seed)?;
            emit("verify", summary, output.as_deref())
        }
        Command::Sweep { io, flags } => {
            let spec = read_spec(&io.input)?;
            let path = spec.mass_path()?;
            let seed = run_solve(&spec, &flags)?;
            let sweep = mass_sweep(&path, &seed, &solve_options(&spec, flags.tol))?;
            let (last_good, stopped) = match &sweep.stopped {
                Some(Error::ContinuationBreak { last_good, cause }) => (*last_good, Some(cause.to_string())),
                _ => (None, None),
            };
            let report = json!({
                "seed": seed,
                "results": sweep.results,
                "completed": sweep.stopped.is_none(),
                "last_good": last_good,
                "stopped": stopped,
            });
            emit("sweep", report, io.output.as_deref())?;
            match sweep.stopped {
                Some(e) => Err(e.into()),
                None => Ok(()),
            }
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
