//! `cohest` — coherence lower bounds from stabilizer expectation values.
//!
//! Subcommands:
//!
//! - `tightness-scan` — exact-constraint pipeline over a qubit range; the
//!   output reproduces the pure-state tightness curves per measure.
//! - `noise-scan` — depolarizing-noise grid at fixed qubit count.
//! - `simulate` — emit expectation records (finite-shot or exact) as CSV.
//! - `estimate` — bounds from an ingested record CSV, optionally with an
//!   exhaustive subset search for the maximal estimate.
//!
//! Exit codes: 0 success, 2 configuration error, 3 infeasible everywhere,
//! 4 parse error.

mod config;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use cohest::harness::{
    self, estimate, noise_scan, tightness_scan, Family, HarnessError, RunConfig, SubsetPolicy,
};
use cohest::majorization::MajorizationError;
use cohest::measurement::{self, MeasurementError};
use cohest::states::DiagonalDistribution;

#[derive(Parser)]
#[command(name = "cohest", version, about = "Coherence bounds from stabilizer data")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Exact-constraint tightness scan over a qubit range (pure states).
    TightnessScan(CommonArgs),
    /// Depolarizing-noise scan at a fixed qubit count.
    NoiseScan(CommonArgs),
    /// Emit expectation records as CSV (finite-shot when --shots > 0).
    Simulate(SimulateArgs),
    /// Bounds from a CSV of expectation records.
    Estimate(EstimateArgs),
}

#[derive(Args, Default, Clone)]
struct CommonArgs {
    /// Flat key=value config file; explicit flags override file values.
    #[arg(long)]
    config: Option<PathBuf>,

    /// State family: ghz | cluster.
    #[arg(long)]
    family: Option<String>,

    /// Qubit count (start of the range for tightness-scan).
    #[arg(long)]
    n: Option<usize>,

    /// End of the qubit range (tightness-scan only).
    #[arg(long = "n-max")]
    n_max: Option<usize>,

    /// Single noise weight in [0, 1).
    #[arg(long)]
    eta: Option<f64>,

    /// Noise grid resolution: eta = i/steps for i = 0..steps.
    #[arg(long = "eta-steps")]
    eta_steps: Option<usize>,

    /// Shots per operator; 0 selects exact expectation values.
    #[arg(long)]
    shots: Option<u64>,

    /// Relaxation width: intervals are mean ± w·sigma.
    #[arg(long)]
    w: Option<f64>,

    /// Constraint subsets: generators | group | search.
    #[arg(long)]
    subsets: Option<String>,

    /// RNG seed for finite-shot sampling.
    #[arg(long)]
    seed: Option<u64>,

    /// Output path ("-" for stdout).
    #[arg(long)]
    out: Option<PathBuf>,

    /// Output format: csv | json.
    #[arg(long)]
    format: Option<String>,
}

#[derive(Args, Clone, Default)]
struct SimulateArgs {
    #[command(flatten)]
    common: CommonArgs,

    /// Also write the exact computational-basis diagonal to this CSV.
    #[arg(long = "diag-out")]
    diag_out: Option<PathBuf>,
}

#[derive(Args, Clone, Default)]
struct EstimateArgs {
    #[command(flatten)]
    common: CommonArgs,

    /// Input record CSV (schema: operator,mean,sigma,shots).
    #[arg(long)]
    input: Option<PathBuf>,

    /// Measured computational-basis diagonal (schema: index,probability).
    /// Falls back to the analytic family diagonal when absent.
    #[arg(long)]
    diag: Option<PathBuf>,
}

/// Errors mapped onto the documented exit codes.
#[derive(Debug)]
enum CliError {
    Config(String),
    Infeasible(String),
    Parse(String),
    Other(String),
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::Config(_) => 2,
            CliError::Infeasible(_) => 3,
            CliError::Parse(_) => 4,
            CliError::Other(_) => 1,
        }
    }

    fn message(&self) -> &str {
        match self {
            CliError::Config(m) | CliError::Infeasible(m) | CliError::Parse(m) | CliError::Other(m) => m,
        }
    }
}

impl From<HarnessError> for CliError {
    fn from(err: HarnessError) -> Self {
        match &err {
            HarnessError::Config(_) => CliError::Config(err.to_string()),
            HarnessError::AllSubsetsInfeasible { .. } => CliError::Infeasible(err.to_string()),
            HarnessError::Measurement(m) => measurement_error(m, err.to_string()),
            HarnessError::Majorization(MajorizationError::NoFeasibleSolution) => {
                CliError::Infeasible(err.to_string())
            }
            _ => CliError::Other(err.to_string()),
        }
    }
}

fn measurement_error(err: &MeasurementError, text: String) -> CliError {
    match err {
        MeasurementError::Parse { .. }
        | MeasurementError::UnknownOperator { .. }
        | MeasurementError::DuplicateOperator(_)
        | MeasurementError::Csv(_) => CliError::Parse(text),
        MeasurementError::Io(_) => CliError::Other(text),
        _ => CliError::Config(text),
    }
}

type Result<T> = std::result::Result<T, CliError>;

/// Fill unset flags from the config file (if any). `extra_keys` lists the
/// subcommand-specific keys accepted in the file.
fn apply_config(args: &mut CommonArgs, extra_keys: &[&str]) -> Result<Option<std::collections::HashMap<String, String>>> {
    let Some(path) = args.config.clone() else {
        return Ok(None);
    };
    let values = config::load(&path, extra_keys).map_err(CliError::Config)?;
    let fill = CliError::Config;
    config::fill(&mut args.family, &values, "family").map_err(fill)?;
    config::fill(&mut args.n, &values, "n").map_err(fill)?;
    config::fill(&mut args.n_max, &values, "n-max").map_err(fill)?;
    config::fill(&mut args.eta, &values, "eta").map_err(fill)?;
    config::fill(&mut args.eta_steps, &values, "eta-steps").map_err(fill)?;
    config::fill(&mut args.shots, &values, "shots").map_err(fill)?;
    config::fill(&mut args.w, &values, "w").map_err(fill)?;
    config::fill(&mut args.subsets, &values, "subsets").map_err(fill)?;
    config::fill(&mut args.seed, &values, "seed").map_err(fill)?;
    config::fill(&mut args.out, &values, "out").map_err(fill)?;
    config::fill(&mut args.format, &values, "format").map_err(fill)?;
    Ok(Some(values))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::TightnessScan(args) => cmd_tightness_scan(args),
        Command::NoiseScan(args) => cmd_noise_scan(args),
        Command::Simulate(args) => cmd_simulate(args),
        Command::Estimate(args) => cmd_estimate(args),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {}", err.message());
            ExitCode::from(err.code())
        }
    }
}

fn parse_family(args: &CommonArgs) -> Result<Family> {
    args.family
        .as_deref()
        .unwrap_or("ghz")
        .parse()
        .map_err(|e: HarnessError| CliError::Config(e.to_string()))
}

fn parse_policy(args: &CommonArgs) -> Result<SubsetPolicy> {
    args.subsets
        .as_deref()
        .unwrap_or("group")
        .parse()
        .map_err(|e: HarnessError| CliError::Config(e.to_string()))
}

fn parse_format(args: &CommonArgs) -> Result<output::Format> {
    match args.format.as_deref().unwrap_or("csv") {
        "csv" => Ok(output::Format::Csv),
        "json" => Ok(output::Format::Json),
        other => Err(CliError::Config(format!("unknown format '{other}'"))),
    }
}

/// Noise grid: an explicit --eta wins; otherwise i/steps for i = 0..steps.
fn eta_grid(args: &CommonArgs) -> Result<Vec<f64>> {
    if let Some(eta) = args.eta {
        return Ok(vec![eta]);
    }
    let steps = args.eta_steps.unwrap_or(10);
    if steps == 0 {
        return Err(CliError::Config("eta-steps must be positive".into()));
    }
    Ok((0..steps).map(|i| i as f64 / steps as f64).collect())
}

fn cmd_tightness_scan(mut args: CommonArgs) -> Result<()> {
    apply_config(&mut args, &[])?;
    if args.shots.unwrap_or(0) != 0 {
        return Err(CliError::Config(
            "tightness-scan is analytic; --shots must be 0".into(),
        ));
    }
    if args.eta.unwrap_or(0.0) != 0.0 {
        return Err(CliError::Config(
            "tightness-scan studies pure states; --eta must be 0".into(),
        ));
    }
    let family = parse_family(&args)?;
    let n_min = args.n.unwrap_or(3).max(family.min_qubits());
    let config = RunConfig {
        family,
        n_min,
        n_max: args.n_max.unwrap_or_else(|| n_min.max(8)),
        etas: vec![],
        shots: 0,
        w: args.w.unwrap_or(3.0),
        subsets: parse_policy(&args)?,
        seed: args.seed.unwrap_or(0),
    };
    let rows = tightness_scan(&config)?;
    output::write_rows(&rows, args.out.as_deref(), parse_format(&args)?)
        .map_err(|e| CliError::Other(e.to_string()))
}

fn cmd_noise_scan(mut args: CommonArgs) -> Result<()> {
    apply_config(&mut args, &[])?;
    let family = parse_family(&args)?;
    let n = args.n.unwrap_or(4);
    let config = RunConfig {
        family,
        n_min: n,
        n_max: n,
        etas: eta_grid(&args)?,
        shots: args.shots.unwrap_or(0),
        w: args.w.unwrap_or(3.0),
        subsets: parse_policy(&args)?,
        seed: args.seed.unwrap_or(0),
    };
    let rows = noise_scan(&config)?;
    output::write_rows(&rows, args.out.as_deref(), parse_format(&args)?)
        .map_err(|e| CliError::Other(e.to_string()))
}

fn cmd_simulate(mut args: SimulateArgs) -> Result<()> {
    if let Some(values) = apply_config(&mut args.common, &["diag-out"])? {
        if args.diag_out.is_none() {
            args.diag_out = values.get("diag-out").map(std::path::PathBuf::from);
        }
    }
    let common = &args.common;
    let family = parse_family(common)?;
    let n = common.n.unwrap_or(3);
    let eta = common.eta.unwrap_or(0.0);
    if !(0.0..=1.0).contains(&eta) {
        return Err(CliError::Config(format!("eta = {eta} outside [0, 1]")));
    }
    let shots = common.shots.unwrap_or(10_000);
    let policy = parse_policy(common)?;
    let records = harness::family_records(family, n, eta, policy, shots, common.seed.unwrap_or(0))?;
    output::write_records(&records, common.out.as_deref())
        .map_err(|e| CliError::Other(e.to_string()))?;
    if let Some(path) = &args.diag_out {
        let diag = family.diagonal(n, eta);
        output::write_diagonal(&diag, path).map_err(|e| CliError::Other(e.to_string()))?;
    }
    Ok(())
}

fn cmd_estimate(mut args: EstimateArgs) -> Result<()> {
    if let Some(values) = apply_config(&mut args.common, &["input", "diag"])? {
        if args.input.is_none() {
            args.input = values.get("input").map(std::path::PathBuf::from);
        }
        if args.diag.is_none() {
            args.diag = values.get("diag").map(std::path::PathBuf::from);
        }
    }
    let common = &args.common;
    let family = match &common.family {
        Some(f) => f
            .parse::<Family>()
            .map_err(|e| CliError::Config(e.to_string()))?,
        None => return Err(CliError::Config("estimate requires --family".into())),
    };
    let input = args
        .input
        .as_ref()
        .ok_or_else(|| CliError::Config("estimate requires --input".into()))?;
    let records = measurement::ingest_csv(input)
        .map_err(|e| measurement_error(&e, e.to_string()))?;
    if records.is_empty() {
        return Err(CliError::Parse("no records in input".into()));
    }
    let n = records[0].operator.trim_start_matches('-').len();
    if let Some(expected) = common.n {
        if expected != n {
            return Err(CliError::Config(format!(
                "records are {n}-qubit operators but --n = {expected}"
            )));
        }
    }
    if let Some(eta) = common.eta {
        if !(0.0..1.0).contains(&eta) {
            return Err(CliError::Config(format!("eta = {eta} outside [0, 1)")));
        }
    }

    let diag: DiagonalDistribution = match &args.diag {
        Some(path) => output::read_diagonal(path, 1usize << n).map_err(|e| match e {
            output::DiagError::Io(m) => CliError::Other(m),
            output::DiagError::Parse(m) => CliError::Parse(m),
        })?,
        None => family.diagonal(n, common.eta.unwrap_or(0.0)),
    };

    let outcome = estimate(
        &records,
        family,
        n,
        parse_policy(common)?,
        common.w.unwrap_or(3.0),
        &diag,
        common.eta,
        common.seed.unwrap_or(0),
    )?;
    if outcome.total_subsets > 1 {
        eprintln!(
            "subsets: {} of {} feasible",
            outcome.feasible_subsets, outcome.total_subsets
        );
    }
    output::write_rows(&outcome.rows, common.out.as_deref(), parse_format(common)?)
        .map_err(|e| CliError::Other(e.to_string()))
}
