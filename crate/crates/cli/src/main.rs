//! Command-line front end: configure, run, and export field-energy
//! extraction experiments, and run the verification suite.
//!
//! Exit codes: 0 success, 1 verification failure, 2 configuration error,
//! 3 grid-resolution guard.

mod config;

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use dirac1d::extraction::{run_extraction, sweep_f, ExtractionReport};
use dirac1d::observables::current_profile;
use dirac1d::potential_dynamics::PotentialField;
use dirac1d::verification::run_standard_suite;
use dirac1d::Error as LibError;

use config::{load, Overrides, PotentialRule, PreparedRun};

#[derive(Parser)]
#[command(
    name = "dirac1d",
    about = "Massless fermion field in a periodic box under a classical potential: \
             current profiles, energy-extraction runs, coupling sweeps, verification",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct CommonRunArgs {
    /// Path to the JSON run configuration.
    #[arg(long)]
    config: PathBuf,
    /// Override the feedback coupling.
    #[arg(long)]
    f: Option<f64>,
    /// Override the potential window end.
    #[arg(long)]
    tf: Option<f64>,
    /// Override the spatial grid size.
    #[arg(long)]
    nz: Option<usize>,
    /// Override the time panel count.
    #[arg(long)]
    nt: Option<usize>,
    /// CSV output path (overrides the config's output.csv).
    #[arg(long)]
    out_csv: Option<PathBuf>,
    /// JSON output path (overrides the config's output.json).
    #[arg(long)]
    out_json: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Export the state's current profile at a given time as CSV.
    Current {
        #[command(flatten)]
        common: CommonRunArgs,
        /// Evaluation time.
        #[arg(long, default_value_t = 0.0)]
        t: f64,
    },
    /// Run one extraction experiment and export the energy report.
    Extract {
        #[command(flatten)]
        common: CommonRunArgs,
    },
    /// Run the extraction for every coupling in the config's f list.
    Sweep {
        #[command(flatten)]
        common: CommonRunArgs,
    },
    /// Run the verification suite and print one line per check.
    Verify,
}

/// Error carrying the exit-code class.
#[derive(Debug)]
pub enum CliError {
    Config(String),
    Resolution(String),
    Io(String),
}

impl CliError {
    fn from_domain(err: LibError) -> Self {
        match err {
            LibError::GridResolution { .. } => CliError::Resolution(err.to_string()),
            other => CliError::Config(other.to_string()),
        }
    }

    fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) => 2,
            CliError::Resolution(_) => 3,
            CliError::Io(_) => 2,
        }
    }

    fn message(&self) -> &str {
        match self {
            CliError::Config(m) | CliError::Resolution(m) | CliError::Io(m) => m,
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Current { common, t } => cmd_current(&common, t),
        Command::Extract { common } => cmd_extract(&common),
        Command::Sweep { common } => cmd_sweep(&common),
        Command::Verify => return cmd_verify(),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {}", err.message());
            ExitCode::from(err.exit_code())
        }
    }
}

fn overrides_of(common: &CommonRunArgs) -> Overrides {
    Overrides {
        f: common.f,
        t_f: common.tf,
        n_z: common.nz,
        n_t: common.nt,
    }
}

fn prepare(common: &CommonRunArgs) -> Result<PreparedRun, CliError> {
    load(&common.config, overrides_of(common))
}

fn cmd_current(common: &CommonRunArgs, t: f64) -> Result<(), CliError> {
    let run = prepare(common)?;
    let profile = current_profile(&run.config.state, t, &run.config.domain, run.config.q_charge)
        .map_err(CliError::from_domain)?;
    let mut buf = Vec::new();
    profile
        .write_csv(&run.config.domain, &mut buf)
        .map_err(|e| CliError::Io(e.to_string()))?;
    emit(
        common.out_csv.as_deref().or(run.output.csv.as_deref()),
        &buf,
    )
}

fn single_coupling(run: &PreparedRun) -> Result<PotentialField<f64>, CliError> {
    match &run.potential {
        PotentialRule::Tabulated { potential } => Ok(potential.clone()),
        PotentialRule::Feedback { couplings } => {
            if couplings.len() != 1 {
                return Err(CliError::Config(format!(
                    "extract takes exactly one coupling, got {}; use sweep for lists",
                    couplings.len()
                )));
            }
            PotentialField::feedback(
                &run.config.state,
                couplings[0],
                run.config.t_f,
                &run.config.domain,
                run.config.q_charge,
            )
            .map_err(CliError::from_domain)
        }
    }
}

fn cmd_extract(common: &CommonRunArgs) -> Result<(), CliError> {
    let run = prepare(common)?;
    let potential = single_coupling(&run)?;
    let report = run_extraction(&run.config, &potential).map_err(CliError::from_domain)?;

    let mut csv = String::from(ExtractionReport::<f64>::CSV_HEADER);
    csv.push('\n');
    csv.push_str(&report.csv_row());
    csv.push('\n');
    let json = render_json(&report)?;

    let csv_target = common.out_csv.as_deref().or(run.output.csv.as_deref());
    let json_target = common.out_json.as_deref().or(run.output.json.as_deref());
    if let Some(path) = csv_target {
        write_file(path, csv.as_bytes())?;
    }
    match json_target {
        Some(path) => write_file(path, json.as_bytes())?,
        None => print_bytes(json.as_bytes())?,
    }
    Ok(())
}

fn cmd_sweep(common: &CommonRunArgs) -> Result<(), CliError> {
    let run = prepare(common)?;
    let couplings = match &run.potential {
        PotentialRule::Feedback { couplings } => couplings.clone(),
        PotentialRule::Tabulated { .. } => {
            return Err(CliError::Config(
                "sweep requires a feedback potential with an f list".into(),
            ))
        }
    };
    if couplings.is_empty() {
        return Err(CliError::Config("sweep requires a nonempty f list".into()));
    }
    let table = sweep_f(&run.config, &couplings).map_err(CliError::from_domain)?;
    let csv = table.to_csv();
    let json = render_json(&table)?;

    let csv_target = common.out_csv.as_deref().or(run.output.csv.as_deref());
    match csv_target {
        Some(path) => write_file(path, csv.as_bytes())?,
        None => print_bytes(csv.as_bytes())?,
    }
    if let Some(path) = common.out_json.as_deref().or(run.output.json.as_deref()) {
        write_file(path, json.as_bytes())?;
    }
    Ok(())
}

fn cmd_verify() -> ExitCode {
    let outcomes = run_standard_suite();
    let mut gating_failures = 0usize;
    let mut gating_total = 0usize;
    for outcome in &outcomes {
        let status = if outcome.passed { "PASS" } else { "FAIL" };
        let class = if outcome.gating { "gating" } else { "advisory" };
        if outcome.gating {
            gating_total += 1;
            if !outcome.passed {
                gating_failures += 1;
            }
        }
        println!(
            "{status} [{class}] {name}: measured {measured:.3e} {cmp} {threshold:.3e} ({note})",
            name = outcome.name,
            measured = outcome.measured,
            cmp = outcome.comparison_symbol(),
            threshold = outcome.threshold,
            note = outcome.note,
        );
    }
    println!(
        "verify: {}/{} gating checks passed",
        gating_total - gating_failures,
        gating_total
    );
    if gating_failures == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}

fn render_json<T: serde::Serialize>(value: &T) -> Result<String, CliError> {
    let mut text = serde_json::to_string_pretty(value)
        .map_err(|e| CliError::Io(format!("serialization failed: {e}")))?;
    text.push('\n');
    Ok(text)
}

fn emit(target: Option<&Path>, bytes: &[u8]) -> Result<(), CliError> {
    match target {
        Some(path) => write_file(path, bytes),
        None => print_bytes(bytes),
    }
}

fn write_file(path: &Path, bytes: &[u8]) -> Result<(), CliError> {
    fs::write(path, bytes)
        .map_err(|e| CliError::Io(format!("cannot write {}: {e}", path.display())))
}

fn print_bytes(bytes: &[u8]) -> Result<(), CliError> {
    std::io::stdout()
        .write_all(bytes)
        .map_err(|e| CliError::Io(e.to_string()))
}
