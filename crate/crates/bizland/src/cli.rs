use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::commands;
use crate::error::exit;
use crate::pricefile;
use crate::scenario::{Loaded, PricingMode};
use crate::sweep::{run_sweep, workers_from_env};
use crate::Failure;

#[derive(Debug, Parser)]
#[command(name = "bizland", version, about = "Combined traveler and business-location equilibrium with congestion pricing")]
pub struct Cli {
    /// Where to write the JSON report (default: <scenario>.<command>.json in the working directory).
    #[arg(short, long, global = true)]
    pub output: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Mode {
    Road,
    Full,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Untolled combined equilibrium.
    Solve { scenario: PathBuf },
    /// System optimum and the charges that support it.
    Price {
        scenario: PathBuf,
        #[arg(long, value_enum)]
        mode: Mode,
        /// Pricing file to write (default: <scenario>.<mode>.pricing).
        #[arg(long)]
        pricing_out: Option<PathBuf>,
    },
    /// Equilibrium under the charges of a pricing file, compared with its state.
    Verify { scenario: PathBuf, pricing: PathBuf },
    /// Demand sweep (worker count from BIZLAND_WORKERS).
    Sweep { scenario: PathBuf },
    /// Assumption and uniqueness checks.
    Check { scenario: PathBuf },
    /// Grid-search comparison on tiny instances.
    Oracle { scenario: PathBuf },
}

impl Command {
    fn scenario(&self) -> &Path {
        match self {
            Self::Solve { scenario }
            | Self::Price { scenario, .. }
            | Self::Verify { scenario, .. }
            | Self::Sweep { scenario }
            | Self::Check { scenario }
            | Self::Oracle { scenario } => scenario,
        }
    }

    fn name(&self) -> &'static str {
        match self {
            Self::Solve { .. } => "solve",
            Self::Price { .. } => "price",
            Self::Verify { .. } => "verify",
            Self::Sweep { .. } => "sweep",
            Self::Check { .. } => "check",
            Self::Oracle { .. } => "oracle",
        }
    }
}

fn default_path(scenario: &Path, suffix: &str) -> PathBuf {
    let stem = scenario.file_stem().map_or_else(|| "scenario".into(), |s| s.to_string_lossy().into_owned());
    PathBuf::from(format!("{stem}.{suffix}"))
}

fn write_json(path: &Path, value: &impl Serialize) -> Result<(), Failure> {
    let mut text = serde_json::to_string_pretty(value).map_err(|e| Failure::Io(e.to_string()))?;
    text.push('\n');
    std::fs::write(path, text).map_err(|e| Failure::Io(format!("{}: {e}", path.display())))
}

#[derive(Serialize)]
struct FailureReport<'a> {
    command: &'a str,
    scenario: String,
    error: String,
    exit_code: i32,
    trace: &'a [f64],
}

/// Text for stdout, the report to write, and a failure that still
/// produced a report.
type Outcome = (String, serde_json::Value, Option<Failure>);

fn to_value(v: &impl Serialize) -> Result<serde_json::Value, Failure> {
    serde_json::to_value(v).map_err(|e| Failure::Io(e.to_string()))
}

fn execute(command: &Command) -> Result<Outcome, Failure> {
    let loaded = Loaded::from_path(command.scenario())?;
    match command {
        Command::Solve { .. } => {
            let r = commands::solve(&loaded)?;
            Ok((r.text(), to_value(&r)?, None))
        }
        Command::Price {
            scenario,
            mode,
            pricing_out,
        } => {
            let (mode, suffix) = match mode {
                Mode::Road => (PricingMode::Road, "road.pricing"),
                Mode::Full => (PricingMode::Full, "full.pricing"),
            };
            let (r, scheme) = commands::price(&loaded, mode)?;
            let path = pricing_out.clone().unwrap_or_else(|| default_path(scenario, suffix));
            std::fs::write(&path, pricefile::render(&loaded.model, &scheme))
                .map_err(|e| Failure::Io(format!("{}: {e}", path.display())))?;
            Ok((r.text(), to_value(&r)?, None))
        }
        Command::Verify { pricing, .. } => {
            let text = std::fs::read_to_string(pricing)
                .map_err(|e| Failure::Io(format!("{}: {e}", pricing.display())))?;
            let scheme =
                pricefile::parse(&text, &loaded.model).map_err(|e| e.context(&pricing.display().to_string()))?;
            let r = commands::verify(&loaded, &scheme)?;
            let failed = (!r.holds).then(|| {
                Failure::CheckFailed(format!("prices do not support the state (distance {:e})", r.state_distance))
            });
            Ok((r.text(), to_value(&r)?, failed))
        }
        Command::Sweep { .. } => {
            let r = run_sweep(&loaded, workers_from_env()?)?;
            Ok((r.text(), to_value(&r)?, None))
        }
        Command::Check { .. } => {
            let r = commands::check(&loaded);
            Ok((r.text(), to_value(&r)?, None))
        }
        Command::Oracle { .. } => {
            let r = commands::oracle(&loaded)?;
            Ok((r.text(), to_value(&r)?, None))
        }
    }
}

/// Runs the tool and returns its exit status.
pub fn run<I, T>(args: I, out: &mut impl Write, err: &mut impl Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = write!(err, "{e}");
            return if e.use_stderr() { exit::PARSE } else { 0 };
        }
    };
    let command = &cli.command;
    let report_path = cli
        .output
        .clone()
        .unwrap_or_else(|| default_path(command.scenario(), &format!("{}.json", command.name())));
    match execute(command) {
        Ok((text, value, failed)) => {
            let _ = out.write_all(text.as_bytes());
            if let Err(e) = write_json(&report_path, &value) {
                let _ = writeln!(err, "{e}");
                return e.exit_code();
            }
            match failed {
                Some(f) => {
                    let _ = writeln!(err, "{f}");
                    f.exit_code()
                }
                None => 0,
            }
        }
        Err(f) => {
            let _ = writeln!(err, "{f}");
            if let Failure::Convergence { trace, .. } = &f {
                let report = FailureReport {
                    command: command.name(),
                    scenario: command.scenario().display().to_string(),
                    error: f.to_string(),
                    exit_code: f.exit_code(),
                    trace,
                };
                let _ = write_json(&report_path, &report);
            }
            f.exit_code()
        }
    }
}
