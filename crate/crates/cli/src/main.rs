//! klab — experiment runner for the korovkin-lab library. Every subcommand
//! reads one TOML config and emits one report; exit codes separate config
//! mistakes (2) from numerical findings (3) from I/O trouble (4).

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use korovkin_lab_cli::config::{self, OutputFormat};
use korovkin_lab_cli::experiment::{check_family, integrate, run_experiment, verify_bounds};
use korovkin_lab_cli::report::{emit, render};
use korovkin_lab_cli::{CliError, CliResult};

#[derive(Parser)]
#[command(
    name = "klab",
    version,
    about = "Convergence experiments for weakly nonlinear approximation operators",
    propagate_version = true
)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// TOML job description (required by every subcommand)
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,

    /// Write the report here instead of stdout
    #[arg(long, global = true, value_name = "PATH")]
    out: Option<PathBuf>,

    /// Report format; overrides the config's `output` field
    #[arg(long, global = true, value_enum)]
    format: Option<OutputFormat>,

    /// Evaluation grid points per axis; overrides the config
    #[arg(long, global = true, value_name = "N")]
    grid: Option<usize>,

    /// Seed override for randomized checks (echoed in the header)
    #[arg(long, global = true, value_name = "K")]
    seed: Option<u64>,

    /// Worker threads; affects speed only, never report bytes
    #[arg(long, global = true, value_name = "J")]
    jobs: Option<usize>,
}

#[derive(Subcommand)]
enum Command {
    /// Run a convergence experiment from a config
    Run,
    /// Evaluate one Choquet integral
    Integrate,
    /// Empirical axiom matrix for one operator family
    Check,
    /// Verify published rate bounds on a grid
    Bounds,
}

fn load_config<T: serde::de::DeserializeOwned>(path: &Option<PathBuf>) -> CliResult<T> {
    let path = path
        .as_ref()
        .ok_or_else(|| CliError::Validation("--config PATH is required".into()))?;
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Io(format!("reading {}: {e}", path.display())))?;
    config::parse(&text)
}

fn dispatch(cli: &Cli) -> CliResult<()> {
    if let Some(jobs) = cli.jobs {
        if jobs == 0 {
            return Err(CliError::Validation("--jobs must be at least 1".into()));
        }
        // ignore the error if a pool already exists; thread count never
        // changes results, only wall time
        let _ = rayon::ThreadPoolBuilder::new().num_threads(jobs).build_global();
    }

    match cli.command {
        Command::Run => {
            let cfg: config::RunConfig = load_config(&cli.config)?;
            let format = cli.format.unwrap_or(cfg.output);
            let outcome = run_experiment(&cfg, cli.grid, cli.seed)?;
            emit(&render(&outcome.report, format), cli.out.as_deref())?;
            fail_if_any(outcome.failures)
        }
        Command::Check => {
            let cfg: config::CheckConfig = load_config(&cli.config)?;
            let format = cli.format.unwrap_or(cfg.output);
            let outcome = check_family(&cfg, cli.seed)?;
            emit(&render(&outcome.report, format), cli.out.as_deref())?;
            fail_if_any(outcome.failures)
        }
        Command::Bounds => {
            let cfg: config::BoundsConfig = load_config(&cli.config)?;
            let format = cli.format.unwrap_or(cfg.output);
            let outcome = verify_bounds(&cfg, cli.grid)?;
            emit(&render(&outcome.report, format), cli.out.as_deref())?;
            fail_if_any(outcome.failures)
        }
        Command::Integrate => {
            let cfg: config::IntegrateConfig = load_config(&cli.config)?;
            let format = cli.format.unwrap_or(cfg.output);
            let (name, value) = integrate(&cfg)?;
            let text = match format {
                OutputFormat::Csv => format!("function,value\n{name},{value}\n"),
                OutputFormat::Json => {
                    format!(
                        "{}\n",
                        serde_json::to_string_pretty(
                            &serde_json::json!({ "function": name, "value": value })
                        )
                        .expect("value serializes")
                    )
                }
            };
            emit(&text, cli.out.as_deref())
        }
    }
}

/// Verified-claim failures: the report has already been written; surface
/// each finding on stderr and exit 3.
fn fail_if_any(failures: Vec<String>) -> CliResult<()> {
    if failures.is_empty() {
        return Ok(());
    }
    Err(CliError::Numerical(failures.join("\n")))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("klab: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
