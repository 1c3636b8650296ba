use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{anyhow, Result};
use clap::{Parser, Subcommand};
use matcons_cli::commands::{to_json, Settings};
use matcons_cli::{
    cmd_analyze, cmd_counterexample, cmd_run, cmd_synth, cmd_verify, LoadedScenario,
};
use matcons_core::DEFAULT_RANK_TOL;

/// Well-configuration checks, weight synthesis and consensus simulation for
/// matrix-weighted multi-agent networks.
#[derive(Debug, Parser)]
#[command(name = "matcons", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Scenario JSON file.
    #[arg(long, global = true)]
    scenario: Option<PathBuf>,
    /// Output directory for written artifacts.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Seed for random initial states.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Override the number of simulated rounds.
    #[arg(long, global = true)]
    steps: Option<usize>,
    /// Relative rank tolerance.
    #[arg(long, global = true, default_value_t = DEFAULT_RANK_TOL)]
    tol: f64,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Check well-configuration; exit 0 if well-configured, 2 if not.
    Verify,
    /// Synthesize weights from an ear decomposition and write them.
    Synth,
    /// Simulate the scenario's algorithm.
    Run,
    /// Report the spectrum of the round-update matrix.
    Analyze,
    /// Verify, analyze and run the bundled counterexample.
    Counterexample,
}

/// Prints to stdout; a closed pipe (e.g. `| head`) is not an error.
fn emit(text: &str) -> Result<()> {
    match writeln!(io::stdout().lock(), "{text}") {
        Err(e) if e.kind() != io::ErrorKind::BrokenPipe => Err(e.into()),
        _ => Ok(()),
    }
}

fn execute(cli: Cli) -> Result<ExitCode> {
    let settings = Settings {
        out: cli.out,
        seed: cli.seed,
        steps: cli.steps,
        tol: cli.tol,
    };
    let scenario = || -> Result<LoadedScenario> {
        let path = cli
            .scenario
            .as_ref()
            .ok_or_else(|| anyhow!("--scenario <path> is required"))?;
        LoadedScenario::load(path)
    };
    match cli.command {
        Command::Verify => {
            let report = cmd_verify(&scenario()?, &settings)?;
            emit(&to_json(&report))?;
            Ok(if report.well_configured {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(2)
            })
        }
        Command::Synth => {
            emit(&to_json(&cmd_synth(&scenario()?, &settings)?.report))?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Run => {
            emit(&to_json(&cmd_run(&scenario()?, &settings)?.summary))?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Analyze => {
            emit(&to_json(&cmd_analyze(&scenario()?, &settings)?))?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Counterexample => {
            emit(&to_json(&cmd_counterexample(&settings)?))?;
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn main() -> ExitCode {
    match execute(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
