use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use fracab_cli::output::{format_convergence, format_sweep};
use fracab_cli::{check, convergence_study, parse_config, run_simulation, stability_sweep, CliError, RunConfig};

/// Two-step Adams–Bashforth experiments for advection, fractional diffusion
/// and scalar Caputo problems.
#[derive(Parser)]
#[command(name = "fracab", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Single run; writes CSV to `output_path` when set.
    Run { config: PathBuf },
    /// Halve h and l together and tabulate final-time errors.
    Converge {
        config: PathBuf,
        #[arg(long, default_value_t = 3)]
        levels: usize,
    },
    /// Rescale h to each margin and run the Fourier probe plus a full simulation.
    Sweep {
        config: PathBuf,
        #[arg(long, value_delimiter = ',', required = true)]
        margins: Vec<f64>,
    },
    /// Stability margin and residual bound only.
    Check { config: PathBuf },
}

fn load(path: &Path) -> Result<RunConfig, CliError> {
    let text = std::fs::read_to_string(path)?;
    Ok(parse_config(&text)?)
}

fn execute(cli: Cli) -> Result<u8, CliError> {
    match cli.command {
        Command::Run { config } => {
            let report = run_simulation(&load(&config)?)?;
            for note in report.notes.iter().filter(|n| n.starts_with("warning")) {
                eprintln!("{note}");
            }
            print!("{report}");
            Ok(if report.halted_unstable_at.is_some() { 2 } else { 0 })
        }
        Command::Converge { config, levels } => {
            let rows = convergence_study(&load(&config)?, levels)?;
            print!("{}", format_convergence(&rows));
            Ok(if rows.iter().any(|r| r.halted_unstable_at.is_some()) { 2 } else { 0 })
        }
        Command::Sweep { config, margins } => {
            let rows = stability_sweep(&load(&config)?, &margins)?;
            print!("{}", format_sweep(&rows));
            Ok(0)
        }
        Command::Check { config } => {
            print!("{}", check(&load(&config)?)?);
            Ok(0)
        }
    }
}

fn main() -> ExitCode {
    match execute(Cli::parse()) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
