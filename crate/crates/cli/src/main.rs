use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use vacuumgas_cli::commands;
use vacuumgas_cli::config::{apply_override, parse_config_text, validate, RunConfig};
use vacuumgas_cli::error::{CliError, Result};

/// Free-boundary gas simulator and verification toolkit.
#[derive(Parser)]
#[command(name = "vacuumgas", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// Configuration file ([section] key = value text).
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output directory.
    #[arg(long, default_value = "out")]
    out: PathBuf,
    /// Override a configuration entry (section.key=value); repeatable.
    #[arg(long = "override", value_name = "SECTION.KEY=VALUE")]
    overrides: Vec<String>,
}

#[derive(Subcommand)]
enum Command {
    /// Emit the reference profile constants and sampled fields.
    Barenblatt(Common),
    /// Integrate the correction ODE and report its diagnostics.
    Correction(Common),
    /// Run a full simulation and write summaries, snapshots and reports.
    Simulate(Common),
    /// Grid-refinement study with Richardson observed orders.
    Refine(Common),
    /// Parameter sweep over (gamma, lambda, mu).
    Sweep(Common),
    /// Re-fit the rate tables from an existing series.csv.
    Rates(Common),
    /// Hardy-quotient refinement study.
    Hardy(Common),
}

fn load_config(common: &Common) -> Result<RunConfig> {
    let mut config = match &common.config {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
            parse_config_text(&text)?
        }
        None => RunConfig::default(),
    };
    for entry in &common.overrides {
        apply_override(&mut config, entry)?;
    }
    validate(&config)?;
    Ok(config)
}

fn dispatch(command: &Command) -> Result<i32> {
    match command {
        Command::Barenblatt(c) => {
            commands::cmd_barenblatt(&load_config(c)?, &c.out)?;
            Ok(0)
        }
        Command::Correction(c) => {
            commands::cmd_correction(&load_config(c)?, &c.out)?;
            Ok(0)
        }
        Command::Simulate(c) => {
            let outcome = commands::cmd_simulate(&load_config(c)?, &c.out)?;
            if outcome.is_degenerate() {
                eprintln!("run ended with a degenerate Lagrangian map; outputs recorded");
                Ok(3)
            } else {
                Ok(0)
            }
        }
        Command::Refine(c) => {
            commands::cmd_refine(&load_config(c)?, &c.out)?;
            Ok(0)
        }
        Command::Sweep(c) => {
            commands::cmd_sweep(&load_config(c)?, &c.out)?;
            Ok(0)
        }
        Command::Rates(c) => {
            commands::cmd_rates(&load_config(c)?, &c.out)?;
            Ok(0)
        }
        Command::Hardy(c) => {
            commands::cmd_hardy(&load_config(c)?, &c.out)?;
            Ok(0)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(&cli.command) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
