//! `magcoh` command-line driver.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use magcoh::PhysicalConfig;
use serde::Serialize;

mod commands;
mod output;
mod parse;

use output::CliError;

/// Environment variable naming the configuration file.
pub const CONFIG_ENV: &str = "MAGCOH_CONFIG";
/// Configuration file picked up from the working directory when present.
pub const DEFAULT_CONFIG: &str = "magcoh.json";

#[derive(Parser, Debug)]
#[command(name = "magcoh", version, about = "Coherent states of a charged particle in a magnetic field")]
struct Cli {
    /// Physical configuration (JSON); overrides $MAGCOH_CONFIG and ./magcoh.json.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Sample a state on a grid and report its moments.
    Eval(commands::EvalArgs),
    /// Integrate a time-dependent field and write the variance trace.
    Dynamics(commands::DynamicsArgs),
    /// Run a parameter scan.
    Scan(commands::ScanArgs),
    /// Run the acceptance checks.
    Selftest(SelftestArgs),
}

#[derive(Args, Debug, Serialize)]
struct SelftestArgs {
    /// Run a single criterion.
    #[arg(long)]
    only: Option<u8>,
}

fn load_config(flag: Option<&Path>) -> Result<PhysicalConfig, CliError> {
    let path = match flag {
        Some(p) => Some(p.to_path_buf()),
        None => match std::env::var_os(CONFIG_ENV) {
            Some(p) => Some(PathBuf::from(p)),
            None => Some(PathBuf::from(DEFAULT_CONFIG)).filter(|p| p.exists()),
        },
    };
    match path {
        Some(p) => PhysicalConfig::from_path(&p).map_err(|e| CliError::Usage(format!("{}: {e}", p.display()))),
        None => Ok(PhysicalConfig::default()),
    }
}

fn selftest(args: &SelftestArgs) -> Result<(), CliError> {
    let outcomes = match args.only {
        Some(id) => vec![magcoh_verify::run_one(id).ok_or_else(|| CliError::Usage(format!("no criterion {id}")))?],
        None => magcoh_verify::run_all(),
    };
    for o in &outcomes {
        println!("{o}");
    }
    let failed: Vec<String> = outcomes.iter().filter(|o| !o.passed).map(|o| o.id.to_string()).collect();
    if failed.is_empty() {
        Ok(())
    } else {
        Err(CliError::Gate(format!("criteria {} failed", failed.join(", "))))
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    if let Command::Selftest(args) = &cli.command {
        return selftest(args);
    }
    let config = load_config(cli.config.as_deref())?;
    let written = match &cli.command {
        Command::Eval(a) => commands::eval(a, &config)?,
        Command::Dynamics(a) => commands::dynamics(a, &config)?,
        Command::Scan(a) => commands::scan(a, &config)?,
        Command::Selftest(_) => unreachable!(),
    };
    for p in written {
        println!("{}", p.display());
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("magcoh: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
