mod args;
mod commands;
mod error;
mod io;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;

use args::Command;
use error::CliError;

#[derive(Debug, Parser)]
#[command(name = "cma-kernel", version, about = "Kernel estimation for sampled CMA processes")]
struct Cli {
    /// JSON run configuration: `{"command": "...", ...flags}`. Replaces the subcommand.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[command(subcommand)]
    command: Option<Command>,
}

fn load_config(path: &PathBuf) -> Result<Command, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
}

fn run() -> Result<(), CliError> {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) if !e.use_stderr() => {
            // --help / --version
            let _ = e.print();
            return Ok(());
        }
        Err(e) => return Err(CliError::Usage(e.to_string().trim().to_string())),
    };
    let command = match (cli.config, cli.command) {
        (Some(p), None) => load_config(&p)?,
        (None, Some(c)) => c,
        (Some(_), Some(_)) => {
            return Err(CliError::Usage(
                "--config replaces the subcommand; give one or the other".into(),
            ))
        }
        (None, None) => return Err(CliError::Usage("no subcommand given (try --help)".into())),
    };
    commands::dispatch(command)
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    match run() {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("{}", e.to_json());
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
