use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use taumodel::cli::{error_exit_code, run, Command, Route, RunConfig};
use taumodel::{Error, Mode, Result};

/// Chain matrix-model partition functions and their tau-function deformations.
#[derive(Debug, Parser)]
#[command(name = "taumodel", version)]
struct Args {
    command: Command,
    /// JSON run configuration.
    #[arg(long)]
    config: PathBuf,
    /// Overrides `mode` from the configuration.
    #[arg(long, value_parser = parse_mode)]
    mode: Option<Mode>,
    /// Overrides `seed` from the configuration.
    #[arg(long)]
    seed: Option<u64>,
    /// Overrides `n` from the configuration.
    #[arg(long)]
    n: Option<usize>,
    /// Overrides `routes`; may be repeated.
    #[arg(long = "route", value_parser = parse_route)]
    routes: Vec<Route>,
    /// Writes the report here instead of standard output.
    #[arg(long)]
    out: Option<PathBuf>,
}

fn parse_mode(s: &str) -> Result<Mode> {
    s.parse()
}

fn parse_route(s: &str) -> Result<Route> {
    s.parse()
}

fn execute(args: &Args) -> Result<i32> {
    let mut cfg = RunConfig::from_file(&args.config)?;
    if args.mode.is_some() {
        cfg.mode = args.mode;
    }
    if args.seed.is_some() {
        cfg.seed = args.seed;
    }
    if let Some(n) = args.n {
        cfg.n = n;
    }
    if !args.routes.is_empty() {
        cfg.routes = Some(args.routes.clone());
    }
    let report = run(args.command, &cfg)?;
    let text = serde_json::to_string_pretty(&report.json).map_err(|e| Error::Io(e.to_string()))? + "\n";
    match &args.out {
        Some(path) => std::fs::write(path, text).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?,
        None => print!("{text}"),
    }
    Ok(report.status.exit_code())
}

fn main() -> ExitCode {
    let args = Args::parse();
    match execute(&args) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("taumodel: {e}");
            ExitCode::from(error_exit_code(&e) as u8)
        }
    }
}
