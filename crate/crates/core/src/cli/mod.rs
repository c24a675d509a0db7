//! Batch front end: configuration, commands and JSON reports.
//!
//! A report has the shape
//! `{"command", "mode", "seed", "result": {...}, "timings_ms": {...}}`;
//! everything except `timings_ms` is a pure function of the configuration.

mod commands;
pub mod config;
mod verify;

use serde_json::{json, Value};

pub use commands::FLOAT_ROUTE_TOL;
pub use config::{AnyChain, Route, RunConfig};
pub use verify::Suite;

use crate::error::{Error, Mode, Result};
use crate::numerics::Rational;
use commands::Timings;

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Command {
    Compute,
    Verify,
    Deform,
    Toda,
    Loop,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Compute => "compute",
            Command::Verify => "verify",
            Command::Deform => "deform",
            Command::Toda => "toda",
            Command::Loop => "loop",
        }
    }
}

impl std::str::FromStr for Command {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        <Self as clap::ValueEnum>::from_str(s, false)
            .map_err(|_| Error::Config(format!("unknown command `{s}` (expected compute|verify|deform|toda|loop)")))
    }
}

/// How a finished command went; maps onto the process exit code.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Ok,
    /// A verification or cross-route agreement failed.
    Failed,
    /// At least one requested route could not be evaluated.
    RouteError,
}

impl Status {
    pub fn exit_code(self) -> i32 {
        match self {
            Status::Ok => 0,
            Status::Failed => 1,
            Status::RouteError => 3,
        }
    }
}

/// Exit code for errors that stop a command before it produces a report.
pub fn error_exit_code(e: &Error) -> i32 {
    match e {
        Error::Config(_) | Error::Parse(_) | Error::Io(_) => 2,
        _ => 3,
    }
}

#[derive(Debug, Clone)]
pub struct Outcome {
    pub result: Value,
    pub status: Status,
}

impl Outcome {
    pub(crate) fn new(result: Value, status: Status) -> Self {
        Self { result, status }
    }
}

/// A complete report and its status.
#[derive(Debug, Clone)]
pub struct Report {
    pub json: Value,
    pub status: Status,
}

impl Report {
    /// The report without timings.
    pub fn deterministic(&self) -> Value {
        let mut v = self.json.clone();
        if let Some(m) = v.as_object_mut() {
            m.remove("timings_ms");
        }
        v
    }
}

/// Runs `command` on an already parsed configuration.
pub fn run(command: Command, cfg: &RunConfig) -> Result<Report> {
    let mut timings = Timings::new();
    let mode = cfg.mode();
    let outcome = match (command, mode) {
        (Command::Compute, Mode::Exact) => commands::compute::<Rational>(cfg, &mut timings)?,
        (Command::Compute, Mode::Float) => commands::compute::<f64>(cfg, &mut timings)?,
        (Command::Loop, Mode::Exact) => commands::run_loop::<Rational>(cfg, &mut timings)?,
        (Command::Loop, Mode::Float) => commands::run_loop::<f64>(cfg, &mut timings)?,
        (Command::Deform, Mode::Exact) => commands::deform::<Rational>(cfg, &mut timings)?,
        (Command::Deform, Mode::Float) => commands::deform::<f64>(cfg, &mut timings)?,
        (Command::Toda, _) => commands::toda(cfg, &mut timings)?,
        (Command::Verify, _) => verify::verify(cfg, &mut timings)?,
    };
    let json = json!({
        "command": command.name(),
        "mode": mode,
        "seed": cfg.seed(),
        "result": outcome.result,
        "timings_ms": timings.into_json(),
    });
    Ok(Report { json, status: outcome.status })
}

/// Parses `config_json`, applies the optional overrides and runs `command`.
pub fn run_json(command: Command, config_json: &str, mode: Option<Mode>, seed: Option<u64>) -> Result<Report> {
    let mut cfg = RunConfig::from_json(config_json)?;
    if mode.is_some() {
        cfg.mode = mode;
    }
    if seed.is_some() {
        cfg.seed = seed;
    }
    run(command, &cfg)
}
