//! `nccs` command-line front end.
//!
//! Exit codes: 0 ok, 1 I/O, 2 validation, 3 truncation, 4 tolerance failure.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod commands;
mod config;

use std::process::ExitCode;

use clap::{Parser, Subcommand};

use config::RunConfig;

#[derive(Parser, Debug)]
#[command(
    name = "nccs",
    version,
    about = "Deformed coherent states in a truncated Fock space"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand, Debug)]
enum Cmd {
    /// Build a state; write its JSON and photon distribution.
    #[command(allow_negative_numbers = true)]
    State(RunConfig),
    /// Quadrature variances, Mandel Q, g2(0) and photon statistics.
    #[command(allow_negative_numbers = true)]
    Metrics(RunConfig),
    /// Autocorrelation of a Gazeau-Klauder state and its revival times.
    #[command(allow_negative_numbers = true)]
    Autocorr(RunConfig),
    /// Beam-splitter linear entropy over an (alpha, tau) grid.
    #[command(allow_negative_numbers = true)]
    EntropyScan(RunConfig),
    /// Moments of the coherent-state measure against rho_n.
    #[command(allow_negative_numbers = true)]
    MeasureCheck(RunConfig),
}

#[derive(Debug)]
pub struct CliError {
    pub code: u8,
    pub msg: String,
}

impl CliError {
    pub fn io(msg: impl Into<String>) -> Self {
        Self {
            code: 1,
            msg: msg.into(),
        }
    }

    pub fn validation(msg: impl Into<String>) -> Self {
        Self {
            code: 2,
            msg: msg.into(),
        }
    }

    pub fn tolerance(msg: impl Into<String>) -> Self {
        Self {
            code: 4,
            msg: msg.into(),
        }
    }
}

impl From<nccs::Error> for CliError {
    fn from(e: nccs::Error) -> Self {
        use nccs::Error::*;
        let code = match &e {
            Io { .. } => 1,
            Truncation { .. } => 3,
            Numerical(_) => 4,
            Domain(_) | Range(_) | Divergence { .. } | Degenerate(_) | Overflow(_) | Parse(_) => 2,
        };
        Self {
            code,
            msg: e.to_string(),
        }
    }
}

type Handler = fn(&RunConfig) -> Result<(), CliError>;

fn run(cmd: Cmd) -> Result<(), CliError> {
    let (cfg, f): (RunConfig, Handler) = match cmd {
        Cmd::State(c) => (c, commands::cmd_state),
        Cmd::Metrics(c) => (c, commands::cmd_metrics),
        Cmd::Autocorr(c) => (c, commands::cmd_autocorr),
        Cmd::EntropyScan(c) => (c, commands::cmd_entropy_scan),
        Cmd::MeasureCheck(c) => (c, commands::cmd_measure_check),
    };
    let cfg = cfg.merged()?;
    if let Some(w) = cfg.workers {
        if w == 0 {
            return Err(CliError::validation("--workers must be at least 1"));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(w)
            .build_global()
            .map_err(|e| CliError::validation(e.to_string()))?;
    }
    f(&cfg)
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match run(cli.cmd) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {}", e.msg);
            ExitCode::from(e.code)
        }
    }
}
