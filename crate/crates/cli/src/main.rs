//! `bellrand` command-line tool.
//!
//! Exit codes: 0 when every check passes, 1 on a numeric tolerance failure,
//! 2 on a usage or configuration error.

mod commands;
mod config;

use std::io::Write;
use std::process::ExitCode;

use bellrand::serial::Envelope;
use clap::{Parser, Subcommand};
use serde::Serialize;

use config::{resolve, Format, Overrides, RunConfig};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("usage: {0}")]
    Usage(String),
    #[error("i/o: {0}")]
    Io(#[from] std::io::Error),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

#[derive(Parser)]
#[command(
    name = "bellrand",
    version,
    about = "Bell-test randomness certification reports"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Bell values and the spectral self-test at each angle.
    Selftest(Overrides),
    /// Min-entropy of the local POVM, global projective and global POVM schemes.
    Certify(Overrides),
    /// Conjugation attack on two tetrahedral POVMs.
    Attack(Overrides),
    /// Bell values and all three min-entropies over a grid (default 100 angles).
    Sweep(Overrides),
}

const SWEEP_DEFAULT_GRID: usize = 100;

fn emit(cfg: &RunConfig, text: String) -> Result<(), CliError> {
    match &cfg.out {
        Some(path) => std::fs::write(path, text)?,
        None => std::io::stdout().lock().write_all(text.as_bytes())?,
    }
    Ok(())
}

fn json<T: Serialize>(cfg: &RunConfig, body: T) -> Result<String, CliError> {
    let mut s = serde_json::to_string_pretty(&Envelope::new(body, cfg.tolerances))?;
    s.push('\n');
    Ok(s)
}

fn render<T: Serialize>(
    cfg: &RunConfig,
    body: T,
    csv: impl FnOnce(&T) -> String,
) -> Result<String, CliError> {
    Ok(match cfg.format {
        Format::Json => json(cfg, body)?,
        Format::Csv => commands::csv_preamble(&cfg.tolerances) + &csv(&body),
    })
}

fn run(cli: Cli) -> Result<bool, CliError> {
    match cli.command {
        Command::Selftest(o) => {
            let cfg = resolve(&o, None)?;
            let r = commands::selftest(&cfg);
            let pass = r.pass;
            if !pass {
                let list: Vec<String> = r.failures.iter().map(|t| t.to_string()).collect();
                eprintln!("selftest failed at θ = {}", list.join(", "));
            }
            emit(&cfg, render(&cfg, r, commands::selftest_csv)?)?;
            Ok(pass)
        }
        Command::Certify(o) => {
            let cfg = resolve(&o, None)?;
            let r = commands::certify(&cfg);
            let pass = r.pass;
            emit(&cfg, render(&cfg, r, commands::certify_csv)?)?;
            Ok(pass)
        }
        Command::Attack(o) => {
            let cfg = resolve(&o, None)?;
            let r = commands::attack(&cfg);
            let pass = r.pass;
            for rep in &r.reports {
                if let Some(msg) = &rep.degenerate {
                    eprintln!("θ = {}: attack degenerate: {msg}", rep.theta);
                }
            }
            emit(&cfg, render(&cfg, r, commands::attack_csv)?)?;
            Ok(pass)
        }
        Command::Sweep(o) => {
            let cfg = resolve(&o, Some(SWEEP_DEFAULT_GRID))?;
            let r = commands::sweep(&cfg);
            let pass = r.pass;
            emit(&cfg, render(&cfg, r, commands::sweep_csv)?)?;
            Ok(pass)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e @ CliError::Usage(_)) => {
            eprintln!("{e}");
            ExitCode::from(2)
        }
        Err(e) => {
            eprintln!("{e}");
            ExitCode::from(2)
        }
    }
}
