//! `holomean <command> --config <path> [--out <path>] [--seed <int>]`
//!
//! Exit status: 0 when every verdict passes or the solver converged, 1 when a
//! verdict failed or the solver did not converge, 2 on configuration or I/O errors.

mod commands;
mod config;
mod output;

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::Parser;

use commands::Command;
use config::{Config, ConfigError};

#[derive(Debug, Parser)]
#[command(
    name = "holomean",
    version,
    about = "Nonlinear circle means and their asymptotic verdicts"
)]
struct Cli {
    command: Command,
    /// Scenario file with `key = value` lines.
    #[arg(long)]
    config: PathBuf,
    /// Output CSV; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Seed for randomly drawn points; overrides the `seed` key.
    #[arg(long)]
    seed: Option<u64>,
}

fn checkpoint_path(out: &Path, suffix: &str) -> PathBuf {
    let stem = out.file_stem().and_then(|s| s.to_str()).unwrap_or("out");
    out.with_file_name(format!("{stem}.{suffix}.csv"))
}

fn execute(cli: &Cli) -> Result<bool, ConfigError> {
    let text = fs::read_to_string(&cli.config)
        .map_err(|e| ConfigError::new(format!("cannot read {}: {e}", cli.config.display())))?;
    let cfg = Config::parse(&text)?;
    let seed = match cli.seed {
        Some(s) => s,
        None => cfg.get("seed", Some(0u64))?,
    };
    if cli.command == Command::Dpp
        && cli.out.is_none()
        && cfg.get::<usize>("dpp.checkpoint_every", Some(0))? > 0
    {
        return Err(ConfigError::new("dpp.checkpoint_every needs --out"));
    }
    let outcome = commands::run(cli.command, &cfg, seed)?;
    let io = |p: &Path, e: std::io::Error| {
        ConfigError::new(format!("cannot write {}: {e}", p.display()))
    };
    match &cli.out {
        Some(path) => {
            fs::write(path, outcome.csv.as_str()).map_err(|e| io(path, e))?;
            for (suffix, body) in &outcome.checkpoints {
                let p = checkpoint_path(path, suffix);
                fs::write(&p, body.as_str()).map_err(|e| io(&p, e))?;
            }
        }
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout
                .write_all(outcome.csv.as_str().as_bytes())
                .and_then(|_| stdout.flush())
                .map_err(|e| io(Path::new("<stdout>"), e))?;
        }
    }
    Ok(outcome.ok)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("holomean: {e}");
            ExitCode::from(2)
        }
    }
}
