//! `cmdnls`: batch runner for multi-soliton synthesis, PDE evolution, growth scans,
//! pole tracks and the invariant suite.
//!
//! Exit codes: 0 when every check passes, 1 when a check fails, 2 on usage or
//! configuration errors.

mod check;
mod config;
mod evolve;
mod growth;
mod poles;
mod report;
mod synth;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use config::{usage, RunConfig, UsageError};
use report::Report;

#[derive(Parser, Debug)]
#[command(name = "cmdnls", version, about = "Calogero-Moser derivative NLS numerical laboratory")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Multi-soliton field, pole track and spectrum report.
    Synth(Args),
    /// PDE trajectory, diagnostics and conservation report.
    Evolve(Args),
    /// Sobolev norm growth and fitted exponents.
    Growth(Args),
    /// Pole tracks from the inverse formula and from the pole ODE.
    Poles(Args),
    /// Invariant suite with pass/fail report.
    Check(Args),
}

#[derive(clap::Args, Debug)]
struct Args {
    /// JSON run configuration.
    #[arg(long)]
    config: PathBuf,
    /// Output directory (overrides the config's `out`).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Seed for randomized data (overrides the config's `seed`).
    #[arg(long)]
    seed: Option<u64>,
}

/// Resolved inputs shared by all commands.
pub struct Context {
    pub config: RunConfig,
    pub out: PathBuf,
    pub seed: u64,
}

/// Caps the global rayon pool at `CMDNLS_THREADS` when set.
fn configure_threads() -> Result<(), UsageError> {
    let Ok(v) = std::env::var("CMDNLS_THREADS") else {
        return Ok(());
    };
    let n: usize = v.trim().parse().ok().filter(|n| *n > 0).ok_or_else(|| usage(format!("CMDNLS_THREADS must be a positive integer, got {v:?}")))?;
    rayon::ThreadPoolBuilder::new().num_threads(n).build_global().map_err(|e| usage(e.to_string()))
}

fn run(cli: Cli) -> Result<bool, UsageError> {
    let (name, args): (&'static str, Args) = match cli.command {
        Command::Synth(a) => ("synth", a),
        Command::Evolve(a) => ("evolve", a),
        Command::Growth(a) => ("growth", a),
        Command::Poles(a) => ("poles", a),
        Command::Check(a) => ("check", a),
    };
    let config = RunConfig::load(&args.config)?;
    let seed = args.seed.or(config.seed).unwrap_or(0);
    let out = args.out.clone().or_else(|| config.out.clone()).unwrap_or_else(|| PathBuf::from("cmdnls-out"));
    std::fs::create_dir_all(&out).map_err(|e| usage(format!("cannot create {}: {e}", out.display())))?;
    let echo = serde_json::to_value(&config).map_err(|e| usage(e.to_string()))?;
    let ctx = Context { config, out, seed };
    let mut report = Report::new(name, seed, echo);
    match name {
        "synth" => synth::run(&ctx, &mut report)?,
        "evolve" => evolve::run(&ctx, &mut report)?,
        "growth" => growth::run(&ctx, &mut report)?,
        "poles" => poles::run(&ctx, &mut report)?,
        _ => check::run(&ctx, &mut report)?,
    }
    for c in report.checks() {
        let measured = c.measured.map_or_else(|| "-".to_string(), |m| format!("{m:.3e}"));
        let tol = c.tolerance.map_or_else(|| "-".to_string(), |t| format!("{t:.0e}"));
        eprintln!("{:<8} {:<40} {measured:>11} / {tol}", c.status.name(), c.name);
    }
    let passed = report.passed();
    report.finish(&ctx.out)?;
    Ok(passed)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(2) } else { ExitCode::SUCCESS };
        }
    };
    if let Err(e) = configure_threads() {
        eprintln!("error: {e}");
        return ExitCode::from(2);
    }
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
