mod commands;
mod config;
mod table;

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use crate::commands::RunError;

const EXIT_CONFIG: u8 = 2;
const EXIT_NUMERICAL: u8 = 3;

/// Value-distribution experiments for half-line Schrödinger operators.
#[derive(Debug, Parser)]
#[command(name = "valdist", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, clap::Args)]
struct Common {
    /// JSON run configuration
    #[arg(long)]
    config: PathBuf,
    /// CSV destination; overrides the config and defaults to stdout
    #[arg(long)]
    out: Option<PathBuf>,
    /// Worker threads (0 = one per core)
    #[arg(long, default_value_t = 0)]
    threads: usize,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Spectral density from connection coefficients over a λ-grid
    Density(Common),
    /// Measure of the phase band against its limit, per x
    Distcheck(Common),
    /// Smoothed angle gap bound, per ε
    Herglotz(Common),
    /// Preimage measure of the target set against its limit, per x
    Theorem2(Common),
    /// Condition A ratios over a λ-grid and N schedule
    ConditionA(Common),
    /// Bessel J, Y and derivatives over ν and x schedules
    Bessel(Common),
}

fn run(cmd: &Command) -> Result<(), RunError> {
    let common = match cmd {
        Command::Density(c)
        | Command::Distcheck(c)
        | Command::Herglotz(c)
        | Command::Theorem2(c)
        | Command::ConditionA(c)
        | Command::Bessel(c) => c,
    };
    if common.threads > 0 {
        rayon::ThreadPoolBuilder::new()
            .num_threads(common.threads)
            .build_global()
            .map_err(|e| RunError::Config(format!("cannot start thread pool: {e}")))?;
    }
    let (cfg, base) = config::load(&common.config)?;
    let table = match cmd {
        Command::Density(_) => commands::density(&cfg, &base)?,
        Command::Distcheck(_) => commands::distcheck(&cfg, &base)?,
        Command::Herglotz(_) => commands::herglotz(&cfg)?,
        Command::Theorem2(_) => commands::theorem2(&cfg, &base)?,
        Command::ConditionA(_) => commands::condition_a(&cfg, &base)?,
        Command::Bessel(_) => commands::bessel(&cfg)?,
    };
    let out = common
        .out
        .clone()
        .or_else(|| cfg.output.as_ref().map(|p| base.join(p)));
    let io_err = |e: &dyn std::fmt::Display| RunError::Config(format!("cannot write output: {e}"));
    match out {
        Some(path) => {
            let file =
                File::create(&path).map_err(|e| io_err(&format!("{}: {e}", path.display())))?;
            let mut w = BufWriter::new(file);
            table.write_to(&mut w).map_err(|e| io_err(&e))?;
            w.flush().map_err(|e| io_err(&e))?;
        }
        None => table
            .write_to(io::stdout().lock())
            .map_err(|e| io_err(&e))?,
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(RunError::Config(msg)) => {
            eprintln!("valdist: config error: {msg}");
            ExitCode::from(EXIT_CONFIG)
        }
        Err(RunError::Numerical { message, lambda }) => {
            match lambda {
                Some(l) => eprintln!("valdist: numerical failure at lambda = {l}: {message}"),
                None => eprintln!("valdist: numerical failure: {message}"),
            }
            ExitCode::from(EXIT_NUMERICAL)
        }
    }
}
