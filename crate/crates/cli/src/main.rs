#![allow(clippy::neg_cmp_op_on_partial_ord)]

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

mod commands;
mod config;

use commands::CliError;
use config::RunConfig;

/// Simulations and orbit checks for the n-body problem on spheres and hyperboloids.
#[derive(Parser)]
#[command(name = "curved-nbody", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Integrate a configuration and write its trajectory.
    Simulate(RunArgs),
    /// Check the equal-coefficient test for a polygon over a size grid.
    Criterion(RunArgs),
    /// Solve for the masses that equalize a polygon's size coefficients.
    SolveMasses(RunArgs),
    /// Masses that hold a triangle on a great circle at rest.
    FixedPoint(RunArgs),
    /// Classify isosceles fixed points by their masses.
    Isosceles(RunArgs),
}

#[derive(Args)]
struct RunArgs {
    /// Flat key=value configuration file.
    #[arg(long)]
    config: Option<PathBuf>,
    /// `--key value` overrides; these win over the file.
    #[arg(trailing_var_arg = true, allow_hyphen_values = true, num_args = 0..)]
    overrides: Vec<String>,
}

type Runner = fn(&RunConfig, &mut dyn Write) -> Result<i32, CliError>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (run, keys, args): (Runner, _, _) = match cli.command {
        Command::Simulate(a) => (commands::simulate, commands::SIMULATE_KEYS, a),
        Command::Criterion(a) => (commands::criterion, commands::CRITERION_KEYS, a),
        Command::SolveMasses(a) => (commands::solve_masses, commands::SOLVE_MASSES_KEYS, a),
        Command::FixedPoint(a) => (commands::fixed_point, commands::FIXED_POINT_KEYS, a),
        Command::Isosceles(a) => (commands::isosceles, commands::ISOSCELES_KEYS, a),
    };
    let stdout = std::io::stdout();
    let mut out = stdout.lock();
    let result = RunConfig::load(args.config.as_deref(), &args.overrides, keys)
        .map_err(CliError::from)
        .and_then(|cfg| run(&cfg, &mut out));
    let _ = out.flush();
    let code = result.unwrap_or_else(|e| {
        eprintln!("error: {e}");
        e.exit_code()
    });
    ExitCode::from(code as u8)
}
