//! Command-line front end over the experiment drivers.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use hyperac::experiment::{
    run_check, run_experiment, ExperimentConfig, Mode, RunContext, TimeScale, EXIT_ERROR,
};

#[derive(Parser)]
#[command(name = "hyperac", version, about = "Damped hyperbolic Allen-Cahn experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Single PDE run with energy, interface, and moving-frame diagnostics.
    RunPde(Common),
    /// Interface ODE trajectory and invariant checks.
    RunOde(Common),
    /// PDE runs over eps_list and/or an ODE convergence study over eta_list.
    Sweep(Common),
    /// Convergence table towards the sharp-interface limits.
    Compare(Common),
    /// Invariant suite.
    Check(Common),
}

#[derive(Args)]
struct Common {
    /// TOML configuration; defaults apply when omitted.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output directory.
    #[arg(long, default_value = "out")]
    out: PathBuf,
    /// Worker threads for sweeps (0 = all cores).
    #[arg(long, default_value_t = 0)]
    workers: usize,
    /// Time scale of the `t` column.
    #[arg(long, default_value = "fast", value_parser = ["fast", "slow"])]
    timescale: String,
}

fn execute(cli: Cli) -> hyperac::Result<i32> {
    let (mode, common) = match cli.command {
        Command::RunPde(c) => (Some(Mode::Pde), c),
        Command::RunOde(c) => (Some(Mode::Ode), c),
        Command::Sweep(c) => (Some(Mode::Sweep), c),
        Command::Compare(c) => (Some(Mode::Compare), c),
        Command::Check(c) => (None, c),
    };
    let cfg = match &common.config {
        Some(path) => ExperimentConfig::from_path(path)?,
        None => ExperimentConfig::default(),
    };
    let ctx = RunContext {
        out: common.out,
        workers: common.workers,
        timescale: common.timescale.parse::<TimeScale>()?,
    };
    match mode {
        Some(m) => run_experiment(&cfg, Some(m), &ctx),
        None => run_check(&cfg, &ctx),
    }
}

fn main() -> ExitCode {
    let code = match execute(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            EXIT_ERROR
        }
    };
    ExitCode::from(code as u8)
}
