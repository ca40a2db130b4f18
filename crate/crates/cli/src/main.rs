use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Parser, Subcommand};

use tennis_cli::{execute, Command, Overrides};

/// Tennis-map and standard-map explorer: orbits, non-existence criteria for
/// invariant curves, energy thresholds and diffusion searches.
#[derive(Parser, Debug)]
#[command(name = "tennis", version)]
struct Cli {
    #[command(subcommand)]
    command: Cmd,

    /// Run configuration file.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output file (CSV or report block); stdout when absent.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Orbit length for simulate, portrait, lyapunov and the first diffusion round.
    #[arg(long, global = true, value_parser = count)]
    steps: Option<u64>,
    /// Initial angle.
    #[arg(long, global = true, allow_hyphen_values = true)]
    t0: Option<f64>,
    /// Initial relative velocity (Tennis) or momentum (standard map).
    #[arg(long, global = true, allow_hyphen_values = true)]
    v0: Option<f64>,
    /// Standard-map parameter; selects the standard map when no config is given.
    #[arg(long, global = true)]
    k: Option<f64>,
    /// Target energy oscillation for diffusion.
    #[arg(long, global = true)]
    amplitude: Option<f64>,
    /// Map-evaluation budget for diffusion.
    #[arg(long, global = true, value_parser = count)]
    budget: Option<u64>,
    /// Seed for the jittered ensemble grid.
    #[arg(long, global = true)]
    seed: Option<u64>,
}

fn count(s: &str) -> std::result::Result<u64, String> {
    tennis_cli::config::parse_integer(s).ok_or_else(|| format!("expected a non-negative integer, got `{s}`"))
}

#[derive(Subcommand, Debug, Clone, Copy)]
enum Cmd {
    /// Single orbit as CSV.
    Simulate,
    /// Ensemble point cloud as CSV.
    Portrait,
    /// Non-existence criteria along an orbit.
    Criterion,
    /// No-curve energy thresholds of a Tennis map.
    Threshold,
    /// Search for an orbit with large energy oscillation.
    Diffusion,
    /// Maximal Lyapunov exponent of one orbit.
    Lyapunov,
    /// Confinement scan over energy levels.
    Scan,
}

impl From<Cmd> for Command {
    fn from(c: Cmd) -> Self {
        match c {
            Cmd::Simulate => Command::Simulate,
            Cmd::Portrait => Command::Portrait,
            Cmd::Criterion => Command::Criterion,
            Cmd::Threshold => Command::Threshold,
            Cmd::Diffusion => Command::Diffusion,
            Cmd::Lyapunov => Command::Lyapunov,
            Cmd::Scan => Command::Scan,
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match real_main(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn real_main(cli: Cli) -> Result<()> {
    let text = match &cli.config {
        Some(p) => Some(std::fs::read_to_string(p).with_context(|| format!("reading {}", p.display()))?),
        None => None,
    };
    let overrides = Overrides {
        out: cli.out,
        steps: cli.steps.map(|n| n as usize),
        t0: cli.t0,
        v0: cli.v0,
        k: cli.k,
        amplitude: cli.amplitude,
        budget: cli.budget,
        seed: cli.seed,
    };
    let config = tennis_cli::run::load(text.as_deref(), &overrides)?;
    let artifact = execute(&config, cli.command.into())?;
    artifact.emit(config.run.output.as_deref())
}
