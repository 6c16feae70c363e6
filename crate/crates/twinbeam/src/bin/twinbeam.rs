//! Command-line front end: thin argument parsing over the library's command
//! layer.  All physics and file formats live in the library; this binary
//! only resolves the scenario, seed and output directory.

use anyhow::Result;
use clap::{Parser, Subcommand};
use std::path::PathBuf;

use twinbeam::commands::{
    cmd_analytic, cmd_correlation, cmd_image, cmd_sigma_scan, CommandContext,
};

#[derive(Parser)]
#[command(
    name = "twinbeam",
    version,
    about = "Stochastic twin-beam imaging simulator: correlated photon pairs, \
             differential absorption imaging, and sub-shot-noise benchmarks"
)]
struct Cli {
    /// Scenario file (TOML).
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,
    /// Override the scenario's random seed.
    #[arg(long, global = true, value_name = "N")]
    seed: Option<u64>,
    /// Override the scenario's ensemble size.
    #[arg(long, global = true, value_name = "N")]
    trajectories: Option<usize>,
    /// Output directory (created if missing).
    #[arg(long, global = true, value_name = "DIR", default_value = "out")]
    out: PathBuf,
    /// Use the scenario's paper-scale ensemble size (long wall time).
    #[arg(long, global = true)]
    paper_scale: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Tabulate the closed-form SNR and noise formulas over a parameter sweep.
    Analytic,
    /// Measure the pair-correlation profile and width from simulated fields.
    Correlation,
    /// Scan the noise-reduction factor against detector misalignment.
    SigmaScan,
    /// Run the differential absorption-imaging experiment with benchmarks.
    Image,
}

fn main() -> Result<()> {
    let cli = Cli::parse();
    let config = cli
        .config
        .ok_or_else(|| anyhow::anyhow!("--config PATH is required"))?;
    let ctx = CommandContext::new(&config, cli.out, cli.seed, cli.trajectories, cli.paper_scale)?;
    match cli.command {
        Command::Analytic => cmd_analytic(&ctx)?,
        Command::Correlation => cmd_correlation(&ctx)?,
        Command::SigmaScan => cmd_sigma_scan(&ctx)?,
        Command::Image => cmd_image(&ctx)?,
    }
    Ok(())
}
