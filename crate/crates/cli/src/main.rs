//! Command-line interface of the experiment harness.

use std::path::PathBuf;

use clap::{Parser, Subcommand};

use rebound_cli::config::ExperimentConfig;
use rebound_cli::experiments;
use rebound_cli::report::{OutputFormat, Report};

#[derive(Parser)]
#[command(
    name = "rebound",
    about = "Simulator of disynaptic delay elements and a cricket-inspired \
             temporal feature-detection circuit",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Configuration file (JSON); built-in defaults when omitted.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Master seed override (also replaces the mismatch seed).
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Integration step override (ms).
    #[arg(long, global = true)]
    dt: Option<f64>,

    /// Output directory.
    #[arg(long, global = true, default_value = "out")]
    out: PathBuf,

    /// Output format: one JSON document or one CSV file per table.
    #[arg(long, global = true, default_value = "json")]
    format: String,

    /// Trials per stimulus condition.
    #[arg(long, global = true)]
    trials: Option<usize>,

    /// Noise-level override: restricts the sweep to this single phase-noise
    /// fraction (kept alongside the noiseless baseline for `boundary`).
    #[arg(long, global = true)]
    noise: Option<f64>,
}

#[derive(Subcommand)]
enum Command {
    /// Characterize a mismatched population of delay elements.
    Characterize,
    /// Run one double-pulse detection trial and dump membrane traces.
    Detect {
        /// Interpulse interval of the trial (ms).
        #[arg(long, default_value_t = 20.0)]
        ipi: f64,
    },
    /// Sweep interpulse intervals and noise levels over repeated trials.
    IpiSweep {
        /// Use the boundary circuit preset instead of the central one.
        #[arg(long)]
        boundary_preset: bool,
    },
    /// Map the classification region over the direct/relay weight grid.
    Boundary,
    /// Sweep the saturated-mode delay-element weight grid.
    DelaySweep,
    /// Configure a polychronous detector pair and test spike patterns.
    Polychronous,
}

fn main() -> anyhow::Result<()> {
    let cli = Cli::parse();
    let format: OutputFormat = cli.format.parse()?;

    let mut cfg = match &cli.config {
        Some(path) => ExperimentConfig::load(path)?,
        None => ExperimentConfig::default(),
    };
    if let Some(seed) = cli.seed {
        cfg = cfg.with_seed(seed);
    }
    if let Some(dt) = cli.dt {
        cfg.dt = dt;
    }
    if let Some(trials) = cli.trials {
        cfg.trials = trials;
    }
    if let Some(noise) = cli.noise {
        cfg.noise_levels = vec![noise];
        cfg.boundary.noise_levels = vec![0.0, noise];
    }
    cfg.validate()?;

    let report: Report = match cli.command {
        Command::Characterize => experiments::run_characterization(&cfg)?,
        Command::Detect { ipi } => {
            let noise = cli.noise.unwrap_or(0.0);
            experiments::run_detect(&cfg, ipi, noise)?
        }
        Command::IpiSweep { boundary_preset } => {
            if boundary_preset {
                let presets = cfg.effective_presets();
                experiments::run_ipi_sweep_with(
                    &cfg,
                    &presets.cricket_boundary.circuit,
                    "ipi_sweep_boundary",
                )?
            } else {
                experiments::run_ipi_sweep(&cfg)?
            }
        }
        Command::Boundary => experiments::run_boundary_sweep(&cfg)?,
        Command::DelaySweep => experiments::run_delay_config_sweep(&cfg)?,
        Command::Polychronous => experiments::run_polychronous_demo(&cfg)?,
    };

    let written = report.write(&cli.out, format)?;
    for path in written {
        println!("wrote {}", path.display());
    }
    Ok(())
}
