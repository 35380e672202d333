//! `elastiscat` command-line tool.

mod args;
mod check;
mod config;
mod invert;
mod jacobian;
mod synth;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use args::WaveArg;

#[derive(Parser)]
#[command(name = "elastiscat", version, about = "Elastic rigid-obstacle scattering: synthesis, inversion and checks")]
struct Cli {
    #[command(subcommand)]
    command: Commands,
}

#[derive(clap::Args, Clone)]
struct MediumArgs {
    /// Lamé parameters `λ,μ`.
    #[arg(long, default_value = "2,1")]
    medium: String,
    /// Radius of the measurement sphere.
    #[arg(long, default_value_t = 1.0)]
    radius: f64,
}

#[derive(Subcommand)]
enum Commands {
    /// Synthesize measurement files for an obstacle.
    Synth {
        /// Obstacle surface: JSON file or `preset:NAME[:ARGS]`.
        #[arg(long, default_value = "preset:ellipsoid:0.6,0.75,0.9")]
        surface: String,
        /// Harmonic order used for presets that are not exactly representable.
        #[arg(long, default_value_t = 8)]
        shape_order: usize,
        #[command(flatten)]
        medium: MediumArgs,
        /// Frequencies `a:b:step` or a comma list.
        #[arg(long, default_value = "1:3:1")]
        freqs: String,
        /// `preset:cube-faces`, `preset:single`, `x,y,z`, or a JSON file.
        #[arg(long, default_value = "0,1,0")]
        directions: String,
        #[arg(long, value_enum, default_value_t = WaveArg::P)]
        wave: WaveArg,
        /// Measurement points (Fibonacci lattice on the sphere).
        #[arg(long, default_value_t = 100)]
        points: usize,
        /// Relative noise level δ.
        #[arg(long, default_value_t = 0.05)]
        noise: f64,
        /// Seed for all randomness of the run.
        #[arg(long, default_value_t = 42)]
        seed: u64,
        /// Modal truncation of the forward solver (default: from the frequency).
        #[arg(long)]
        order: Option<usize>,
        #[arg(long, default_value = "out")]
        out: PathBuf,
    },
    /// Reconstruct the obstacle from measurement files by frequency continuation.
    Invert {
        /// Measurement files, or directories holding `data_*.json`.
        #[arg(required = true)]
        data: Vec<PathBuf>,
        /// Stage frequencies (default: every frequency present in the data).
        #[arg(long)]
        freqs: Option<String>,
        /// Descent iterations per stage.
        #[arg(long, default_value_t = 100)]
        iterations: usize,
        /// Step constant `c` in `τ = c / k`.
        #[arg(long, default_value_t = 0.005)]
        step: f64,
        /// Radius of the initial sphere.
        #[arg(long, default_value_t = 0.5)]
        initial_radius: f64,
        /// Modal truncation of the forward solver (default: from the frequency).
        #[arg(long)]
        order: Option<usize>,
        /// Sweep incident directions one after another instead of jointly.
        #[arg(long)]
        sequential: bool,
        /// Armijo backtracking instead of fixed steps.
        #[arg(long)]
        backtracking: bool,
        /// True surface, to report reconstruction errors.
        #[arg(long)]
        truth: Option<String>,
        /// Samples per cross-section curve.
        #[arg(long, default_value_t = 128)]
        sections: usize,
        #[arg(long, default_value = "out")]
        out: PathBuf,
    },
    /// Run the numerical self-checks and write a pass/fail report.
    Check {
        #[command(flatten)]
        medium: MediumArgs,
        #[arg(long, default_value = "1:3:1")]
        freqs: String,
        /// Highest mode of the DtN definiteness scan.
        #[arg(long, default_value_t = 200)]
        max_order: usize,
        #[arg(long, default_value_t = 42)]
        seed: u64,
        /// Directory for `check.json` (the report is always printed).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Write the shape Jacobian of the scattering operator.
    JacobianDump {
        #[arg(long, default_value = "preset:ellipsoid:0.6,0.75,0.9")]
        surface: String,
        #[arg(long, default_value_t = 8)]
        shape_order: usize,
        #[command(flatten)]
        medium: MediumArgs,
        /// Single frequency.
        #[arg(long, default_value = "2")]
        freqs: String,
        /// One direction: `x,y,z` or a preset/file yielding exactly one.
        #[arg(long, default_value = "0,1,0")]
        directions: String,
        #[arg(long, value_enum, default_value_t = WaveArg::P)]
        wave: WaveArg,
        #[arg(long, default_value_t = 100)]
        points: usize,
        #[arg(long)]
        order: Option<usize>,
        #[arg(long, default_value = "out")]
        out: PathBuf,
    },
}

fn run(cli: Cli) -> anyhow::Result<bool> {
    match cli.command {
        Commands::Synth { surface, shape_order, medium, freqs, directions, wave, points, noise, seed, order, out } => {
            let cfg = config::SynthConfig {
                surface,
                shape_order,
                medium: config::Lame::parse(&medium.medium)?,
                radius: medium.radius,
                freqs: args::parse_freqs(&freqs)?,
                directions: args::parse_directions(&directions)?,
                wave,
                points,
                noise,
                seed,
                solver_order: order,
                files: Vec::new(),
            };
            synth::run(cfg, &out)?;
            Ok(true)
        }
        Commands::Invert {
            data,
            freqs,
            iterations,
            step,
            initial_radius,
            order,
            sequential,
            backtracking,
            truth,
            sections,
            out,
        } => {
            let cfg = config::InvertConfig::from_args(
                data,
                freqs.as_deref().map(args::parse_freqs).transpose()?,
                iterations,
                step,
                initial_radius,
                order,
                sequential,
                backtracking,
                truth,
                sections,
            )?;
            invert::run(cfg, &out)
        }
        Commands::Check { medium, freqs, max_order, seed, out } => {
            let cfg = config::CheckConfig {
                medium: config::Lame::parse(&medium.medium)?,
                radius: medium.radius,
                freqs: args::parse_freqs(&freqs)?,
                max_order,
                seed,
            };
            check::run(cfg, out.as_deref())
        }
        Commands::JacobianDump { surface, shape_order, medium, freqs, directions, wave, points, order, out } => {
            let freqs = args::parse_freqs(&freqs)?;
            let dirs = args::parse_directions(&directions)?;
            if freqs.len() != 1 || dirs.len() != 1 {
                anyhow::bail!("jacobian-dump takes exactly one frequency and one direction");
            }
            let cfg = config::JacobianConfig {
                surface,
                shape_order,
                medium: config::Lame::parse(&medium.medium)?,
                radius: medium.radius,
                omega: freqs[0],
                direction: dirs[0],
                wave,
                points,
                solver_order: order,
            };
            jacobian::run(cfg, &out)?;
            Ok(true)
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
