//! `csd`: circular spectral difference analysis of network weights.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

mod commands;

#[derive(Parser)]
#[command(
    name = "csd",
    version,
    about = "Conjugate circular ensembles and CSD equivalence for network weights"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum ScalingArg {
    None,
    InvN,
    UnitRadius,
}

#[derive(Clone, Copy, ValueEnum)]
enum ReductionArg {
    Modulus,
    RealPart,
}

#[derive(Clone, Copy, ValueEnum)]
enum ScaleArg {
    Unit,
    FanIn,
}

#[derive(Subcommand)]
enum Command {
    /// Build the layer ensemble and its conjugate circular ensemble, write report.json and curve.csv.
    Analyze {
        #[arg(long)]
        weights: PathBuf,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 1000)]
        bins: usize,
        #[arg(long, default_value_t = 6.0)]
        eps_max: f64,
        #[arg(long, value_enum, default_value = "none")]
        scaling: ScalingArg,
        #[arg(long, value_enum, default_value = "modulus")]
        reduction: ReductionArg,
        #[arg(long, default_value_t = 1)]
        reps: usize,
        /// Skip tensors whose leading dimension exceeds this order.
        #[arg(long)]
        max_order: Option<usize>,
        #[arg(long, default_value_t = 0.5)]
        tail_fraction: f64,
        #[arg(long, default_value_t = 0.05)]
        tail_tol: f64,
        /// Equivalence threshold recorded in the report for later comparisons.
        #[arg(long, default_value_t = 0.05)]
        delta: f64,
        /// Worker threads for per-member eigensolves (0 = all cores). Does not affect results.
        #[arg(long, default_value_t = 0)]
        threads: usize,
        #[arg(long, default_value = ".")]
        out: PathBuf,
    },
    /// Decide equivalence of two analyzed networks from their reports.
    Compare {
        a: PathBuf,
        b: PathBuf,
        #[arg(long, default_value_t = 0.05)]
        delta: f64,
        /// Also write the verdict document here.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run the built-in invariant checks.
    Selftest {
        #[arg(long, default_value_t = 20201)]
        seed: u64,
        /// Multiplies every check tolerance; 0 is a negative control.
        #[arg(long, default_value_t = 1.0, hide = true)]
        tolerance_scale: f64,
    },
    /// Write a seeded Gaussian network in the tensor file format.
    Synth {
        /// Comma-separated shapes, dimensions joined by `x`, e.g. `16x3x3x3,32x16x3x3`.
        #[arg(long)]
        shapes: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, value_enum, default_value = "fan-in")]
        scale: ScaleArg,
        #[arg(long, default_value = "synthetic")]
        architecture: String,
        #[arg(long)]
        out: PathBuf,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Analyze {
            weights,
            seed,
            bins,
            eps_max,
            scaling,
            reduction,
            reps,
            max_order,
            tail_fraction,
            tail_tol,
            delta,
            threads,
            out,
        } => {
            let config = csd_core::analysis::AnalysisConfig {
                weights: Some(weights.display().to_string()),
                seed,
                eps_max,
                bins,
                scaling: match scaling {
                    ScalingArg::None => csd_core::ScalingMode::None,
                    ScalingArg::InvN => csd_core::ScalingMode::InvN,
                    ScalingArg::UnitRadius => csd_core::ScalingMode::UnitRadius,
                },
                reduction: match reduction {
                    ReductionArg::Modulus => csd_core::Reduction::Modulus,
                    ReductionArg::RealPart => csd_core::Reduction::RealPart,
                },
                reps,
                max_order,
                tail_fraction,
                tail_tol,
                delta_threshold: delta,
                ..Default::default()
            };
            commands::analyze(&weights, &config, threads, &out)
        }
        Command::Compare { a, b, delta, out } => commands::compare(&a, &b, delta, out.as_deref()),
        Command::Selftest {
            seed,
            tolerance_scale,
        } => commands::selftest(seed, tolerance_scale),
        Command::Synth {
            shapes,
            seed,
            scale,
            architecture,
            out,
        } => {
            let scale = match scale {
                ScaleArg::Unit => csd_core::synthetic::WeightScale::Unit,
                ScaleArg::FanIn => csd_core::synthetic::WeightScale::FanIn,
            };
            commands::synth(&shapes, seed, scale, &architecture, &out)
        }
    };
    match result {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(2)
        }
    }
}
