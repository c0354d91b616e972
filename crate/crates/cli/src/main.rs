//! `poincare`: computes Poincaré bases, quadrature rules, worst-case error
//! curves and random-density comparisons, writing CSV files and gnuplot
//! scripts into an output directory.

mod commands;
mod output;
mod plots;
mod setup;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use crate::setup::{exit_code, MeasureArgs};

#[derive(Debug, Parser)]
#[command(
    name = "poincare",
    version,
    about = "Poincaré quadratures for H¹(μ) on a bounded interval"
)]
struct Cli {
    #[command(flatten)]
    common: Common,

    #[command(subcommand)]
    command: Command,
}

/// Options shared by every subcommand.
#[derive(Debug, Args)]
pub struct Common {
    /// Output directory (created if missing).
    #[arg(long, global = true, default_value = "out")]
    pub out: PathBuf,

    /// Key = value configuration file (grid_size, lp_tol, refine_tol,
    /// refine_accept, max_iter, mesh_size, basis_backend).
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,

    /// LP grid size; overrides the configuration file.
    #[arg(long, global = true)]
    pub grid: Option<usize>,

    /// Finite-element mesh size; overrides the configuration file.
    #[arg(long, global = true)]
    pub mesh: Option<usize>,

    /// Seed for random densities.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Eigenvalues and the first eigenfunctions of the Poincaré basis.
    Basis {
        #[command(flatten)]
        measure: MeasureArgs,
        /// Number of nonzero eigenvalues to tabulate.
        #[arg(long, default_value_t = 50)]
        count: usize,
    },
    /// One Poincaré quadrature rule with the data for its overlay plot.
    Quad {
        #[command(flatten)]
        measure: MeasureArgs,
        #[arg(long)]
        n: usize,
    },
    /// Squared worst-case error of the Poincaré rules over a range of sizes.
    WceCurve {
        #[command(flatten)]
        measure: MeasureArgs,
        #[arg(long, default_value_t = 1)]
        n_min: usize,
        #[arg(long, default_value_t = 50)]
        n_max: usize,
    },
    /// Poincaré, Gaussian and Lloyd rules on seeded random densities.
    Compare {
        #[arg(long, default_value_t = 100)]
        count: usize,
        #[arg(long, default_value_t = 0.3)]
        lengthscale: f64,
    },
    /// Seeded random densities written as `t,rho` tables.
    RandomBatch {
        #[arg(long, default_value_t = 100)]
        count: usize,
        #[arg(long, default_value_t = 0.3)]
        lengthscale: f64,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Basis { measure, count } => commands::basis(&cli.common, measure, *count),
        Command::Quad { measure, n } => commands::quad(&cli.common, measure, *n),
        Command::WceCurve {
            measure,
            n_min,
            n_max,
        } => commands::wce_curve(&cli.common, measure, *n_min, *n_max),
        Command::Compare { count, lengthscale } => {
            commands::compare(&cli.common, *count, *lengthscale)
        }
        Command::RandomBatch { count, lengthscale } => {
            commands::random_batch(&cli.common, *count, *lengthscale)
        }
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(exit_code(&err))
        }
    }
}
