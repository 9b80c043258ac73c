//! Command-line front end for the FPU Riemann laboratory.
//!
//! Subcommands cover the full workflow: inspect potentials, solve
//! macroscopic Riemann problems, analyse the zero-dissipation shock locus,
//! run chain simulations from TOML configs, measure and segment the
//! resulting wave trains, compare measurement against prediction, and run
//! batches in parallel. Errors map onto stable exit codes per class.

pub mod commands;
pub mod config;
pub mod output;

use std::path::PathBuf;

use clap::{Parser, Subcommand};
use fpulab_core::Error;

use commands::measure::MeasureOpts;
use commands::psolve::{ModeChoice, SolverChoice};
use commands::recipe::RecipeName;

/// Exit codes by error class; `0` is success.
pub fn exit_code(err: &Error) -> i32 {
    match err {
        Error::Config(_) => 2,
        Error::Domain(_) => 3,
        Error::Convexity(_) => 4,
        Error::Numerics(_) => 5,
        Error::Usage(_) => 6,
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "fpulab",
    version,
    about = "Numerical laboratory for Riemann problems in convex FPU chains"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Inspect the built-in potential catalogue.
    Potential {
        #[command(subcommand)]
        action: PotentialAction,
    },
    /// Run one chain Riemann problem from a TOML config.
    Simulate {
        /// Path to the run config.
        #[arg(long)]
        config: PathBuf,
        /// Output directory (default: $FPULAB_OUT/<label> or ./<label>).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Solve a macroscopic Riemann problem.
    Psolve {
        /// Potential name from the catalogue.
        #[arg(long)]
        potential: String,
        /// Left state: r v.
        #[arg(long, num_args = 2, allow_hyphen_values = true)]
        ul: Vec<f64>,
        /// Right state: r v.
        #[arg(long, num_args = 2, allow_hyphen_values = true)]
        ur: Vec<f64>,
        #[arg(long, value_enum, default_value = "classical")]
        solver: SolverChoice,
        /// Flux orientation mode for fpu-predict.
        #[arg(long, value_enum, default_value = "supersonic")]
        mode: ModeChoice,
        /// Measured front-speed table (CSV r_r,c_f) for fpu-predict.
        #[arg(long)]
        cf_table: Option<PathBuf>,
        /// Also sample the self-similar profile on this many c-points.
        #[arg(long)]
        samples: Option<usize>,
        /// Output directory; prints JSON to stdout when absent.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Zero-dissipation shock locus analysis.
    Consdata {
        #[command(subcommand)]
        action: ConsdataAction,
    },
    /// Window-average, segment, and track waves of a completed run.
    Measure {
        /// Path to the run's manifest.json.
        #[arg(long)]
        manifest: PathBuf,
        /// Output directory (default: next to the manifest).
        #[arg(long)]
        out: Option<PathBuf>,
        /// Window width in particles (default: N-derived).
        #[arg(long)]
        window: Option<usize>,
        /// Window stride in particles (default: window/4).
        #[arg(long)]
        stride: Option<usize>,
        /// Oscillation threshold override.
        #[arg(long)]
        threshold: Option<f64>,
    },
    /// Compare a measured run against a continuum Riemann solution.
    Compare {
        #[arg(long)]
        manifest: PathBuf,
        #[arg(long, value_enum, default_value = "classical")]
        solver: SolverChoice,
        #[arg(long, value_enum, default_value = "supersonic")]
        mode: ModeChoice,
        #[arg(long)]
        cf_table: Option<PathBuf>,
        /// Output JSON path; prints to stdout when absent.
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        window: Option<usize>,
        #[arg(long)]
        stride: Option<usize>,
        #[arg(long)]
        threshold: Option<f64>,
    },
    /// Run a batch of configs in parallel.
    Sweep {
        /// Config files to run.
        #[arg(long, num_args = 1.., required = true)]
        configs: Vec<PathBuf>,
        /// Root output directory (one subdirectory per run).
        #[arg(long)]
        out: PathBuf,
        /// Worker threads (default: all cores).
        #[arg(long, default_value_t = 0)]
        threads: usize,
    },
    /// Write ready-made experiment configs.
    Recipe {
        #[arg(value_enum)]
        name: RecipeName,
        /// Directory to write the TOML file(s) into.
        #[arg(long, default_value = ".")]
        out: PathBuf,
    },
}

#[derive(Debug, Subcommand)]
pub enum PotentialAction {
    /// List catalogue names.
    List,
    /// Print domain, hyperbolic core, and turning points as JSON.
    Info { name: String },
}

#[derive(Debug, Subcommand)]
pub enum ConsdataAction {
    /// Trace the locus J = 0 inside a strain window.
    Trace {
        #[arg(long)]
        potential: String,
        /// Window: r_l_min r_l_max r_r_min r_r_max.
        #[arg(long, num_args = 4, allow_hyphen_values = true)]
        window: Vec<f64>,
        /// Arclength continuation step.
        #[arg(long, default_value_t = 0.01)]
        step: f64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Report the zero-dissipation shock conjugate to a left strain.
    Shock {
        #[arg(long)]
        potential: String,
        #[arg(long, allow_hyphen_values = true)]
        r_l: f64,
        #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
        v_l: f64,
        /// Characteristic family: 1 or 2.
        #[arg(long, default_value_t = 1)]
        family: u8,
    },
    /// Local structure of the locus where it crosses the diagonal.
    Bifurcation {
        #[arg(long)]
        potential: String,
        #[arg(long, allow_hyphen_values = true)]
        r_star: f64,
        /// Offset from the crossing along the diagonal.
        #[arg(long, default_value_t = 0.01)]
        s: f64,
    },
}

fn pair(v: &[f64], what: &str) -> Result<[f64; 2], Error> {
    v.try_into()
        .map_err(|_| Error::Usage(format!("{what} needs exactly two numbers: r v")))
}

/// Dispatch a parsed command line.
pub fn run(cli: &Cli) -> Result<(), Error> {
    match &cli.command {
        Command::Potential { action } => match action {
            PotentialAction::List => commands::potential::run_list(),
            PotentialAction::Info { name } => commands::potential::run_info(name),
        },
        Command::Simulate { config, out } => {
            commands::simulate::run(config, out.as_deref()).map(|_| ())
        }
        Command::Psolve {
            potential,
            ul,
            ur,
            solver,
            mode,
            cf_table,
            samples,
            out,
        } => commands::psolve::run(
            potential,
            pair(ul, "--ul")?,
            pair(ur, "--ur")?,
            *solver,
            *mode,
            cf_table.as_deref(),
            *samples,
            out.as_deref(),
        ),
        Command::Consdata { action } => match action {
            ConsdataAction::Trace {
                potential,
                window,
                step,
                out,
            } => {
                let w: [f64; 4] = window.as_slice().try_into().map_err(|_| {
                    Error::Usage("--window needs exactly four numbers".into())
                })?;
                commands::consdata::run_trace(
                    potential,
                    (w[0], w[1], w[2], w[3]),
                    *step,
                    out,
                )
            }
            ConsdataAction::Shock {
                potential,
                r_l,
                v_l,
                family,
            } => commands::consdata::run_shock(potential, *r_l, *v_l, *family),
            ConsdataAction::Bifurcation {
                potential,
                r_star,
                s,
            } => commands::consdata::run_bifurcation(potential, *r_star, *s),
        },
        Command::Measure {
            manifest,
            out,
            window,
            stride,
            threshold,
        } => commands::measure::run(
            manifest,
            out.as_deref(),
            &MeasureOpts {
                window: *window,
                stride: *stride,
                threshold: *threshold,
            },
        ),
        Command::Compare {
            manifest,
            solver,
            mode,
            cf_table,
            out,
            window,
            stride,
            threshold,
        } => commands::compare::run(
            manifest,
            *solver,
            *mode,
            cf_table.as_deref(),
            out.as_deref(),
            &MeasureOpts {
                window: *window,
                stride: *stride,
                threshold: *threshold,
            },
        ),
        Command::Sweep {
            configs,
            out,
            threads,
        } => commands::sweep::run(configs, out, *threads),
        Command::Recipe { name, out } => commands::recipe::run(*name, out).map(|_| ()),
    }
}
