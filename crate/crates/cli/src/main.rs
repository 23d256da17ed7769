//! Command-line front end: solve, trace, check, generate, benchmark and plot.
//!
//! Exit codes: 0 on success (converged or exact), 2 when an integration cap
//! was hit, 1 on any input error (bad flags, unreadable or malformed files).

mod commands;
mod svg;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand, ValueEnum};
use wbag::{Method, Model};

#[derive(Parser)]
#[command(
    name = "wbag",
    version,
    about = "Solve, generate and benchmark weighted bipolar argumentation graphs"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct ModelArg {
    /// Semantics model: quad, euler, dfquad or sdfquad
    #[arg(long, default_value = "quad")]
    model: Model,
}

#[derive(Args)]
struct SolverArgs {
    /// Integration step size
    #[arg(long, default_value_t = 0.01)]
    delta: f64,
    /// Convergence threshold on the derivative max-norm
    #[arg(long, default_value_t = 1e-4)]
    epsilon: f64,
    /// Cap on simulated time
    #[arg(long, default_value_t = 1000.0)]
    tmax: f64,
    /// Wall-clock cap in seconds; 0 disables it
    #[arg(long, default_value_t = 30.0)]
    wall_limit: f64,
    /// Step method: euler or rk4
    #[arg(long, default_value = "rk4")]
    method: Method,
    /// Trajectory sampling stride, in steps
    #[arg(long, default_value_t = 10)]
    record_every: usize,
}

/// Which solving algorithm `solve` uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Algo {
    /// Exact linear pass for acyclic graphs, ODE integration otherwise
    Auto,
    /// Always integrate the differential equations
    Ode,
    /// Exact linear pass; fails on cyclic graphs
    Acyclic,
}

#[derive(Subcommand)]
enum Command {
    /// Compute final strengths and print one row per argument
    Solve {
        /// Graph file to solve
        file: PathBuf,
        #[command(flatten)]
        model: ModelArg,
        #[arg(long, value_enum, default_value_t = Algo::Auto)]
        algo: Algo,
        /// Re-run at delta/2 and report the final-state difference
        /// (forces ODE integration)
        #[arg(long)]
        refine: bool,
        #[command(flatten)]
        solver: SolverArgs,
    },
    /// Integrate and write the trajectory CSV (always via the ODE, so the
    /// evolution exists even for acyclic graphs)
    Trace {
        file: PathBuf,
        /// Output CSV path
        #[arg(long)]
        out: PathBuf,
        /// Also write the per-argument convergence report CSV here
        #[arg(long)]
        report_out: Option<PathBuf>,
        #[command(flatten)]
        model: ModelArg,
        #[command(flatten)]
        solver: SolverArgs,
    },
    /// Validate a graph file and report acyclicity
    Check { file: PathBuf },
    /// Generate graphs
    Gen {
        #[command(subcommand)]
        what: GenCommand,
    },
    /// Solve every file in a size-structured benchmark tree and report
    /// per-size runtime statistics
    Bench {
        /// Directory with one size-named subdirectory per graph size
        dir: PathBuf,
        #[command(flatten)]
        model: ModelArg,
        #[command(flatten)]
        solver: SolverArgs,
        /// Worker threads (1 = sequential, interference-free timing)
        #[arg(long, default_value_t = 1)]
        jobs: usize,
        /// Integrate even acyclic graphs instead of using the exact pass
        #[arg(long)]
        no_fast_path: bool,
        /// Write the per-file CSV here
        #[arg(long)]
        records_out: Option<PathBuf>,
        /// Write the per-size stats CSV here
        #[arg(long)]
        stats_out: Option<PathBuf>,
    },
    /// Render a trajectory CSV as an SVG line chart
    Plot {
        /// Trajectory CSV produced by `trace`
        csv: PathBuf,
        /// Output SVG path
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = 800)]
        width: u32,
        #[arg(long, default_value_t = 480)]
        height: u32,
    },
}

#[derive(Subcommand)]
enum GenCommand {
    /// Uniform random graph, fully determined by the seed
    Random {
        #[arg(long)]
        nodes: usize,
        #[arg(long)]
        edges: usize,
        /// Probability that a sampled pair becomes an attack
        #[arg(long, default_value_t = 0.5)]
        attack_prob: f64,
        /// Give every argument this weight instead of uniform weights
        #[arg(long)]
        constant_weight: Option<f64>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Exclude self-loops from the sampled pair space
        #[arg(long)]
        no_self_loops: bool,
        /// Output path; `-` writes to stdout
        #[arg(long, default_value = "-")]
        out: PathBuf,
    },
    /// The damped-oscillation cycle family: A supports B1..Bk, every Bi
    /// supports every Cj, every Ci attacks A
    Cycle {
        #[arg(long)]
        k: usize,
        /// Output path; `-` writes to stdout
        #[arg(long, default_value = "-")]
        out: PathBuf,
    },
    /// One of the built-in example graphs
    Fixture {
        /// `stock` (cyclic buy/sell decision) or `edemocracy` (acyclic
        /// council budget)
        #[arg(long)]
        name: String,
        /// Output path; `-` writes to stdout
        #[arg(long, default_value = "-")]
        out: PathBuf,
    },
    /// Benchmark tree: one directory per size with `trials` files each
    Bench {
        /// Root directory to create the tree under
        #[arg(long)]
        dir: PathBuf,
        #[arg(long, default_value_t = 100)]
        base_size: usize,
        /// Number of size increments (sizes are base_size * 1..=increments)
        #[arg(long)]
        increments: usize,
        /// Files per size
        #[arg(long)]
        trials: usize,
        /// Edges per node in each generated graph
        #[arg(long, default_value_t = 10.0)]
        edge_ratio: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            let _ = err.print();
            return match err.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => ExitCode::SUCCESS,
                _ => ExitCode::from(1),
            };
        }
    };
    match commands::run(cli.command) {
        Ok(code) => ExitCode::from(code),
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(1)
        }
    }
}
