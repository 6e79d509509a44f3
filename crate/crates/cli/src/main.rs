//! `convmax`: norms, rearrangements, kernel decompositions and maximizer
//! search for convolution operators on 1-D and 2-D grids.
//!
//! Every subcommand writes its artifacts into `--out-dir` (or
//! `$CONVMAX_OUT_DIR`) and echoes the main JSON document on stdout.
//! Exit status: 0 on success, 2 for invalid or infeasible inputs, 1 for I/O
//! failures.

mod commands;
mod error;
mod output;
mod sweep;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use crate::error::CliError;

#[derive(Parser, Debug)]
#[command(name = "convmax", version, about = "Convolution operator norms, kernel decompositions and maximizer search")]
struct Cli {
    /// Directory receiving JSON/CSV artifacts.
    #[arg(long, env = "CONVMAX_OUT_DIR", default_value = "convmax-out", global = true)]
    out_dir: PathBuf,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone)]
pub struct GridArgs {
    /// Spatial dimension (1 or 2).
    #[arg(long, default_value_t = 1)]
    pub dim: usize,
    /// Points per axis (even, at least 8).
    #[arg(long, default_value_t = 4096)]
    pub grid_points: usize,
    /// The box is [-half_width, half_width]^dim.
    #[arg(long, default_value_t = 8.0)]
    pub half_width: f64,
}

#[derive(Args, Debug, Clone)]
pub struct KernelArgs {
    /// Kernel spec, e.g. "gauss:sigma=1" or "power_truncated:q=1.333,radius=1".
    #[arg(long)]
    pub kernel: String,
    /// `center` (cell-center values) or `equimeasurable`.
    #[arg(long, default_value = "center")]
    pub sampling: String,
}

#[derive(Args, Debug, Clone)]
pub struct IterationArgs {
    #[arg(long)]
    pub p: Option<f64>,
    #[arg(long)]
    pub r: Option<f64>,
    #[arg(long, default_value_t = 500)]
    pub max_iter: usize,
    #[arg(long, default_value_t = 1e-9)]
    pub tol: f64,
    /// `default` (centered Gaussian) or an integer seed.
    #[arg(long, default_value = "default")]
    pub seed_profile: String,
    /// Run the p = r = 2 periodic Fourier-symbol diagnostic.
    #[arg(long)]
    pub diagnostic_l2: bool,
    #[arg(long)]
    pub hls_constant: Option<f64>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// L_q, weak and Lorentz norms of a kernel.
    Norms {
        #[command(flatten)]
        kernel: KernelArgs,
        #[command(flatten)]
        grid: GridArgs,
        #[arg(long)]
        q: f64,
        #[arg(long)]
        s: f64,
    },
    /// Decreasing rearrangement as a step table.
    Rearrange {
        #[command(flatten)]
        kernel: KernelArgs,
        #[command(flatten)]
        grid: GridArgs,
        #[arg(long)]
        q: f64,
    },
    /// Small-t / large-t tail diagnostics for membership in L_{q,∞,0}.
    Tails {
        #[command(flatten)]
        kernel: KernelArgs,
        #[command(flatten)]
        grid: GridArgs,
        #[arg(long)]
        q: f64,
        #[arg(long, default_value_t = 0.1)]
        ratio: f64,
        #[arg(long, default_value_t = 64)]
        points_per_decade: usize,
    },
    /// ε-truncation of a kernel with its norm certificate.
    Decompose {
        #[command(flatten)]
        kernel: KernelArgs,
        #[command(flatten)]
        grid: GridArgs,
        #[arg(long)]
        p: f64,
        #[arg(long)]
        r: f64,
        #[arg(long)]
        eps: f64,
        #[arg(long)]
        hls_constant: Option<f64>,
        /// Also write parts.csv with k, u, w, z and core.
        #[arg(long)]
        dump_parts: bool,
    },
    /// Operator-norm estimate and a-priori bounds.
    Opnorm {
        #[command(flatten)]
        kernel: KernelArgs,
        #[command(flatten)]
        grid: GridArgs,
        #[command(flatten)]
        iteration: IterationArgs,
    },
    /// Maximizer search with trajectory and diameter diagnostics.
    Maximize {
        #[command(flatten)]
        kernel: KernelArgs,
        #[command(flatten)]
        grid: GridArgs,
        #[command(flatten)]
        iteration: IterationArgs,
        #[arg(long, value_delimiter = ',', default_value = "0.05,0.1,0.2")]
        deltas: Vec<f64>,
        /// Directions sampled in 2-D.
        #[arg(long, default_value_t = 16)]
        directions: usize,
        /// Write every k-th iterate under snapshots/.
        #[arg(long)]
        snapshot_stride: Option<usize>,
    },
    /// δ-diameters of one sampled function.
    Diameter {
        /// Sample file (`x,value` or `x,y,value`) on the grid given by the grid flags.
        #[arg(long)]
        input: PathBuf,
        #[command(flatten)]
        grid: GridArgs,
        #[arg(long)]
        p: f64,
        #[arg(long, value_delimiter = ',', default_value = "0.05,0.1,0.2")]
        deltas: Vec<f64>,
        #[arg(long, default_value_t = 16)]
        directions: usize,
        /// Rescale to unit L_p norm first.
        #[arg(long)]
        normalize: bool,
    },
    /// Tightness report for a directory of sample files (sorted by name).
    Tightness {
        #[arg(long)]
        sequence_dir: PathBuf,
        #[command(flatten)]
        grid: GridArgs,
        #[arg(long)]
        p: f64,
        #[arg(long, value_delimiter = ',', default_value = "0.05,0.1,0.2")]
        deltas: Vec<f64>,
    },
    /// Cross product of runs described by a JSON config.
    Sweep {
        #[arg(long)]
        config: PathBuf,
    },
}

fn run(cli: Cli) -> Result<String, CliError> {
    let out = &cli.out_dir;
    match cli.command {
        Command::Norms { kernel, grid, q, s } => commands::norms(out, &kernel, &grid, q, s),
        Command::Rearrange { kernel, grid, q } => commands::rearrange(out, &kernel, &grid, q),
        Command::Tails { kernel, grid, q, ratio, points_per_decade } => {
            commands::tails(out, &kernel, &grid, q, ratio, points_per_decade)
        }
        Command::Decompose { kernel, grid, p, r, eps, hls_constant, dump_parts } => {
            commands::decompose(out, &kernel, &grid, p, r, eps, hls_constant, dump_parts)
        }
        Command::Opnorm { kernel, grid, iteration } => commands::opnorm(out, &kernel, &grid, &iteration),
        Command::Maximize { kernel, grid, iteration, deltas, directions, snapshot_stride } => {
            commands::maximize(out, &kernel, &grid, &iteration, &deltas, directions, snapshot_stride)
        }
        Command::Diameter { input, grid, p, deltas, directions, normalize } => {
            commands::diameter(out, &input, &grid, p, &deltas, directions, normalize)
        }
        Command::Tightness { sequence_dir, grid, p, deltas } => {
            commands::tightness(out, &sequence_dir, &grid, p, &deltas)
        }
        Command::Sweep { config } => sweep::run(out, &config),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(doc) => {
            println!("{doc}");
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
