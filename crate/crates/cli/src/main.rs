mod commands;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use kwise_entropy::ball_spectra::DEFAULT_SOLVER;

/// Exit status for a failed verification.
const EXIT_FAIL: u8 = 1;
/// Exit status for usage, parse and validation errors.
const EXIT_USAGE: u8 = 2;

#[derive(Parser, Debug)]
#[command(
    name = "kwise-entropy",
    version,
    about = "Entropy bounds for k-wise independent distributions on {0,1}^n"
)]
struct Cli {
    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,

    /// Ball eigenvalue solver (power, bisection, dense).
    #[arg(long, global = true, default_value = DEFAULT_SOLVER)]
    solver: String,

    /// Eigenvalue convergence tolerance.
    #[arg(long, global = true)]
    tol: Option<f64>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Csv,
    Json,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Reading {
    Floor,
    Ceil,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Build a named sample space and write it in the text format.
    Construct(ConstructArgs),
    /// Independence order, entropies and all applicable bounds of a space.
    Analyze(AnalyzeArgs),
    /// Every entropy bound for (k-1)-wise independence on n bits.
    Bound(BoundArgs),
    /// Top eigenvalue of the Hamming graph restricted to a radius-r ball.
    Spectra(SpectraArgs),
    /// Check every inequality of a lower-bound argument on a concrete space.
    Chain(ChainArgs),
    /// Batch CSV over parameter ranges.
    Sweep(SweepArgs),
}

#[derive(Args, Debug)]
pub struct ConstructArgs {
    /// hamming, simplex (alias hadamard), uniform, point, from-matrix.
    pub name: String,
    #[arg(long)]
    pub m: Option<u32>,
    #[arg(long)]
    pub n: Option<u32>,
    /// Matrix file for from-matrix.
    #[arg(long)]
    pub input: Option<PathBuf>,
    /// Write the space here instead of stdout.
    #[arg(long, short)]
    pub output: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct AnalyzeArgs {
    pub input: PathBuf,
    /// Zero-coefficient tolerance for the independence test.
    #[arg(long, default_value_t = kwise_entropy::kwise::DEFAULT_TOL)]
    pub kwise_tol: f64,
    /// Half-independence reading for odd n.
    #[arg(long, value_enum, default_value_t = Reading::Floor)]
    pub reading: Reading,
}

#[derive(Args, Debug)]
pub struct BoundArgs {
    #[arg(long)]
    pub n: u32,
    /// The input is (k-1)-wise independent.
    #[arg(long)]
    pub k: u32,
}

#[derive(Args, Debug)]
pub struct SpectraArgs {
    #[arg(long)]
    pub n: u32,
    #[arg(long)]
    pub r: u32,
    /// Also print the weight profile of the Perron eigenfunction.
    #[arg(long)]
    pub profile: bool,
}

#[derive(Args, Debug)]
pub struct ChainArgs {
    pub input: PathBuf,
    /// Run the smoothed chain for (k-1)-wise independence.
    #[arg(long, conflicts_with = "theorem")]
    pub k: Option<u32>,
    /// `2` selects the half-independence chain.
    #[arg(long)]
    pub theorem: Option<u32>,
    #[arg(long, value_enum, default_value_t = Reading::Floor)]
    pub reading: Reading,
}

#[derive(Args, Debug)]
pub struct SweepArgs {
    #[command(subcommand)]
    pub kind: SweepKind,
}

#[derive(Subcommand, Debug)]
pub enum SweepKind {
    /// lambda_r and 2 sqrt(r(n-r)) over n and r ranges.
    Spectra {
        /// Single value or inclusive range `a..b`.
        #[arg(long)]
        n: String,
        #[arg(long)]
        r: String,
    },
    /// The bound landscape over n and k ranges.
    Bounds {
        #[arg(long)]
        n: String,
        #[arg(long)]
        k: String,
    },
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_USAGE } else { 0 });
        }
    };
    match commands::run(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(EXIT_FAIL),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(commands::exit_code(&e))
        }
    }
}
