//! `grouplab` command-line entry point.

mod commands;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use grouplab::Error;

pub const EXIT_FAILURE: u8 = 1;
pub const EXIT_BUDGET: u8 = 2;
pub const EXIT_CONFIG: u8 = 3;
pub const EXIT_ACCEPTANCE: u8 = 4;

#[derive(Debug, Parser)]
#[command(name = "grouplab", version, about = "Random-walk and growth experiments on free groups and free products")]
pub struct Cli {
    #[command(flatten)]
    pub common: Common,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
    Svg,
}

#[derive(Debug, Args)]
pub struct Common {
    /// Group model: a JSON file, or inline JSON starting with `{`.
    #[arg(long, global = true)]
    pub group: Option<String>,
    /// Probability measure (file or inline JSON); defaults to the simple random walk.
    #[arg(long, global = true)]
    pub measure: Option<String>,
    /// Subgroup (file or inline JSON).
    #[arg(long, global = true)]
    pub subgroup: Option<String>,
    #[arg(long, global = true, default_value_t = 1)]
    pub seed: u64,
    /// Output directory.
    #[arg(long, global = true, env = "GROUPLAB_OUT", default_value = ".")]
    pub out: PathBuf,
    /// Artifact formats, comma separated.
    #[arg(long, global = true, value_enum, value_delimiter = ',', default_value = "json")]
    pub format: Vec<Format>,
    /// Support cap for enumerations and convolutions.
    #[arg(long, global = true, default_value_t = grouplab::measure::DEFAULT_CAP)]
    pub cap: usize,
    /// Largest length or convolution power.
    #[arg(long, global = true)]
    pub nmax: Option<usize>,
    #[arg(long, global = true, default_value_t = 2000)]
    pub horizon: usize,
    #[arg(long, global = true, default_value_t = 2000)]
    pub replicas: usize,
    /// Fast variant (suite: the quick criteria only).
    #[arg(long, global = true)]
    pub quick: bool,
    /// Record wall time in reports (makes artifacts run-dependent).
    #[arg(long, global = true)]
    pub timing: bool,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Growth series, exponential growth rate and sphere counts.
    Growth,
    /// Elements of the ball of radius nmax with their lengths.
    Enumerate,
    /// Monte Carlo drift, with exact tree values when available.
    Walk {
        /// Steps between recorded rows.
        #[arg(long, default_value_t = 500)]
        stride: usize,
    },
    /// Entropy of convolution powers.
    Entropy,
    /// Entropy, drift, growth and the ratio h / (l v).
    Ratio,
    /// Subgroup census by coset automaton, optionally with quasi-convex counts.
    Census {
        /// Coset window for integer kernels (default: nmax times the largest step).
        #[arg(long)]
        window: Option<usize>,
        /// Quasi-convexity proportion.
        #[arg(long, requires = "qc_m")]
        qc_eps: Option<f64>,
        /// Quasi-convexity distance.
        #[arg(long, requires = "qc_eps")]
        qc_m: Option<usize>,
    },
    /// Near-degenerate measures: splits, scans, decay rates.
    Degenerate {
        #[arg(long, value_enum, default_value = "split")]
        mode: DegenerateMode,
        /// Family for `scan` and `limit`.
        #[arg(long, value_enum, default_value = "free-axis")]
        family: FamilyArg,
        /// Values of epsilon, comma separated.
        #[arg(long, value_delimiter = ',', default_value = "0.4,0.1,0.025")]
        eps: Vec<f64>,
    },
    /// Acceptance battery with a pass/fail summary.
    Suite {
        /// Run only these criteria, comma separated.
        #[arg(long, value_delimiter = ',')]
        only: Vec<u8>,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum DegenerateMode {
    /// Heavy/light split of the measure and statistics of the block measure.
    Split,
    /// h / l along a degenerating family.
    Scan,
    /// Ratio at the first epsilon against the limiting measure.
    Limit,
    /// Total variation distance to uniform on a finite group.
    Mixing,
    /// sqrt(n) sup of convolution powers on Z or the infinite dihedral group.
    Supnorm,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FamilyArg {
    FreeAxis,
    FreeProductSigma,
    DirectProduct,
}

/// A failure with its process exit code.
#[derive(Debug)]
pub struct Failure {
    pub code: u8,
    pub message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = if e.is_budget() {
            EXIT_BUDGET
        } else {
            match e {
                Error::Config(_)
                | Error::InvalidSpec(_)
                | Error::InvalidMeasure(_)
                | Error::GroupMismatch(_)
                | Error::Json(_)
                | Error::MissingColumn(_)
                | Error::Unsupported(_)
                | Error::Degenerate(_)
                | Error::NotMember => EXIT_CONFIG,
                _ => EXIT_FAILURE,
            }
        };
        Failure { code, message: e.to_string() }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match commands::run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("grouplab: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
