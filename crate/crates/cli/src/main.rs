//! `selberg-lab`: command-line front end for the experiments.

mod commands;
mod config;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use config::parse_count;

#[derive(Parser, Debug)]
#[command(
    name = "selberg-lab",
    version,
    about = "Numerical laboratory for the rate of convergence in Selberg's central limit theorem",
    arg_required_else_help = true
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

/// Settings shared by every subcommand. Flags override `--config`, which
/// overrides the defaults.
#[derive(Args, Debug, Clone, Default)]
pub struct Common {
    /// TOML file, or a previous output whose header is replayed.
    #[arg(long, value_name = "PATH")]
    pub config: Option<PathBuf>,
    /// Height T; τ is uniform on [T, 2T].
    #[arg(long = "T", value_name = "REAL")]
    pub t: Option<f64>,
    #[arg(long = "K", value_name = "REAL")]
    pub k: Option<f64>,
    #[arg(long = "Kprime", value_name = "REAL")]
    pub kprime: Option<f64>,
    /// Shift exponent: |h − h′| = (log T)^(−alpha).
    #[arg(long, value_name = "REAL", allow_negative_numbers = true)]
    pub alpha: Option<f64>,
    #[arg(long, value_name = "REAL", allow_negative_numbers = true)]
    pub h: Option<f64>,
    /// Implied constant in the Dirichlet truncation length.
    #[arg(long = "C", value_name = "REAL")]
    pub c_const: Option<f64>,
    /// Override of the off-axis shift W.
    #[arg(long = "W", value_name = "REAL")]
    pub w: Option<f64>,
    /// Override of the mollifier and prime-sum length X.
    #[arg(long = "X", value_name = "REAL")]
    pub x: Option<f64>,
    /// Override of the short prime-sum length Y.
    #[arg(long = "Y", value_name = "REAL")]
    pub y: Option<f64>,
    /// Truncate the mollifier to n ≤ LM.
    #[arg(long = "LM", value_name = "INT", value_parser = parse_count)]
    pub l_m: Option<u64>,
    #[arg(long, value_name = "INT", value_parser = parse_count)]
    pub seed: Option<u64>,
    /// Number of Monte Carlo samples.
    #[arg(long, value_name = "INT", value_parser = parse_count)]
    pub n: Option<u64>,
    /// Output directory [env: SELBERG_LAB_OUT, default: .].
    #[arg(long, value_name = "DIR")]
    pub out: Option<PathBuf>,
    /// csv or json.
    #[arg(long, value_name = "FORMAT")]
    pub format: Option<String>,
    /// Worker threads, or `auto`.
    #[arg(long, value_name = "N|auto")]
    pub workers: Option<String>,
    /// Read the prime sieve from this file, writing it first if needed.
    #[arg(long, value_name = "PATH")]
    pub sieve_cache: Option<PathBuf>,
}

/// Shape of the test-function family.
#[derive(Args, Debug, Clone, Default)]
pub struct FamilyArgs {
    #[arg(long, value_name = "INT", value_parser = parse_count)]
    pub directions: Option<u64>,
    #[arg(long, value_name = "INT", value_parser = parse_count)]
    pub offsets: Option<u64>,
    /// Hinge centres per side of the grid.
    #[arg(long, value_name = "INT", value_parser = parse_count)]
    pub hinges: Option<u64>,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Print the derived parameter table.
    Params(Common),
    /// Cross-check the zeta backends on random heights.
    ZetaSelftest {
        #[command(flatten)]
        common: Common,
        /// Random heights per check.
        #[arg(long, value_name = "INT", value_parser = parse_count)]
        points: Option<u64>,
        /// Height of the truncated-sum check.
        #[arg(long = "trunc-T", value_name = "REAL")]
        trunc_t: Option<f64>,
    },
    /// One row per sampled τ with every variable of the chain.
    Sample(Common),
    /// Empirical, exact and Gaussian moments of the short prime sum.
    Moments {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_name = "INT", value_parser = parse_count)]
        k_max: Option<u64>,
    },
    /// Dudley estimate between two sample files or a sample file and a Gaussian.
    Distance {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        family: FamilyArgs,
        #[arg(long, value_name = "CSV")]
        a: Option<String>,
        #[arg(long, value_name = "CSV")]
        b: Option<String>,
        /// `C`, `Ctilde`, or `c11,c12,c22`.
        #[arg(long, value_name = "SPEC")]
        gaussian: Option<String>,
        /// Two column names of A (default: its first two columns).
        #[arg(long, value_name = "X,Y")]
        cols_a: Option<String>,
        #[arg(long, value_name = "X,Y")]
        cols_b: Option<String>,
    },
    /// Tail fractions of the two prime sums.
    Tail {
        #[command(flatten)]
        common: Common,
        /// Extra threshold applied to both sums.
        #[arg(long, value_name = "REAL")]
        threshold: Option<f64>,
    },
    /// The seven link distances and the total at one height.
    Ladder {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        family: FamilyArgs,
    },
    /// Total distance against the rate over a list of heights.
    RateCurve {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        family: FamilyArgs,
        /// Ascending heights, comma separated.
        #[arg(long = "Ts", value_name = "T1,T2,...")]
        ts: Option<String>,
    },
    /// Pass/fail for each lemma behind the chain.
    CheckLemmas(Common),
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            let _ = e.print();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => ExitCode::SUCCESS,
                _ => ExitCode::from(1),
            };
        }
    };
    match commands::run(cli.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(commands::exit_code(&e))
        }
    }
}
