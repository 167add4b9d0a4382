use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(name = "qudisc", version, about = "Programmable discrimination of unknown qudit states")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Jordan blocks (k, O_k, d^k) and the ranks d1, d2.
    Spectrum(ConfigArgs),
    /// Optimal unambiguous discrimination: per-block branches and Q_opt.
    Unambiguous(ConfigArgs),
    /// Minimum-error discrimination: eigenvalues of Λ and P_ME.
    Minerror(ConfigArgs),
    /// Large-dimension limits Q0 (needs n_A = n_C) and P0.
    Bounds(BoundsArgs),
    /// Check every closed form against the dense-matrix oracle.
    Verify(VerifyArgs),
    /// Q_opt, P_ME, Q0, P0 over a range of dimensions or copy counts.
    Sweep(SweepArgs),
}

#[derive(Debug, Args)]
pub struct OutputArgs {
    /// Emit JSON instead of a text table.
    #[arg(long)]
    pub json: bool,
    /// Write to PATH instead of standard output.
    #[arg(long, value_name = "PATH")]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct CopyArgs {
    /// Copies of the first program state (register A).
    #[arg(long, value_parser = clap::value_parser!(u32).range(1..))]
    pub na: u32,
    /// Copies of the data state (register B).
    #[arg(long, value_parser = clap::value_parser!(u32).range(1..))]
    pub nb: u32,
    /// Copies of the second program state (register C).
    #[arg(long, value_parser = clap::value_parser!(u32).range(1..))]
    pub nc: u32,
}

#[derive(Debug, Args)]
pub struct ConfigArgs {
    /// Qudit dimension n.
    #[arg(short = 'n', long = "dim", value_parser = clap::value_parser!(u32).range(2..))]
    pub dim: u32,
    #[command(flatten)]
    pub copies: CopyArgs,
    /// Prior of the first state; the second gets 1 - eta1.
    #[arg(long, default_value_t = 0.5)]
    pub eta1: f64,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args)]
pub struct BoundsArgs {
    #[command(flatten)]
    pub copies: CopyArgs,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    /// Largest tensor-space dimension n^N in the oracle grid.
    #[arg(long, default_value_t = 1024)]
    pub max_total_dim: usize,
    /// Largest n^N at which the dense full-space routes also run.
    #[arg(long, default_value_t = 64)]
    pub dense_limit: usize,
    /// Haar samples per Monte Carlo run.
    #[arg(long, default_value_t = 100_000, value_parser = clap::value_parser!(u64).range(1..))]
    pub samples: u64,
    /// Base seed of the Monte Carlo streams.
    #[arg(long, default_value_t = 2024)]
    pub seed: u64,
    /// Use the non-optimal high-branch failure parameters (negative control).
    #[arg(long, hide = true)]
    pub inject_fault: bool,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    /// Inclusive range of dimensions, `A..B`.
    #[arg(long, value_name = "A..B", conflicts_with = "dim")]
    pub dims: Option<IntRange>,
    /// A single dimension.
    #[arg(short = 'n', long = "dim", value_parser = clap::value_parser!(u32).range(2..))]
    pub dim: Option<u32>,
    #[arg(long, value_parser = clap::value_parser!(u32).range(1..), required_unless_present = "equal_copies")]
    pub na: Option<u32>,
    #[arg(long, value_parser = clap::value_parser!(u32).range(1..), required_unless_present = "equal_copies")]
    pub nb: Option<u32>,
    #[arg(long, value_parser = clap::value_parser!(u32).range(1..), required_unless_present = "equal_copies")]
    pub nc: Option<u32>,
    /// Sweep n_A = n_B = n_C over an inclusive range `A..B` at one dimension.
    #[arg(long, value_name = "A..B", conflicts_with_all = ["na", "nb", "nc", "dims"])]
    pub equal_copies: Option<IntRange>,
    #[arg(long, default_value_t = 0.5)]
    pub eta1: f64,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
    /// Write to PATH instead of standard output.
    #[arg(long, value_name = "PATH")]
    pub out: Option<PathBuf>,
}

/// Inclusive integer range written `A..B`, `A..=B` or `A`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct IntRange {
    pub start: u32,
    pub end: u32,
}

impl IntRange {
    pub fn iter(&self) -> impl Iterator<Item = u32> {
        self.start..=self.end
    }
}

impl FromStr for IntRange {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let parse = |t: &str| t.trim().parse::<u32>().map_err(|e| format!("bad bound {t:?}: {e}"));
        let (start, end) = match s.split_once("..") {
            Some((a, b)) => (parse(a)?, parse(b.strip_prefix('=').unwrap_or(b))?),
            None => {
                let v = parse(s)?;
                (v, v)
            }
        };
        if start > end {
            return Err(format!("empty range {s:?}"));
        }
        Ok(IntRange { start, end })
    }
}

impl fmt::Display for IntRange {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}..{}", self.start, self.end)
    }
}
