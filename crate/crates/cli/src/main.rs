//! `remixgraph` command-line interface.
//!
//! Exit codes: 0 success, 1 I/O failure, 2 data errors under `--strict`,
//! 3 nothing to analyse, 64 usage errors.

mod commands;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use remixgraph::Orientation;

pub const THREADS_ENV: &str = "REMIXGRAPH_THREADS";

#[derive(Debug, Parser)]
#[command(name = "remixgraph", version, about = "Remix lineage network analysis")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Parse a dataset, print the ingest report and optionally write a canonical JSONL snapshot.
    Ingest {
        #[command(flatten)]
        input: InputArgs,
        /// Snapshot path ("-" for stdout; the report then goes to stderr).
        #[arg(short, long)]
        output: Option<String>,
        /// Fail with exit code 2 if any record or edge was rejected.
        #[arg(long)]
        strict: bool,
    },
    /// Print whole-graph counts.
    Stats {
        #[command(flatten)]
        input: InputArgs,
        /// Emit JSON instead of aligned text.
        #[arg(long)]
        json: bool,
    },
    /// Score every multi-parent design (CSV: id,betweenness,independence,quadrant).
    Score {
        #[command(flatten)]
        input: InputArgs,
        #[arg(long, value_enum, default_value_t = OrientationArg::Undirected)]
        orientation: OrientationArg,
        #[arg(short, long, default_value = "-")]
        output: String,
    },
    /// Score and label quadrants (medians unless thresholds are given).
    Quadrants {
        #[command(flatten)]
        source: ScoreSource,
        #[command(flatten)]
        thresholds: ThresholdArgs,
        #[arg(short, long, default_value = "-")]
        output: String,
    },
    /// Rank design pairs as combination candidates.
    Recommend {
        #[command(flatten)]
        input: InputArgs,
        /// Number of pairs to return.
        #[arg(short, long, default_value_t = 10, value_parser = clap::value_parser!(u64).range(1..))]
        k: u64,
        #[arg(long, value_enum, default_value_t = StrategyArg::Exhaustive)]
        strategy: StrategyArg,
        /// Pairs to score with --strategy sampled.
        #[arg(long, required_if_eq("strategy", "sampled"))]
        samples: Option<usize>,
        #[arg(long, required_if_eq("strategy", "sampled"))]
        seed: Option<u64>,
        /// Hop distance at which separation saturates (default: diameter of the largest component).
        #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
        cap: Option<u64>,
        #[arg(short, long, default_value = "-")]
        output: String,
    },
    /// Write the lineage graph as Graphviz DOT (edges child -> parent).
    ExportDot {
        #[command(flatten)]
        input: InputArgs,
        #[arg(short, long, default_value = "-")]
        output: String,
    },
    /// Draw the score scatter plot as SVG.
    Plot {
        #[command(flatten)]
        source: ScoreSource,
        #[command(flatten)]
        thresholds: ThresholdArgs,
        #[arg(short, long, default_value = "-")]
        output: String,
    },
    /// Generate a seeded synthetic dataset as canonical JSONL.
    Synth {
        #[arg(long, default_value_t = 1000)]
        n: usize,
        #[arg(long, default_value_t = 0.0143)]
        p_multi: f64,
        #[arg(long, default_value_t = 200)]
        tag_pool: usize,
        #[arg(long, default_value_t = 5)]
        tags_per_design: usize,
        #[arg(long, default_value_t = 0.5)]
        p_inherit: f64,
        #[arg(long)]
        seed: u64,
        #[arg(short, long, default_value = "-")]
        output: String,
    },
}

#[derive(Debug, Args)]
pub struct InputArgs {
    /// Dataset path(s): one JSONL file, or nodes and edges CSV files. "-" reads stdin.
    #[arg(value_name = "INPUT")]
    pub inputs: Vec<String>,
    #[arg(long, value_enum, default_value_t = Format::Jsonl)]
    pub format: Format,
}

#[derive(Debug, Args)]
pub struct ScoreSource {
    #[command(flatten)]
    pub input: InputArgs,
    /// Read a score table CSV instead of a dataset.
    #[arg(long, conflicts_with = "inputs")]
    pub scores: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = OrientationArg::Undirected)]
    pub orientation: OrientationArg,
}

#[derive(Debug, Args)]
pub struct ThresholdArgs {
    #[arg(long, requires = "independence_threshold")]
    pub betweenness_threshold: Option<f64>,
    #[arg(long, requires = "betweenness_threshold")]
    pub independence_threshold: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Jsonl,
    Csv,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OrientationArg {
    Undirected,
    Directed,
}

impl From<OrientationArg> for Orientation {
    fn from(o: OrientationArg) -> Self {
        match o {
            OrientationArg::Undirected => Orientation::Undirected,
            OrientationArg::Directed => Orientation::Directed,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum StrategyArg {
    Exhaustive,
    Sampled,
}

/// A failed run, carrying its exit code.
#[derive(Debug)]
pub enum Failure {
    Io(String),
    Data(String),
    Empty(String),
    Usage(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Io(_) => 1,
            Failure::Data(_) => 2,
            Failure::Empty(_) => 3,
            Failure::Usage(_) => 64,
        }
    }

    fn message(&self) -> &str {
        match self {
            Failure::Io(m) | Failure::Data(m) | Failure::Empty(m) | Failure::Usage(m) => m,
        }
    }
}

fn configure_threads() -> Result<(), Failure> {
    let Ok(raw) = std::env::var(THREADS_ENV) else {
        return Ok(());
    };
    let threads: usize = raw
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| Failure::Usage(format!("{THREADS_ENV} must be a positive integer, got `{raw}`")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build_global()
        .map_err(|e| Failure::Usage(e.to_string()))
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(64) } else { ExitCode::SUCCESS };
        }
    };
    match configure_threads().and_then(|()| commands::run(cli.command)) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            let _ = std::io::stdout().flush();
            eprintln!("remixgraph: {}", f.message());
            ExitCode::from(f.code())
        }
    }
}
