use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use entropy_outlier::bench::{Algorithm, BenchAxis};
use serde::{Deserialize, Serialize};

#[derive(Debug, Parser)]
#[command(
    name = "entropy-outlier",
    version,
    about = "Greedy entropy-based outlier mining for categorical data",
    args_conflicts_with_subcommands = true
)]
pub struct Cli {
    /// Replay the run recorded in a manifest file instead of reading flags
    #[arg(long, value_name = "FILE")]
    pub manifest: Option<PathBuf>,

    #[command(subcommand)]
    pub command: Option<Command>,
}

#[derive(Debug, Clone, Subcommand, Serialize, Deserialize)]
#[serde(tag = "command", content = "parameters", rename_all = "lowercase")]
pub enum Command {
    /// Find the k records whose removal lowers the expected entropy the most
    Detect(DetectArgs),
    /// Detect at the largest k of a ladder and report rare-class coverage
    Evaluate(EvaluateArgs),
    /// Write a seeded synthetic categorical dataset
    Generate(GenerateArgs),
    /// Time detection on synthetic data across a grid of sizes
    Bench(BenchArgs),
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Detect(_) => "detect",
            Command::Evaluate(_) => "evaluate",
            Command::Generate(_) => "generate",
            Command::Bench(_) => "bench",
        }
    }

    pub fn input(&self) -> Option<&InputArgs> {
        match self {
            Command::Detect(a) => Some(&a.input),
            Command::Evaluate(a) => Some(&a.input),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct InputArgs {
    /// Delimited data file, one record per line
    #[arg(long, value_name = "FILE")]
    pub input: PathBuf,

    /// Field delimiter
    #[arg(long, default_value = ",")]
    pub delimiter: char,

    /// Class label column (zero-based index or header name); excluded from entropy
    #[arg(long = "label-col", value_name = "COL")]
    pub label_col: Option<String>,

    /// Record id column (zero-based index or header name); excluded from entropy
    #[arg(long = "id-col", value_name = "COL")]
    pub id_col: Option<String>,

    /// First line is a header
    #[arg(long, default_value_t = false)]
    pub header: bool,

    /// Missing-value marker, kept as an ordinary category value
    #[arg(long, default_value = "?")]
    pub missing_token: String,

    /// Drop records holding the missing-value marker before detection
    #[arg(long, default_value_t = false)]
    pub drop_missing: bool,

    /// Keep only COUNT randomly chosen records of class LABEL (applied after --drop-missing)
    #[arg(long, value_name = "LABEL:COUNT")]
    pub downsample: Option<String>,

    /// Seed for --downsample
    #[arg(long, default_value_t = 5)]
    pub downsample_seed: u64,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct DetectArgs {
    #[command(flatten)]
    pub input: InputArgs,

    /// Number of outliers to select
    #[arg(long)]
    pub k: usize,

    /// Result file
    #[arg(long, default_value = "outliers.csv")]
    pub output: PathBuf,

    /// Scoring threads (0 = all cores)
    #[arg(long, default_value_t = 0)]
    pub threads: usize,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct EvaluateArgs {
    #[command(flatten)]
    pub input: InputArgs,

    /// Comma-separated class labels treated as rare
    #[arg(long, value_delimiter = ',', required = true)]
    pub rare: Vec<String>,

    /// Comma-separated k values to report
    #[arg(long = "k-ladder", value_delimiter = ',', required = true)]
    pub k_ladder: Vec<usize>,

    /// Report file
    #[arg(long, default_value = "evaluation.csv")]
    pub output: PathBuf,

    /// Scoring threads (0 = all cores)
    #[arg(long, default_value_t = 0)]
    pub threads: usize,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct GenerateArgs {
    /// Number of records
    #[arg(long)]
    pub rows: usize,

    /// Number of categorical attributes
    #[arg(long)]
    pub attrs: usize,

    /// Number of classes (prototypes)
    #[arg(long)]
    pub classes: usize,

    /// Distinct values per attribute
    #[arg(long, default_value_t = 10)]
    pub values: usize,

    /// Probability that a cell is replaced by a random value
    #[arg(long, default_value_t = 0.1)]
    pub noise: f64,

    /// Generator seed
    #[arg(long, default_value_t = 5)]
    pub seed: u64,

    /// Output data file (label in the last column)
    #[arg(long, default_value = "synthetic.data")]
    pub output: PathBuf,

    /// Field delimiter
    #[arg(long, default_value = ",")]
    pub delimiter: char,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct BenchArgs {
    /// Parameter to vary: records or outliers
    #[arg(long, default_value = "records", value_parser = parse_axis)]
    pub vary: BenchAxis,

    /// Comma-separated ascending values of the varied parameter
    #[arg(long, value_delimiter = ',', required = true)]
    pub grid: Vec<usize>,

    /// Outliers per run when varying records
    #[arg(long, default_value_t = 30)]
    pub k: usize,

    /// Records per table when varying outliers
    #[arg(long, default_value_t = 100_000)]
    pub rows: usize,

    /// Number of categorical attributes
    #[arg(long, default_value_t = 10)]
    pub attrs: usize,

    /// Number of classes in the synthetic data
    #[arg(long, default_value_t = 10)]
    pub classes: usize,

    /// Distinct values per attribute
    #[arg(long, default_value_t = 10)]
    pub values: usize,

    /// Cell noise probability
    #[arg(long, default_value_t = 0.1)]
    pub noise: f64,

    /// Generator seed
    #[arg(long, default_value_t = 5)]
    pub seed: u64,

    /// Comma-separated algorithms: incremental, naive
    #[arg(long, value_delimiter = ',', default_value = "incremental", value_parser = parse_algorithm)]
    pub algorithms: Vec<Algorithm>,

    /// Timed runs per point (median reported)
    #[arg(long, default_value_t = 1)]
    pub repeat: usize,

    /// Scoring threads for the incremental algorithm (0 = all cores)
    #[arg(long, default_value_t = 1)]
    pub threads: usize,

    /// Stop after this many seconds of detection time, keeping finished points
    #[arg(long, value_name = "SECONDS")]
    pub budget_secs: Option<f64>,

    /// Report file
    #[arg(long, default_value = "bench.csv")]
    pub output: PathBuf,

    /// Optional SVG plot of the report
    #[arg(long, value_name = "FILE")]
    pub plot: Option<PathBuf>,
}

fn parse_axis(s: &str) -> Result<BenchAxis, String> {
    s.parse().map_err(|e: entropy_outlier::Error| e.to_string())
}

fn parse_algorithm(s: &str) -> Result<Algorithm, String> {
    s.parse().map_err(|e: entropy_outlier::Error| e.to_string())
}
