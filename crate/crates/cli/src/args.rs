use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

pub const DEFAULT_RATIOS: [f64; 9] = [0.01, 0.05, 0.10, 0.20, 0.30, 0.40, 0.50, 0.60, 1.00];
pub const DEFAULT_SCALES: [usize; 7] = [1000, 5000, 10000, 15000, 20000, 25000, 30000];

#[derive(Debug, Parser)]
#[command(
    name = "ssleak",
    version,
    about = "Simulate substring-searchable encryption leakage and run the matrix attack"
)]
pub struct Cli {
    /// Output root; artifacts go to prepared/, runs/<seed>/ and sweeps/<mode>/.
    #[arg(long, global = true, default_value = "out")]
    pub out: PathBuf,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Extract, filter and deduplicate strings; optionally draw a sample.
    Prepare(PrepareArgs),
    /// Key and encrypt the corpus, build the index and export its leakage.
    Simulate(SimulateArgs),
    /// Run the attack for one knowledge ratio and score it.
    #[command(alias = "run")]
    Attack(AttackArgs),
    /// Knowledge or dataset-size sweep with averaged reports.
    Sweep(SweepArgs),
}

/// Where the strings come from: an explicit corpus, or the output of
/// `prepare`.
#[derive(Debug, Args, Clone)]
pub struct CorpusArgs {
    /// Line-delimited text file or directory; defaults to the prepared corpus.
    #[arg(long)]
    pub corpus: Option<PathBuf>,
    /// Stop-word list, one word per line; defaults to the built-in English list.
    #[arg(long)]
    pub stopwords: Option<PathBuf>,
    /// Keep a uniform sample of this many strings.
    #[arg(long)]
    pub sample: Option<usize>,
    /// Seed for `--sample`.
    #[arg(long, default_value_t = 1)]
    pub sample_seed: u64,
}

#[derive(Debug, Args)]
pub struct PrepareArgs {
    #[arg(long)]
    pub corpus: PathBuf,
    #[arg(long)]
    pub stopwords: Option<PathBuf>,
    #[arg(long)]
    pub sample: Option<usize>,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    #[command(flatten)]
    pub input: CorpusArgs,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    /// Also write `B` here (it is always written to the run directory).
    #[arg(long)]
    pub export_b: Option<PathBuf>,
    /// Write an indented dump of the suffix tree.
    #[arg(long)]
    pub export_tree: Option<PathBuf>,
    /// Emit the prefix-node and leaf leakage matrices for self-queries.
    #[arg(long)]
    pub leakage: bool,
}

#[derive(Debug, Args, Clone, Copy)]
pub struct AttackOptions {
    #[arg(long, default_value_t = 100)]
    pub max_rounds: usize,
    /// Only zero matched columns before recomputing residual sums.
    #[arg(long)]
    pub no_row_zeroing: bool,
}

impl AttackOptions {
    pub fn config(&self) -> ssleak_core::AttackConfig {
        ssleak_core::AttackConfig {
            max_rounds: self.max_rounds,
            zero_matched_rows_in_step5: !self.no_row_zeroing,
        }
    }
}

#[derive(Debug, Args)]
pub struct AttackArgs {
    #[command(flatten)]
    pub input: CorpusArgs,
    /// Fraction of strings the attacker knows, in (0, 1].
    #[arg(long)]
    pub knowledge: f64,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    #[command(flatten)]
    pub attack: AttackOptions,
    /// Attack this incidence matrix instead of the simulated one. It must
    /// describe the deployment simulated under `--seed`.
    #[arg(long)]
    pub import_b: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Mode {
    Knowledge,
    Scale,
}

impl Mode {
    pub fn name(self) -> &'static str {
        match self {
            Mode::Knowledge => "knowledge",
            Mode::Scale => "scale",
        }
    }
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    #[command(flatten)]
    pub input: CorpusArgs,
    #[arg(long, value_enum)]
    pub mode: Mode,
    /// Knowledge ratios as fractions; defaults to 0.01 .. 1.0 in nine steps.
    #[arg(long, value_delimiter = ',')]
    pub ratios: Vec<f64>,
    /// Dataset sizes; defaults to 1000, 5000, 10000, ..., 30000.
    #[arg(long, value_delimiter = ',')]
    pub scales: Vec<usize>,
    #[arg(long, default_value_t = 500)]
    pub known_count: usize,
    #[arg(long, value_delimiter = ',', default_values_t = [1u64, 2, 3, 4, 5])]
    pub seeds: Vec<u64>,
    #[command(flatten)]
    pub attack: AttackOptions,
}
