use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

#[derive(Debug, Parser)]
#[command(
    name = "ndr",
    version,
    about = "Simulate noisy deterministic reasoning machines and check results about them",
    long_about = "Simulate noisy deterministic reasoning machines, estimate their claims and \
                  answer distributions, check the abduction and proof-path results, run \
                  probabilistic Turing machines and build measures over world instances.\n\n\
                  Exit status: 0 on success, 1 when a checked invariant is violated, 2 on errors."
)]
pub struct Cli {
    #[command(flatten)]
    pub global: Global,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct Global {
    /// Experiment config (TOML).
    #[arg(long, global = true, value_name = "PATH")]
    pub config: Option<PathBuf>,
    /// Master seed; overrides the config's `seed`.
    #[arg(long, global = true, value_name = "U64")]
    pub seed: Option<u64>,
    /// Output directory.
    #[arg(long, global = true, value_name = "DIR", default_value = "ndr-out")]
    pub out: PathBuf,
    /// Format of tabular outputs (default: the config's `format`, else csv).
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    /// Worker threads for replica simulation (default: one per core).
    #[arg(long, global = true, env = "NDR_THREADS", value_name = "N")]
    pub threads: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Text,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run replicas of a machine and write traces, final claims lists and a summary.
    #[command(after_help = "Example:\n  ndr --config fixtures/configs/a-zero-noise.toml --out out/a simulate")]
    Simulate(RunArgs),
    /// Estimate prefix, claims and answer distributions (optionally with exact values).
    #[command(after_help = "Example:\n  ndr --config fixtures/configs/exact-two-question.toml --out out/e estimate")]
    Estimate(RunArgs),
    /// Run the abduction and proof-path suites and any joint-file checks.
    #[command(after_help = "Example:\n  ndr --config fixtures/configs/check-default.toml --out out/c check")]
    Check(CheckArgs),
    /// Build the transition graph of claims lists from simulation traces.
    #[command(
        after_help = "Example:\n  ndr --config fixtures/configs/graph-two-branch.toml --out out/g simulate\n  ndr --out out/g graph out/g/trace.ndjson"
    )]
    Graph(GraphArgs),
    /// Run a Turing machine, enumerate its halting set or its coin-flipping distribution.
    #[command(after_help = "Example:\n  ndr --out out/p ptm --machine fixtures/machines/halt-0-10-11.toml coinflip --max-len 4")]
    Ptm(PtmArgs),
    /// Build a measure over world instances (and optionally a world).
    #[command(after_help = "Example:\n  ndr --config fixtures/configs/mmh-coinflip.toml --out out/m mmh")]
    Mmh(MmhArgs),
}

#[derive(Debug, Args)]
pub struct RunArgs {
    /// Iterations per replica; overrides the config's `horizon`.
    #[arg(long, value_name = "K")]
    pub horizon: Option<u64>,
    /// Number of replicas; overrides the config's `replicas`.
    #[arg(long, value_name = "N")]
    pub replicas: Option<u64>,
}

#[derive(Debug, Args)]
pub struct CheckArgs {
    /// Randomized joints in the abduction suite; overrides the config.
    #[arg(long, value_name = "N")]
    pub abduction_joints: Option<u64>,
    /// Randomized joints in the proof-path suite; overrides the config.
    #[arg(long, value_name = "N")]
    pub proofpath_joints: Option<u64>,
}

#[derive(Debug, Args)]
pub struct GraphArgs {
    /// NDJSON trace files from `simulate` (default: OUT/trace.ndjson).
    pub traces: Vec<PathBuf>,
}

#[derive(Debug, Args)]
pub struct PtmArgs {
    /// Machine file (TOML).
    #[arg(long, value_name = "PATH", conflicts_with = "builtin", required_unless_present = "builtin")]
    pub machine: Option<PathBuf>,
    /// A built-in machine: identity, loop, bit-flipper, halt-0-10-11, coin-writer, writer, toy-universal.
    #[arg(long, value_name = "NAME")]
    pub builtin: Option<String>,
    #[command(subcommand)]
    pub action: PtmAction,
}

#[derive(Debug, Subcommand)]
pub enum PtmAction {
    /// Run on one input.
    Run {
        #[arg(long, default_value = "")]
        input: String,
        #[arg(long, default_value_t = 10_000)]
        budget: u64,
    },
    /// Inputs up to a length on which the machine halts within the budget.
    HaltingSet {
        #[arg(long, default_value_t = 8)]
        max_len: usize,
        #[arg(long, default_value_t = 10_000)]
        budget: u64,
    },
    /// Weights 2^-|σ| / Ω over the halting set.
    Coinflip {
        #[arg(long, default_value_t = 8)]
        max_len: usize,
        #[arg(long, default_value_t = 10_000)]
        budget: u64,
    },
    /// Whether the halting set is prefix-free.
    PrefixFree {
        #[arg(long, default_value_t = 8)]
        max_len: usize,
        #[arg(long, default_value_t = 10_000)]
        budget: u64,
    },
    /// Write the machine as a machine file.
    Export,
}

#[derive(Debug, Args)]
pub struct MmhArgs {
    /// Measure generator file; overrides the config's `[mmh.generator]`.
    #[arg(long, value_name = "PATH")]
    pub generator: Option<PathBuf>,
}
