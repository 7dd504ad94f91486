//! Command-line syntax.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use embeval_core::metrics::{Denominator, OovPolicy};

#[derive(Debug, Parser)]
#[command(
    name = "embeval",
    version,
    about = "Evaluate word-embedding models against a SKOS thesaurus"
)]
pub struct Cli {
    /// Raise log verbosity (-v info, -vv debug).
    #[arg(short, long, global = true, action = clap::ArgAction::Count)]
    pub verbose: u8,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Clean extracted document text into per-language corpora.
    Clean(CleanArgs),
    /// Token, vocabulary and size statistics of corpus files.
    Stats(StatsArgs),
    /// Share of thesaurus keywords matched in each model's vocabulary.
    Coverage(CoverageArgs),
    /// Pairwise neighborhood diversity between models.
    Diversity(DiversityArgs),
    /// How often related concepts appear among a descriptor's neighbors.
    Relations(RelationsArgs),
    /// Nearest neighbors of one word.
    Neighbors(NeighborsArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Default)]
pub enum Precision {
    #[default]
    F32,
    F64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OovPolicyArg {
    Miss,
    Skip,
}

impl From<OovPolicyArg> for OovPolicy {
    fn from(v: OovPolicyArg) -> Self {
        match v {
            OovPolicyArg::Miss => OovPolicy::Miss,
            OovPolicyArg::Skip => OovPolicy::Skip,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum DenominatorArg {
    Evaluated,
    Total,
}

impl From<DenominatorArg> for Denominator {
    fn from(v: DenominatorArg) -> Self {
        match v {
            DenominatorArg::Evaluated => Denominator::Evaluated,
            DenominatorArg::Total => Denominator::Total,
        }
    }
}

#[derive(Debug, Args)]
pub struct CleanArgs {
    /// Directory of extracted `.txt` documents.
    #[arg(long)]
    pub input: PathBuf,
    /// Output directory for corpora, stats.csv and the manifest.
    #[arg(long)]
    pub out: PathBuf,
    /// Corpus files are named `<corpus-name>.<lang>.txt`.
    #[arg(long, default_value = "corpus")]
    pub corpus_name: String,
    /// Pipeline settings as `key = value` lines.
    #[arg(long)]
    pub config: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct StatsArgs {
    /// Corpus files named `<name>.<lang>.txt`, one sentence per line.
    #[arg(long = "corpus", required = true)]
    pub corpora: Vec<PathBuf>,
    /// Output directory for stats.csv, stats.md and the manifest.
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct ModelArgs {
    /// Word-vector file; repeat for several models.
    #[arg(long = "model", required = true)]
    pub models: Vec<PathBuf>,
    /// SKOS thesaurus as `.nt` (N-Triples) or `.tsv`.
    #[arg(long)]
    pub thesaurus: PathBuf,
    /// Label language.
    #[arg(long, default_value = "de")]
    pub lang: String,
    /// Compare labels and tokens case-sensitively.
    #[arg(long)]
    pub no_lowercase: bool,
    /// Component type used when loading vectors.
    #[arg(long, value_enum, default_value_t = Precision::F32)]
    pub precision: Precision,
    /// Output directory for tables and the manifest.
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct CacheArgs {
    /// Directory for cached neighborhoods.
    #[arg(long, env = "EMBEVAL_CACHE_DIR")]
    pub cache_dir: Option<PathBuf>,
    /// Recompute and overwrite cached neighborhoods.
    #[arg(long)]
    pub refresh: bool,
}

#[derive(Debug, Args)]
pub struct CoverageArgs {
    #[command(flatten)]
    pub common: ModelArgs,
    /// Ratio similarity threshold in (0, 1]; repeatable.
    #[arg(long = "s", required = true)]
    pub s: Vec<f64>,
}

#[derive(Debug, Args)]
pub struct DiversityArgs {
    #[command(flatten)]
    pub common: ModelArgs,
    /// Neighborhood size; repeatable.
    #[arg(long = "k", required = true)]
    pub k: Vec<usize>,
    /// Divide by pairs with non-empty neighborhoods, or by all keywords.
    #[arg(long, value_enum, default_value_t = DenominatorArg::Evaluated)]
    pub denominator: DenominatorArg,
    #[command(flatten)]
    pub cache: CacheArgs,
}

#[derive(Debug, Args)]
pub struct RelationsArgs {
    #[command(flatten)]
    pub common: ModelArgs,
    /// Neighborhood size; repeatable.
    #[arg(long = "k", required = true)]
    pub k: Vec<usize>,
    /// Keep only pairs whose labels are single words.
    #[arg(long)]
    pub single_word_only: bool,
    /// Count pairs with an out-of-vocabulary label as misses, or drop them.
    #[arg(long, value_enum, default_value_t = OovPolicyArg::Miss)]
    pub oov_policy: OovPolicyArg,
    #[command(flatten)]
    pub cache: CacheArgs,
}

#[derive(Debug, Args)]
pub struct NeighborsArgs {
    #[arg(long)]
    pub model: PathBuf,
    #[arg(long)]
    pub word: String,
    #[arg(long, default_value_t = 10)]
    pub k: usize,
    #[arg(long, value_enum, default_value_t = Precision::F32)]
    pub precision: Precision,
    /// Also write neighbors.csv, neighbors.md and a manifest here.
    #[arg(long)]
    pub out: Option<PathBuf>,
}
