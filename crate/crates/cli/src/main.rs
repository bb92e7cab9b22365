//! `kgalign` command-line entry point.
//!
//! Exit codes: 0 on success, 1 when the pipeline fails, 2 on usage errors.

mod commands;
mod manifest;
mod settings;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{ArgAction, Args, Parser, Subcommand, ValueEnum};
use kgalign::kge::ModelKind;

#[derive(Debug, Parser)]
#[command(name = "kgalign", version, about = "Ontology alignment with knowledge-graph embeddings")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Train on the merged ontologies and write an alignment.
    Align(AlignArgs),
    /// Score an alignment file against a reference.
    Evaluate(EvaluateArgs),
    /// Train once and evaluate the alignment over a grid of thresholds.
    Sweep(SweepArgs),
    /// Generate a synthetic ontology pair with its reference alignment.
    Bench(BenchArgs),
}

fn parse_model(s: &str) -> Result<ModelKind, String> {
    s.parse::<ModelKind>().map_err(|e| e.to_string())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum NormArg {
    L1,
    L2,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FormatArg {
    Tsv,
    Xml,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SchemeArg {
    Suffix,
    Scramble,
}

/// Inputs and hyperparameters shared by `align` and `sweep`.
/// Flags override values from `--config`, which override the defaults.
#[derive(Debug, Args)]
pub struct TrainArgs {
    /// Source ontology (N-Triples or Turtle).
    #[arg(long)]
    pub source: PathBuf,
    /// Target ontology (N-Triples or Turtle).
    #[arg(long)]
    pub target: PathBuf,
    /// Embedding model, e.g. transe, rotate, distmult.
    #[arg(long, value_parser = parse_model)]
    pub model: Option<ModelKind>,
    /// TOML file with training keys (dim, epochs, batch_size, ...).
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub dim: Option<usize>,
    #[arg(long)]
    pub epochs: Option<usize>,
    #[arg(long)]
    pub batch_size: Option<usize>,
    /// Negatives per positive triple.
    #[arg(long)]
    pub negatives: Option<usize>,
    /// Row block size for the similarity matrix.
    #[arg(long)]
    pub eval_batch_size: Option<usize>,
    #[arg(long)]
    pub lr: Option<f64>,
    #[arg(long)]
    pub margin: Option<f64>,
    /// Random seed (default: $KGALIGN_SEED, else 7).
    #[arg(long)]
    pub seed: Option<u64>,
    /// Distance used by TransE.
    #[arg(long, value_enum)]
    pub norm: Option<NormArg>,
    /// Restrict candidates to class entities.
    #[arg(long, default_value_t = true, action = ArgAction::Set)]
    pub class_only: bool,
}

#[derive(Debug, Args)]
pub struct AlignArgs {
    #[command(flatten)]
    pub train: TrainArgs,
    /// Similarity threshold.
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub tau: f64,
    /// Alignment output path.
    #[arg(long)]
    pub out: PathBuf,
    /// Output format (default: from the extension of --out).
    #[arg(long, value_enum)]
    pub format: Option<FormatArg>,
    /// Also save the trained model here.
    #[arg(long)]
    pub checkpoint: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct EvaluateArgs {
    #[arg(long)]
    pub alignment: PathBuf,
    #[arg(long)]
    pub reference: PathBuf,
    /// JSON report path (default: <alignment>.evaluation.json).
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Task name for the table (default: reference file stem).
    #[arg(long)]
    pub task: Option<String>,
    /// Model name for the table.
    #[arg(long, default_value = "-")]
    pub model: String,
    /// Threshold recorded in the report.
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub tau: f64,
    /// Run time recorded in the report.
    #[arg(long, default_value_t = 0.0)]
    pub seconds: f64,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    #[command(flatten)]
    pub train: TrainArgs,
    #[arg(long)]
    pub reference: PathBuf,
    /// Thresholds as start:stop:step.
    #[arg(long, default_value = "0:1:0.01")]
    pub grid: String,
    /// JSON sweep report path.
    #[arg(long)]
    pub out: PathBuf,
    /// Also write the alignment at the best threshold here.
    #[arg(long)]
    pub alignment_out: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub format: Option<FormatArg>,
}

#[derive(Debug, Args)]
pub struct BenchArgs {
    /// Directory for source.nt, target.nt and reference.tsv.
    #[arg(long)]
    pub out_dir: PathBuf,
    #[arg(long, default_value_t = 50)]
    pub num_concepts: usize,
    #[arg(long, default_value_t = 3)]
    pub num_relations: usize,
    /// Edges per concept.
    #[arg(long, default_value_t = 3.0)]
    pub density: f64,
    /// Fraction of target concepts that keep the source label.
    #[arg(long, default_value_t = 0.3, allow_negative_numbers = true)]
    pub anchor_fraction: f64,
    #[arg(long, value_enum, default_value_t = SchemeArg::Suffix)]
    pub rename_scheme: SchemeArg,
    /// Random seed (default: $KGALIGN_SEED, else 7).
    #[arg(long)]
    pub seed: Option<u64>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match commands::run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
