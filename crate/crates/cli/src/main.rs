//! `spamlab`: ingest, train, evaluate, classify and report.

mod commands;
mod config;
mod error;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use spamlab::Label;

use crate::config::DatasetFormat;
use crate::error::{EXIT_OK, EXIT_USAGE};

#[derive(Debug, Parser)]
#[command(name = "spamlab", version, about = "Spam/ham classification with Naive Bayes, C4.5 and an MLP")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Convert a CSV file, an EML directory or an mbox into a canonical CSV dataset.
    Ingest(IngestArgs),
    /// Write a synthetic labeled corpus as CSV.
    Generate(GenerateArgs),
    /// Split the dataset, fit the selected models and write model files plus a split manifest.
    Train(TrainArgs),
    /// Score model files on the test side of a split manifest.
    Evaluate(EvaluateArgs),
    /// Classify one message with a model file.
    Classify(ClassifyArgs),
    /// Render a machine report as a table, or a C4.5 model as a tree.
    Report(ReportArgs),
}

#[derive(Debug, clap::Args)]
struct IngestArgs {
    /// Source file or directory.
    source: PathBuf,
    #[arg(long, value_enum)]
    format: DatasetFormat,
    /// Class of every message in a single mbox file.
    #[arg(long)]
    label: Option<Label>,
    /// Destination CSV.
    #[arg(long, short)]
    output: PathBuf,
}

#[derive(Debug, clap::Args)]
struct GenerateArgs {
    #[arg(long, short)]
    output: PathBuf,
    #[arg(long, default_value_t = 750)]
    per_class: usize,
    /// Probability that a word is drawn from its class's cue list, in [0, 1].
    #[arg(long, default_value_t = 0.4)]
    signal: f64,
    #[arg(long, default_value_t = 42)]
    seed: u64,
}

#[derive(Debug, clap::Args)]
struct TrainArgs {
    /// TOML pipeline configuration.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    dataset: Option<PathBuf>,
    #[arg(long, value_enum)]
    format: Option<DatasetFormat>,
    /// Model to fit (nb, c45 or mlp); repeatable. Replaces the configured selection.
    #[arg(long = "model")]
    models: Vec<String>,
    /// Seed for both the split and MLP training.
    #[arg(long)]
    seed: Option<u64>,
    /// Train fraction, strictly between 0 and 1.
    #[arg(long)]
    fraction: Option<f64>,
    #[arg(long)]
    min_df: Option<u32>,
    /// Vocabulary cap; 0 means unlimited.
    #[arg(long)]
    max_vocab: Option<usize>,
    /// count, binary or tf.
    #[arg(long)]
    representation: Option<String>,
    /// Stopword list file (one word per line).
    #[arg(long)]
    stopwords: Option<PathBuf>,
    #[arg(long)]
    output_dir: Option<PathBuf>,
}

#[derive(Debug, clap::Args)]
struct EvaluateArgs {
    /// Model files, or directories whose `*.model` files are all used.
    models: Vec<PathBuf>,
    /// Supplies the dataset and, when none are given, the model directory and manifest.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    dataset: Option<PathBuf>,
    #[arg(long, value_enum)]
    format: Option<DatasetFormat>,
    #[arg(long)]
    manifest: Option<PathBuf>,
    /// Machine report destination; defaults to `report.txt` next to the manifest.
    #[arg(long)]
    report: Option<PathBuf>,
}

#[derive(Debug, clap::Args)]
struct ClassifyArgs {
    #[arg(long)]
    model_file: PathBuf,
    /// Message file; standard input when absent or `-`.
    input: Option<PathBuf>,
    /// Treat the input as an RFC 5322 message rather than plain text.
    #[arg(long)]
    eml: bool,
}

#[derive(Debug, clap::Args)]
struct ReportArgs {
    /// Machine report written by `evaluate`.
    report: Option<PathBuf>,
    /// Append the quoted reference MLP figures as an extra row.
    #[arg(long)]
    with_reference: bool,
    /// Print the tree of a C4.5 model file.
    #[arg(long)]
    tree: Option<PathBuf>,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_USAGE } else { EXIT_OK } as u8);
        }
    };
    let result = match cli.command {
        Command::Ingest(a) => commands::ingest(&a.source, a.format, a.label, &a.output),
        Command::Generate(a) => commands::generate(&a.output, a.per_class, a.signal, a.seed),
        Command::Train(a) => commands::train_config(&a).and_then(|c| commands::train(&c)),
        Command::Evaluate(a) => commands::evaluate(&a),
        Command::Classify(a) => commands::classify(&a.model_file, a.input.as_deref(), a.eml),
        Command::Report(a) => commands::report(a.report.as_deref(), a.with_reference, a.tree.as_deref()),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("spamlab: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
