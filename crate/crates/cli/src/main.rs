//! `askframe`: detect asks and framings, plan responses, evaluate lexica and edit them.

mod commands;
mod config;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("config: {0}")]
    Config(String),
    #[error("{0}")]
    Format(String),
}

impl CliError {
    pub fn io(path: &Path, source: std::io::Error) -> Self {
        CliError::Io {
            path: path.display().to_string(),
            source,
        }
    }

    pub fn format(path: &Path, err: impl std::fmt::Display) -> Self {
        CliError::Format(format!("{}: {err}", path.display()))
    }
}

/// Finished without error; `skipped` counts input records that were reported and dropped.
pub struct Outcome {
    pub skipped: usize,
}

#[derive(Debug, Parser)]
#[command(name = "askframe", version, about = "Lexicon-driven ask/framing detection for suspicious messages")]
pub struct Cli {
    /// TOML run configuration
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Lexicon file; repeat to compare several
    #[arg(long = "lexicon", global = true)]
    lexicons: Vec<PathBuf>,
    /// Lexicon file format: normalized or flatlist
    #[arg(long, global = true)]
    format: Option<String>,
    /// Output path (stdout when absent)
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Significance level for pairwise tests
    #[arg(long, global = true)]
    alpha: Option<f64>,
    /// Require trigger lemma equality when matching ground truth
    #[arg(long, global = true)]
    strict_trigger_match: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Detect asks/framings in a corpus (JSON Lines file or directory of text files)
    Detect { corpus: PathBuf },
    /// Plan one response per message from `detect` output
    Respond { detections: PathBuf },
    /// Score lexica against ground truth and test their differences
    Eval { corpus: PathBuf, ground_truth: PathBuf },
    /// Lexicon maintenance
    #[command(subcommand)]
    Lexicon(LexiconCommand),
}

#[derive(Debug, Subcommand)]
enum LexiconCommand {
    /// Per-category and per-class additions/deletions from A to B
    Diff { a: PathBuf, b: PathBuf },
    /// Apply an adaptation ledger to a base lexicon
    Apply { base: PathBuf, ledger: PathBuf },
    /// Load a lexicon and report its size, or the first violation
    Validate { file: PathBuf },
}

fn run(cli: Cli) -> Result<Outcome, CliError> {
    let settings = commands::Settings::resolve(&cli)?;
    match &cli.command {
        Command::Detect { corpus } => commands::detect(&settings, corpus),
        Command::Respond { detections } => commands::respond(&settings, detections),
        Command::Eval { corpus, ground_truth } => commands::eval(&settings, corpus, ground_truth),
        Command::Lexicon(LexiconCommand::Diff { a, b }) => commands::lexicon_diff(&settings, a, b),
        Command::Lexicon(LexiconCommand::Apply { base, ledger }) => commands::lexicon_apply(&settings, base, ledger),
        Command::Lexicon(LexiconCommand::Validate { file }) => commands::lexicon_validate(&settings, file),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(2) } else { ExitCode::SUCCESS };
        }
    };
    match run(cli) {
        Ok(Outcome { skipped: 0 }) => ExitCode::SUCCESS,
        Ok(Outcome { skipped }) => {
            eprintln!("askframe: {skipped} record(s) skipped");
            ExitCode::from(1)
        }
        Err(e) => {
            eprintln!("askframe: {e}");
            ExitCode::from(2)
        }
    }
}
