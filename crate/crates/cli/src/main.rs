//! `senti`: agreement reports, gold merging, training and evaluation of
//! three-class sentiment classifiers from the command line.

mod commands;
mod error;
mod report;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use error::CliError;

#[derive(Debug, Parser)]
#[command(name = "senti", version, about = "Sentiment annotation agreement and classifier evaluation")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

/// Flags shared by every subcommand.
#[derive(Debug, Args)]
pub struct Common {
    /// Input files; relative paths resolve against $SENTI_DATA_DIR when set.
    #[arg(long = "input", short = 'i', required = true, num_args = 1..)]
    pub inputs: Vec<PathBuf>,
    /// Output file (stdout when absent).
    #[arg(long, short = 'o')]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "json")]
    pub format: Format,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

/// Classifier and vocabulary settings.
#[derive(Debug, Args)]
pub struct ModelArgs {
    #[arg(long, default_value = "TwoPlaneSVMbin")]
    pub variant: String,
    #[arg(long = "min-df", default_value_t = 5)]
    pub min_df: u32,
    #[arg(long, default_value_t = 1.0)]
    pub cost: f64,
    /// Bins per axis for TwoPlaneSVMbin.
    #[arg(long, default_value_t = 10)]
    pub bins: usize,
    #[arg(long = "max-epochs", default_value_t = 50)]
    pub max_epochs: usize,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Self- and inter-annotator agreement per input file.
    Agreement {
        #[command(flatten)]
        common: Common,
        /// Measures to report (default: all).
        #[arg(long = "measure", value_delimiter = ',')]
        measures: Vec<String>,
        /// Bootstrap resamples for the Alpha intervals.
        #[arg(long, default_value_t = 1000)]
        samples: usize,
    },
    /// Class-ordering diagnostics per input file plus their average.
    Ordering {
        #[command(flatten)]
        common: Common,
        /// Dataset names left out of the average row.
        #[arg(long, value_delimiter = ',')]
        exclude: Vec<String>,
    },
    /// Merges duplicate annotations into a time-ordered gold corpus.
    Merge {
        #[command(flatten)]
        common: Common,
    },
    /// Trains a classifier; writes the model to --out and its vocabulary
    /// to <out>.vocab.
    Train {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        model: ModelArgs,
    },
    /// Labels posts with a trained model.
    Predict {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        model: PathBuf,
        /// Vocabulary file (default: <model>.vocab).
        #[arg(long)]
        vocab: Option<PathBuf>,
    },
    /// Blocked stratified cross-validation.
    Crossval {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        model: ModelArgs,
        #[arg(long, default_value_t = 10)]
        k: usize,
        #[arg(long = "measure", value_delimiter = ',', default_value = "alpha_interval")]
        measures: Vec<String>,
    },
    /// Cross-validation over growing time-ordered prefixes.
    Curve {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        model: ModelArgs,
        #[arg(long, default_value_t = 10)]
        k: usize,
        #[arg(long, default_value_t = 10_000)]
        step: usize,
        #[arg(long = "measure", value_delimiter = ',', default_value = "alpha_interval")]
        measures: Vec<String>,
    },
    /// Friedman-Nemenyi comparison of the six classifiers across inputs.
    Compare {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        model: ModelArgs,
        #[arg(long, default_value_t = 10)]
        k: usize,
        #[arg(long, default_value = "alpha_interval")]
        measure: String,
        /// Significance level of the critical distance (0.05 or 0.10).
        #[arg(long, default_value_t = 0.05)]
        level: f64,
        /// Also report the Iman-Davenport F statistic.
        #[arg(long = "iman-davenport")]
        iman_davenport: bool,
        /// Treat inputs as score tables (dataset column, then one column
        /// per classifier) instead of corpora.
        #[arg(long)]
        scores: bool,
    },
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Agreement {
            common,
            measures,
            samples,
        } => commands::agreement(&common, &measures, samples),
        Command::Ordering { common, exclude } => commands::ordering(&common, &exclude),
        Command::Merge { common } => commands::merge(&common),
        Command::Train { common, model } => commands::train(&common, &model),
        Command::Predict { common, model, vocab } => commands::predict(&common, &model, vocab.as_deref()),
        Command::Crossval {
            common,
            model,
            k,
            measures,
        } => commands::crossval(&common, &model, k, &measures),
        Command::Curve {
            common,
            model,
            k,
            step,
            measures,
        } => commands::curve(&common, &model, k, step, &measures),
        Command::Compare {
            common,
            model,
            k,
            measure,
            level,
            iman_davenport,
            scores,
        } => commands::compare(
            &common,
            &model,
            &commands::CompareArgs {
                k,
                measure,
                level,
                iman_davenport,
                scores,
            },
        ),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            // --help and --version
            print!("{e}");
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let text = e.to_string();
            let summary: Vec<&str> = text
                .lines()
                .map(str::trim)
                .take_while(|l| !l.starts_with("Usage:"))
                .filter(|l| !l.is_empty())
                .collect();
            let summary = summary.join(" ");
            eprintln!("{}", CliError::usage(summary.trim_start_matches("error: ")));
            return ExitCode::from(2);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("{e}");
            ExitCode::FAILURE
        }
    }
}
