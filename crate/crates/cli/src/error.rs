use std::fmt;

use senti_core::agreement::AgreementError;
use senti_core::classify::ClassifyError;
use senti_core::corpus::CorpusError;
use senti_core::eval::EvalError;
use senti_core::features::FeatureError;
use senti_core::stats::StatsError;

/// A failure reported as `error: <CODE>: <message>` on one line.
#[derive(Debug)]
pub struct CliError {
    pub code: &'static str,
    pub message: String,
}

impl CliError {
    pub fn new(code: &'static str, message: impl Into<String>) -> Self {
        CliError {
            code,
            message: message.into(),
        }
    }

    pub fn usage(message: impl Into<String>) -> Self {
        CliError::new("USAGE", message)
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        // keep the report on a single line
        let flat = self.message.replace(['\n', '\r'], " ");
        write!(f, "error: {}: {}", self.code, flat)
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::new("IO", e.to_string())
    }
}

impl From<CorpusError> for CliError {
    fn from(e: CorpusError) -> Self {
        let code = match e {
            CorpusError::Io { .. } => "IO",
            _ => "INPUT",
        };
        CliError::new(code, e.to_string())
    }
}

impl From<AgreementError> for CliError {
    fn from(e: AgreementError) -> Self {
        CliError::new("AGREEMENT", e.to_string())
    }
}

impl From<FeatureError> for CliError {
    fn from(e: FeatureError) -> Self {
        let code = match e {
            FeatureError::MissingText(_) => "MISSING_TEXT",
            FeatureError::Io(_) => "IO",
            _ => "FEATURES",
        };
        CliError::new(code, e.to_string())
    }
}

impl From<ClassifyError> for CliError {
    fn from(e: ClassifyError) -> Self {
        let code = match e {
            ClassifyError::VocabularyMismatch { .. } => "HASH_MISMATCH",
            ClassifyError::Format(_) => "MODEL_FORMAT",
            ClassifyError::Feature(FeatureError::MissingText(_)) => "MISSING_TEXT",
            ClassifyError::Io(_) => "IO",
            _ => "TRAIN",
        };
        CliError::new(code, e.to_string())
    }
}

impl From<EvalError> for CliError {
    fn from(e: EvalError) -> Self {
        let code = match root(&e) {
            EvalError::Feature(FeatureError::MissingText(_)) => "MISSING_TEXT",
            EvalError::ClassTooSmall { .. } | EvalError::TooFewFolds(_) => "FOLDS",
            EvalError::Classify(_) => "TRAIN",
            EvalError::Corpus(_) => "INPUT",
            _ => "EVAL",
        };
        CliError::new(code, e.to_string())
    }
}

fn root(e: &EvalError) -> &EvalError {
    match e {
        EvalError::Fold { source, .. } => root(source),
        other => other,
    }
}

impl From<StatsError> for CliError {
    fn from(e: StatsError) -> Self {
        CliError::new("STATS", e.to_string())
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        CliError::new("OUTPUT", e.to_string())
    }
}
