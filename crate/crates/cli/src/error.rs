use std::io;

use setcast::dataset::DatasetError;
use setcast::evaluation::EvaluationError;
use setcast::naive_bayes::NaiveBayesError;
use setcast::svm::SvmError;

/// Process exit codes. Stable for scripting.
pub const EXIT_USAGE: u8 = 2;
pub const EXIT_IO: u8 = 3;
pub const EXIT_TRAINING: u8 = 4;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: io::Error,
    },
    #[error(transparent)]
    Dataset(#[from] DatasetError),
    #[error(transparent)]
    NaiveBayes(#[from] NaiveBayesError),
    #[error(transparent)]
    Svm(#[from] SvmError),
    #[error(transparent)]
    Evaluation(#[from] EvaluationError),
}

impl CliError {
    pub fn io(path: impl Into<String>, source: io::Error) -> Self {
        CliError::Io {
            path: path.into(),
            source,
        }
    }

    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => EXIT_USAGE,
            CliError::Io { .. } => EXIT_IO,
            CliError::Dataset(e) => dataset_code(e),
            CliError::NaiveBayes(e) => naive_bayes_code(e),
            CliError::Svm(e) => svm_code(e),
            CliError::Evaluation(e) => evaluation_code(e),
        }
    }
}

fn dataset_code(e: &DatasetError) -> u8 {
    match e {
        DatasetError::Io { .. } => EXIT_IO,
        _ => EXIT_USAGE,
    }
}

fn naive_bayes_code(e: &NaiveBayesError) -> u8 {
    match e {
        NaiveBayesError::Dataset(d) => dataset_code(d),
        NaiveBayesError::SchemaMismatch { .. }
        | NaiveBayesError::NonFinite(_)
        | NaiveBayesError::Format(_)
        | NaiveBayesError::Kv(_) => EXIT_USAGE,
        _ => EXIT_TRAINING,
    }
}

fn svm_code(e: &SvmError) -> u8 {
    match e {
        SvmError::Dataset(d) => dataset_code(d),
        SvmError::Dimension { .. }
        | SvmError::Kernel(_)
        | SvmError::Config(_)
        | SvmError::Format(_)
        | SvmError::Kv(_) => EXIT_USAGE,
        _ => EXIT_TRAINING,
    }
}

fn evaluation_code(e: &EvaluationError) -> u8 {
    match e {
        EvaluationError::Training { .. } => EXIT_TRAINING,
        EvaluationError::NaiveBayes(e) => naive_bayes_code(e),
        EvaluationError::Svm(e) => svm_code(e),
        EvaluationError::Dataset(e) => dataset_code(e),
        _ => EXIT_USAGE,
    }
}
