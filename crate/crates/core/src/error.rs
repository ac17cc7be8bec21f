use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{0}: file contains no data rows")]
    EmptyFile(String),

    #[error("row {row}: expected {expected} fields, found {found}")]
    RowArity {
        row: usize,
        expected: usize,
        found: usize,
    },

    #[error("row {row}, column '{column}': {message}")]
    Parse {
        row: usize,
        column: String,
        message: String,
    },

    #[error("row {row}: label value '{value}' is not in the schema coding map")]
    UnknownLabel { row: usize, value: String },

    #[error("schema error: {0}")]
    Schema(String),

    #[error("column '{column}': every training value is the missing-value sentinel")]
    AllSentinel { column: String },

    #[error("fold count {k} out of range: need 2 <= k <= {minority} (smallest class count)")]
    FoldCount { k: usize, minority: usize },

    #[error("need at least {needed} samples, got {found}")]
    TooFewSamples { needed: usize, found: usize },

    #[error("training set contains a single class; both classes are required")]
    SingleClass,

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },

    #[error("input width {found} does not match expected width {expected}")]
    WidthMismatch { expected: usize, found: usize },

    #[error("empty input: {0}")]
    Empty(&'static str),

    #[error("non-finite loss at epoch {epoch}")]
    NonFiniteLoss { epoch: usize },

    #[error("learner '{0}' does not support per-instance weights")]
    WeightsUnsupported(String),

    #[error("first weak learner has weighted error {error:.4} >= 0.5; nothing to boost")]
    NoBoostableStage { error: f64 },

    #[error("learner '{learner}' failed on fold {fold}: {source}")]
    FoldFit {
        learner: String,
        fold: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("leakage: meta-feature row {row} from learner `{learner}` was produced by a model trained on it (fold {fold})")]
    Leakage {
        row: usize,
        learner: String,
        fold: usize,
    },

    #[error("unknown learner '{0}'")]
    UnknownLearner(String),

    #[error("bad learner configuration: {0}")]
    Config(String),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
