use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error(transparent)]
    Core(#[from] medstack_core::Error),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("config: {0}")]
    Config(String),

    #[error("unknown dataset '{0}' (known: pima, wdbc, statlog-heart)")]
    UnknownDataset(String),

    #[error("checksum mismatch for {path}: expected sha256 {expected}, found {found}; refusing the file")]
    Checksum {
        path: PathBuf,
        expected: String,
        found: String,
    },

    #[error("could not download {url}: {message}. Place {file} (sha256 {sha256}) in {cache} by hand and rerun")]
    Network {
        url: String,
        message: String,
        file: String,
        sha256: String,
        cache: PathBuf,
    },

    #[error("{dataset} / {model} / fold {fold}: {source}")]
    Job {
        dataset: String,
        model: String,
        fold: usize,
        #[source]
        source: medstack_core::Error,
    },

    #[error("strict mode: {dataset} / {model} accuracy {accuracy:.4} is below the majority rate {majority:.4} minus 0.03")]
    BelowBaseline {
        dataset: String,
        model: String,
        accuracy: f64,
        majority: f64,
    },

    #[error("report has no rows")]
    EmptyReport,

    #[error("{0}")]
    Report(String),
}

pub type Result<T> = std::result::Result<T, HarnessError>;

pub(crate) fn io(path: impl Into<PathBuf>) -> impl FnOnce(std::io::Error) -> HarnessError {
    let path = path.into();
    move |source| HarnessError::Io { path, source }
}
