//! Experiment harness: dataset cache, cross-validated runs over a learner
//! roster, and report rendering. The `medstack` binary is a thin CLI over
//! these modules.

pub mod config;
pub mod error;
pub mod experiment;
pub mod fetch;
pub mod report;

pub use config::ExperimentConfig;
pub use error::{HarnessError, Result};
pub use experiment::{run_experiment, LoadedDataset, Report};

use std::path::Path;

/// Fetches (or validates the cache for) every configured dataset and loads it.
pub fn load_datasets(names: &[String], cache: &Path, mirror: Option<&str>) -> Result<Vec<LoadedDataset>> {
    fetch::fetch_datasets(names, cache, mirror)?
        .iter()
        .map(|f| {
            let (data, schema) = fetch::load(f)?;
            Ok(LoadedDataset {
                name: f.name.clone(),
                data,
                schema,
            })
        })
        .collect()
}
