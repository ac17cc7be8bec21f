//! Experiment configuration (TOML).
//!
//! ```toml
//! datasets = ["pima", "wdbc", "statlog-heart"]
//! k = 10
//! seed = 42
//! roster = ["logistic", "knn", "stacking-nn"]
//!
//! [models.knn]
//! k = 7
//!
//! [ensembles.stacking]
//! folds = 5
//! naive = false
//!
//! [ensembles.stacking.nn_meta]
//! hidden_widths = [16, 8]
//!
//! [output]
//! dir = "results"
//! formats = ["csv", "md", "json"]
//! roc = true
//! ```

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use medstack_core::learners::LogisticParams;
use medstack_core::neural::MlpParams;
use medstack_core::spec::{BaggingParams, BoostingParams, StackingParams, BASE_LEARNERS, LEARNER_NAMES};
use medstack_core::LearnerSpec;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{io, HarnessError, Result};

pub const DATASETS: &[&str] = &["pima", "wdbc", "statlog-heart"];

/// Seven single learners followed by the four ensemble rows.
pub const DEFAULT_ROSTER: &[&str] = &[
    "logistic",
    "naive-bayes",
    "knn",
    "decision-tree",
    "random-forest",
    "svm",
    "cart",
    "bagging",
    "boosting",
    "stacking-nn",
    "mlp",
];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub datasets: Vec<String>,
    pub k: usize,
    pub seed: u64,
    pub roster: Vec<String>,
    /// Hyperparameter overrides keyed by roster name.
    pub models: BTreeMap<String, toml::Table>,
    pub ensembles: EnsembleConfig,
    pub output: OutputConfig,
    pub strict: bool,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            datasets: DATASETS.iter().map(|s| s.to_string()).collect(),
            k: 10,
            seed: 42,
            roster: DEFAULT_ROSTER.iter().map(|s| s.to_string()).collect(),
            models: BTreeMap::new(),
            ensembles: EnsembleConfig::default(),
            output: OutputConfig::default(),
            strict: false,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EnsembleConfig {
    pub bagging: BaggingConfig,
    pub boosting: BoostingConfig,
    pub stacking: StackingConfig,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BaggingConfig {
    pub n_estimators: usize,
    pub bootstrap: bool,
    pub base: String,
}

impl Default for BaggingConfig {
    fn default() -> Self {
        BaggingConfig {
            n_estimators: 100,
            bootstrap: true,
            base: "decision-tree".into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BoostingConfig {
    pub rounds: usize,
    pub weak: String,
}

impl Default for BoostingConfig {
    fn default() -> Self {
        BoostingConfig {
            rounds: 100,
            weak: "stump".into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct StackingConfig {
    pub bases: Vec<String>,
    pub folds: usize,
    pub naive: bool,
    /// Overrides for the network meta-learner of `stacking-nn`.
    pub nn_meta: toml::Table,
}

impl Default for StackingConfig {
    fn default() -> Self {
        StackingConfig {
            bases: BASE_LEARNERS.iter().map(|s| s.to_string()).collect(),
            folds: 5,
            naive: false,
            nn_meta: toml::Table::new(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OutputConfig {
    pub dir: PathBuf,
    pub formats: Vec<String>,
    /// Also write pooled out-of-fold ROC points per (dataset, model).
    pub roc: bool,
}

impl Default for OutputConfig {
    fn default() -> Self {
        OutputConfig {
            dir: PathBuf::from("results"),
            formats: vec!["csv".into(), "md".into(), "json".into()],
            roc: false,
        }
    }
}

impl ExperimentConfig {
    pub fn from_toml_str(text: &str) -> Result<Self> {
        let cfg: ExperimentConfig = toml::from_str(text).map_err(|e| HarnessError::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(io(path))?;
        Self::from_toml_str(&text)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(HarnessError::Config(m));
        if self.k < 2 {
            return bad(format!("k must be >= 2, got {}", self.k));
        }
        if self.roster.is_empty() {
            return bad("roster is empty".into());
        }
        if self.datasets.is_empty() {
            return bad("no datasets selected".into());
        }
        for d in &self.datasets {
            if !DATASETS.contains(&d.as_str()) {
                return Err(HarnessError::UnknownDataset(d.clone()));
            }
        }
        let mut seen = std::collections::BTreeSet::new();
        for name in &self.roster {
            if !seen.insert(name) {
                return bad(format!("roster lists '{name}' twice"));
            }
        }
        for name in self.models.keys() {
            if !LEARNER_NAMES.contains(&name.as_str()) {
                return bad(format!("[models.{name}]: unknown learner"));
            }
        }
        for f in &self.output.formats {
            if !["csv", "md", "json"].contains(&f.as_str()) {
                return bad(format!("unknown output format '{f}'"));
            }
        }
        for name in &self.roster {
            self.learner(name)?;
        }
        Ok(())
    }

    /// SHA-256 of the resolved configuration, stamped into reports.
    pub fn hash(&self) -> String {
        let canonical = serde_json::to_string(self).expect("config serializes");
        hex::encode(Sha256::digest(canonical.as_bytes()))
    }

    /// Resolves a roster name into a fully parameterized learner.
    pub fn learner(&self, name: &str) -> Result<LearnerSpec> {
        self.resolve(name, 0)
    }

    fn resolve(&self, name: &str, depth: usize) -> Result<LearnerSpec> {
        if depth > 2 {
            return Err(HarnessError::Config(format!("'{name}' nests ensembles too deeply")));
        }
        let ens = &self.ensembles;
        let spec = match name {
            "bagging" => LearnerSpec::Bagging(BaggingParams {
                n_estimators: ens.bagging.n_estimators,
                bootstrap: ens.bagging.bootstrap,
                base: Box::new(self.resolve(&ens.bagging.base, depth + 1)?),
            }),
            "boosting" => LearnerSpec::Boosting(BoostingParams {
                rounds: ens.boosting.rounds,
                weak: Box::new(self.resolve(&ens.boosting.weak, depth + 1)?),
            }),
            "stacking-nn" | "stacking-logistic" => {
                let bases = ens
                    .stacking
                    .bases
                    .iter()
                    .map(|b| self.resolve(b, depth + 1))
                    .collect::<Result<Vec<_>>>()?;
                let meta = if name == "stacking-nn" {
                    let table = json(&ens.stacking.nn_meta)?;
                    LearnerSpec::Mlp(MlpParams::meta()).with_overrides(&table)?
                } else {
                    LearnerSpec::Logistic(LogisticParams::default())
                };
                LearnerSpec::Stacking(StackingParams {
                    bases,
                    meta: Box::new(meta),
                    folds: ens.stacking.folds,
                    naive: ens.stacking.naive,
                })
            }
            other => LearnerSpec::from_name(other)?,
        };
        let spec = match self.models.get(name) {
            Some(table) => spec.with_overrides(&json(table)?)?,
            None => spec,
        };
        spec.validate()?;
        Ok(spec)
    }
}

fn json(table: &toml::Table) -> Result<serde_json::Value> {
    serde_json::to_value(table).map_err(|e| HarnessError::Config(e.to_string()))
}

/// Row label used in the Markdown tables.
pub fn display_name(name: &str) -> String {
    match name {
        "logistic" => "Logistic regression",
        "naive-bayes" => "Naive Bayes",
        "knn" => "k-NN",
        "decision-tree" => "Decision tree",
        "random-forest" => "Random forest",
        "svm" => "SVM",
        "cart" => "CART",
        "bagging" => "Bagging",
        "boosting" => "Boosting",
        "stacking-nn" => "Stacking+NN-meta",
        "stacking-logistic" => "Stacking+logistic-meta",
        "mlp" => "MLP standalone",
        "linear-regression" => "Linear regression",
        "stump" => "Decision stump",
        "majority" => "Majority baseline",
        other => return other.to_string(),
    }
    .to_string()
}

pub fn dataset_title(name: &str) -> &str {
    match name {
        "pima" => "Pima Indians diabetes",
        "wdbc" => "Wisconsin diagnostic breast cancer",
        "statlog-heart" => "Statlog heart disease",
        other => other,
    }
}
