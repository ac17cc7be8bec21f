//! Serializable learner descriptions.
//!
//! A [`LearnerSpec`] names an algorithm plus its hyperparameters and is itself a
//! [`Learner`]. Specs are built from roster names with
//! [`LearnerSpec::from_name`] and adjusted with JSON-shaped overrides, which is
//! how the harness config reaches every hyperparameter.

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::data::{stratified_kfold, Dataset};
use crate::ensembles::{fit_adaboost, fit_bagging, fit_stacking, StackedModel, StackingMode};
use crate::error::{Error, Result};
use crate::learners::{
    fit_gaussian_nb, fit_knn, fit_linear_regression, fit_linear_svm, fit_logistic_regression, Classifier,
    KnnParams, Learner, LogisticParams, PriorModel, Standardized, SvmParams,
};
use crate::neural::{train_mlp, MlpParams};
use crate::rng;
use crate::trees::{fit_random_forest, fit_tree, fit_tree_weighted, Criterion, ForestParams, TreeParams};

/// Roster names accepted by [`LearnerSpec::from_name`].
pub const LEARNER_NAMES: &[&str] = &[
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
    "stacking-logistic",
    "linear-regression",
    "stump",
    "majority",
];

/// The seven single-model learners used as stacking bases by default.
pub const BASE_LEARNERS: &[&str] = &[
    "logistic",
    "naive-bayes",
    "knn",
    "decision-tree",
    "random-forest",
    "svm",
    "cart",
];

fn default_bags() -> usize {
    100
}
fn default_true() -> bool {
    true
}
fn default_bag_base() -> Box<LearnerSpec> {
    Box::new(LearnerSpec::Tree(TreeParams::default()))
}
fn default_rounds() -> usize {
    100
}
fn default_weak() -> Box<LearnerSpec> {
    Box::new(LearnerSpec::Tree(TreeParams::stump()))
}
fn default_bases() -> Vec<LearnerSpec> {
    BASE_LEARNERS
        .iter()
        .map(|n| LearnerSpec::from_name(n).expect("built-in name"))
        .collect()
}
fn default_meta() -> Box<LearnerSpec> {
    Box::new(LearnerSpec::Mlp(MlpParams::meta()))
}
fn default_inner_folds() -> usize {
    5
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BaggingParams {
    #[serde(default = "default_bags")]
    pub n_estimators: usize,
    #[serde(default = "default_true")]
    pub bootstrap: bool,
    #[serde(default = "default_bag_base")]
    pub base: Box<LearnerSpec>,
}

impl Default for BaggingParams {
    fn default() -> Self {
        BaggingParams {
            n_estimators: default_bags(),
            bootstrap: true,
            base: default_bag_base(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BoostingParams {
    #[serde(default = "default_rounds")]
    pub rounds: usize,
    /// Must support instance weights.
    #[serde(default = "default_weak")]
    pub weak: Box<LearnerSpec>,
}

impl Default for BoostingParams {
    fn default() -> Self {
        BoostingParams {
            rounds: default_rounds(),
            weak: default_weak(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StackingParams {
    #[serde(default = "default_bases")]
    pub bases: Vec<LearnerSpec>,
    #[serde(default = "default_meta")]
    pub meta: Box<LearnerSpec>,
    /// Internal folds used to build out-of-fold meta-features.
    #[serde(default = "default_inner_folds")]
    pub folds: usize,
    /// Train the meta model on in-sample base predictions instead.
    #[serde(default)]
    pub naive: bool,
}

impl Default for StackingParams {
    fn default() -> Self {
        StackingParams {
            bases: default_bases(),
            meta: default_meta(),
            folds: default_inner_folds(),
            naive: false,
        }
    }
}

impl StackingParams {
    /// Fits the stacked model, keeping the concrete type so callers can inspect
    /// the meta-feature audit trail.
    pub fn fit(&self, train: &Dataset, seed: u64) -> Result<StackedModel> {
        let plan = stratified_kfold(train, self.folds, rng::derive_seed(seed, &[0x5EED]))?;
        let mode = if self.naive {
            StackingMode::Naive
        } else {
            StackingMode::OutOfFold
        };
        fit_stacking(&self.bases, self.meta.as_ref(), train, &plan, mode, seed)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum LearnerSpec {
    /// Least squares on 0/1 targets, fitted values clamped to `[0, 1]`.
    LinearRegression,
    Logistic(LogisticParams),
    NaiveBayes,
    Knn(KnnParams),
    Svm(SvmParams),
    Tree(TreeParams),
    RandomForest(ForestParams),
    Bagging(BaggingParams),
    Boosting(BoostingParams),
    Stacking(StackingParams),
    Mlp(MlpParams),
    /// Predicts the training positive rate everywhere.
    Majority,
}

impl LearnerSpec {
    pub fn from_name(name: &str) -> Result<LearnerSpec> {
        Ok(match name {
            "logistic" => LearnerSpec::Logistic(LogisticParams::default()),
            "naive-bayes" => LearnerSpec::NaiveBayes,
            "knn" => LearnerSpec::Knn(KnnParams::default()),
            "decision-tree" => LearnerSpec::Tree(TreeParams::default()),
            "cart" => LearnerSpec::Tree(TreeParams {
                criterion: Criterion::Gini,
                ..Default::default()
            }),
            "stump" => LearnerSpec::Tree(TreeParams::stump()),
            "random-forest" => LearnerSpec::RandomForest(ForestParams::default()),
            "svm" => LearnerSpec::Svm(SvmParams::default()),
            "bagging" => LearnerSpec::Bagging(BaggingParams::default()),
            "boosting" => LearnerSpec::Boosting(BoostingParams::default()),
            "stacking-nn" => LearnerSpec::Stacking(StackingParams::default()),
            "stacking-logistic" => LearnerSpec::Stacking(StackingParams {
                meta: Box::new(LearnerSpec::Logistic(LogisticParams::default())),
                ..Default::default()
            }),
            "mlp" => LearnerSpec::Mlp(MlpParams::default()),
            "linear-regression" => LearnerSpec::LinearRegression,
            "majority" => LearnerSpec::Majority,
            other => return Err(Error::UnknownLearner(other.to_string())),
        })
    }

    /// Deep-merges `overrides` (a JSON object) into this spec. Nested objects
    /// merge key by key unless they name a different `kind`, in which case they
    /// replace the nested spec. Unknown keys are rejected.
    pub fn with_overrides(&self, overrides: &Value) -> Result<LearnerSpec> {
        let mut base = serde_json::to_value(self).map_err(|e| Error::Config(e.to_string()))?;
        merge(&mut base, overrides);
        let merged: LearnerSpec = serde_json::from_value(base).map_err(|e| Error::Config(format!("{}: {e}", self.name())))?;
        merged.validate()?;
        Ok(merged)
    }

    /// Structural checks that do not need data.
    pub fn validate(&self) -> Result<()> {
        match self {
            LearnerSpec::Bagging(BaggingParams { base, n_estimators, .. }) => {
                if *n_estimators == 0 {
                    return Err(Error::InvalidParameter("bagging: n_estimators must be >= 1".into()));
                }
                base.validate()
            }
            LearnerSpec::Boosting(BoostingParams { weak, rounds }) => {
                if *rounds == 0 {
                    return Err(Error::InvalidParameter("boosting: rounds must be >= 1".into()));
                }
                if !weak.supports_weights() {
                    return Err(Error::WeightsUnsupported(weak.name()));
                }
                weak.validate()
            }
            LearnerSpec::Stacking(StackingParams { bases, meta, folds, .. }) => {
                if bases.is_empty() {
                    return Err(Error::InvalidParameter("stacking: at least one base learner required".into()));
                }
                if *folds < 2 {
                    return Err(Error::InvalidParameter("stacking: folds must be >= 2".into()));
                }
                bases.iter().try_for_each(LearnerSpec::validate)?;
                meta.validate()
            }
            _ => Ok(()),
        }
    }
}

fn merge(base: &mut Value, patch: &Value) {
    match (base, patch) {
        (Value::Object(b), Value::Object(p)) => {
            let kind_changes = matches!((b.get("kind"), p.get("kind")), (Some(x), Some(y)) if x != y);
            if kind_changes {
                *b = p.clone();
                return;
            }
            for (k, v) in p {
                match b.get_mut(k) {
                    Some(slot) => merge(slot, v),
                    None => {
                        b.insert(k.clone(), v.clone());
                    }
                }
            }
        }
        (slot, v) => *slot = v.clone(),
    }
}

fn boxed<C: Classifier + 'static>(r: Result<C>) -> Result<Box<dyn Classifier>> {
    Ok(Box::new(r?))
}

impl Learner for LearnerSpec {
    fn name(&self) -> String {
        match self {
            LearnerSpec::LinearRegression => "linear-regression",
            LearnerSpec::Logistic(_) => "logistic",
            LearnerSpec::NaiveBayes => "naive-bayes",
            LearnerSpec::Knn(_) => "knn",
            LearnerSpec::Svm(_) => "svm",
            LearnerSpec::Tree(p) if p.max_depth == 1 => "stump",
            LearnerSpec::Tree(p) => match p.criterion {
                Criterion::Entropy => "decision-tree",
                Criterion::Gini => "cart",
            },
            LearnerSpec::RandomForest(_) => "random-forest",
            LearnerSpec::Bagging(_) => "bagging",
            LearnerSpec::Boosting(_) => "boosting",
            LearnerSpec::Stacking(_) => "stacking",
            LearnerSpec::Mlp(_) => "mlp",
            LearnerSpec::Majority => "majority",
        }
        .to_string()
    }

    fn fit(&self, train: &Dataset, seed: u64) -> Result<Box<dyn Classifier>> {
        match self {
            LearnerSpec::LinearRegression => boxed(fit_linear_regression(train)),
            LearnerSpec::Logistic(p) => {
                boxed(Standardized::fit_with(train, |d| boxed(fit_logistic_regression(d, p))))
            }
            LearnerSpec::NaiveBayes => boxed(fit_gaussian_nb(train)),
            LearnerSpec::Knn(p) => boxed(Standardized::fit_with(train, |d| boxed(fit_knn(d, p)))),
            LearnerSpec::Svm(p) => boxed(Standardized::fit_with(train, |d| boxed(fit_linear_svm(d, p)))),
            LearnerSpec::Tree(p) => boxed(fit_tree(train, p, seed)),
            LearnerSpec::RandomForest(p) => boxed(fit_random_forest(train, p, seed)),
            LearnerSpec::Bagging(p) => boxed(fit_bagging(p.base.as_ref(), p.n_estimators, train, p.bootstrap, seed)),
            LearnerSpec::Boosting(p) => boxed(fit_adaboost(p.weak.as_ref(), p.rounds, train, seed)),
            LearnerSpec::Stacking(p) => boxed(p.fit(train, seed)),
            LearnerSpec::Mlp(p) => boxed(Standardized::fit_with(train, |d| {
                boxed(train_mlp(d.features(), d.labels(), p, seed))
            })),
            LearnerSpec::Majority => boxed(PriorModel::fit(train)),
        }
    }

    fn supports_weights(&self) -> bool {
        matches!(self, LearnerSpec::Tree(_))
    }

    fn fit_weighted(&self, train: &Dataset, weights: &[f64], seed: u64) -> Result<Box<dyn Classifier>> {
        match self {
            LearnerSpec::Tree(p) => boxed(fit_tree_weighted(train, weights, p, seed)),
            _ => Err(Error::WeightsUnsupported(self.name())),
        }
    }
}
