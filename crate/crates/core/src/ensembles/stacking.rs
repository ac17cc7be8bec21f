use ndarray::Array2;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::data::{Dataset, FoldPlan};
use crate::error::{Error, Result};
use crate::learners::{Classifier, Learner};
use crate::rng;

const FINAL_FIT: u64 = u64::MAX;
const META_FIT: u64 = u64::MAX - 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum StackingMode {
    /// Meta-features are predictions for rows the base model never trained on.
    #[default]
    OutOfFold,
    /// Base models are fit on the whole set and predict that same set.
    Naive,
}

/// Meta-training table: one probability column per base learner.
#[derive(Debug, Clone)]
pub struct MetaFeatures {
    pub matrix: Array2<f64>,
    pub labels: Vec<u8>,
    pub learner_names: Vec<String>,
    pub mode: StackingMode,
    /// Fold plan the columns were built with (out-of-fold mode only).
    pub plan: Option<FoldPlan>,
    /// `provenance[i][t]` is the fold whose model for learner `t` produced
    /// entry `(i, t)` (out-of-fold mode only).
    pub provenance: Vec<Vec<usize>>,
    /// Seed used for each (fold, learner) fit, indexed `[fold][learner]`.
    pub fit_seeds: Vec<Vec<u64>>,
}

impl MetaFeatures {
    /// Checks from the recorded fold assignments that no entry was produced by
    /// a model whose training indices contain that row.
    pub fn verify_no_leakage(&self) -> Result<()> {
        let plan = match (&self.mode, &self.plan) {
            (StackingMode::OutOfFold, Some(plan)) => plan,
            _ => {
                return Err(Error::Leakage {
                    row: 0,
                    learner: self.learner_names.first().cloned().unwrap_or_default(),
                    fold: 0,
                })
            }
        };
        for (row, folds) in self.provenance.iter().enumerate() {
            for (t, &fold) in folds.iter().enumerate() {
                if plan.folds[fold].train.binary_search(&row).is_ok() {
                    return Err(Error::Leakage {
                        row,
                        learner: self.learner_names[t].clone(),
                        fold,
                    });
                }
            }
        }
        Ok(())
    }
}

/// Out-of-fold meta-features: for each fold of `plan`, every base learner is
/// fit on the fold's training rows and scores the fold's held-out rows. The
/// (fold, learner) fits run in parallel, each with seed
/// `derive_seed(seed, [fold, learner])`.
pub fn build_meta_features<L: Learner>(
    bases: &[L],
    train: &Dataset,
    plan: &FoldPlan,
    seed: u64,
) -> Result<MetaFeatures> {
    if bases.is_empty() {
        return Err(Error::InvalidParameter("stacking: at least one base learner required".into()));
    }
    if plan.n_samples() != train.n_samples() {
        return Err(Error::LengthMismatch {
            left: plan.n_samples(),
            right: train.n_samples(),
        });
    }
    let n_folds = plan.folds.len();
    let t_count = bases.len();
    let fit_seeds: Vec<Vec<u64>> = (0..n_folds)
        .map(|f| (0..t_count).map(|t| rng::derive_seed(seed, &[f as u64, t as u64])).collect())
        .collect();
    let jobs: Vec<(usize, usize)> = (0..n_folds).flat_map(|f| (0..t_count).map(move |t| (f, t))).collect();
    let columns = jobs
        .par_iter()
        .map(|&(f, t)| {
            let fold = &plan.folds[f];
            let model = bases[t].fit(&train.subset(&fold.train), fit_seeds[f][t]).map_err(|e| Error::FoldFit {
                learner: bases[t].name(),
                fold: f,
                source: Box::new(e),
            })?;
            Ok(fold.test.iter().map(|&i| model.predict_proba(train.row(i))).collect::<Vec<f64>>())
        })
        .collect::<Result<Vec<_>>>()?;

    let n = train.n_samples();
    let mut matrix = Array2::zeros((n, t_count));
    let mut provenance = vec![vec![usize::MAX; t_count]; n];
    for (&(f, t), scores) in jobs.iter().zip(&columns) {
        for (&i, &p) in plan.folds[f].test.iter().zip(scores) {
            matrix[[i, t]] = p;
            provenance[i][t] = f;
        }
    }
    Ok(MetaFeatures {
        matrix,
        labels: train.labels().to_vec(),
        learner_names: bases.iter().map(|b| b.name()).collect(),
        mode: StackingMode::OutOfFold,
        plan: Some(plan.clone()),
        provenance,
        fit_seeds,
    })
}

#[derive(Debug)]
pub struct StackedModel {
    /// Base models refit on the full training set; used at inference.
    pub base_models: Vec<Box<dyn Classifier>>,
    pub meta_model: Box<dyn Classifier>,
    pub meta_name: String,
    pub meta_features: MetaFeatures,
    /// Accuracy of the meta model on its own training table.
    pub meta_training_accuracy: f64,
}

impl StackedModel {
    pub fn base_probabilities(&self, x: &[f64]) -> Vec<f64> {
        self.base_models.iter().map(|m| m.predict_proba(x)).collect()
    }
}

impl Classifier for StackedModel {
    fn predict_proba(&self, x: &[f64]) -> f64 {
        self.meta_model.predict_proba(&self.base_probabilities(x))
    }

    fn n_features(&self) -> usize {
        self.base_models[0].n_features()
    }
}

/// Stacked generalization. In out-of-fold mode the meta model is trained on
/// [`build_meta_features`] output; in naive mode on in-sample predictions of
/// the final base models.
pub fn fit_stacking<L: Learner, M: Learner>(
    bases: &[L],
    meta: &M,
    train: &Dataset,
    plan: &FoldPlan,
    mode: StackingMode,
    seed: u64,
) -> Result<StackedModel> {
    if bases.is_empty() {
        return Err(Error::InvalidParameter("stacking: at least one base learner required".into()));
    }
    let base_models = bases
        .par_iter()
        .enumerate()
        .map(|(t, b)| b.fit(train, rng::derive_seed(seed, &[FINAL_FIT, t as u64])))
        .collect::<Result<Vec<_>>>()?;
    let meta_features = match mode {
        StackingMode::OutOfFold => build_meta_features(bases, train, plan, seed)?,
        StackingMode::Naive => {
            let mut matrix = Array2::zeros((train.n_samples(), bases.len()));
            for (t, m) in base_models.iter().enumerate() {
                for i in 0..train.n_samples() {
                    matrix[[i, t]] = m.predict_proba(train.row(i));
                }
            }
            MetaFeatures {
                matrix,
                labels: train.labels().to_vec(),
                learner_names: bases.iter().map(|b| b.name()).collect(),
                mode,
                plan: None,
                provenance: Vec::new(),
                fit_seeds: Vec::new(),
            }
        }
    };
    let names: Vec<String> = (0..bases.len()).map(|t| format!("p{t}")).collect();
    let meta_train = Dataset::new(
        meta_features.matrix.clone(),
        meta_features.labels.clone(),
        names,
        train.positive_label_name().to_string(),
    )?;
    let meta_model = meta.fit(&meta_train, rng::derive_seed(seed, &[META_FIT]))?;
    let hits = (0..meta_train.n_samples())
        .filter(|&i| meta_model.predict(meta_train.row(i)) == meta_train.labels()[i])
        .count();
    Ok(StackedModel {
        base_models,
        meta_model,
        meta_name: meta.name(),
        meta_training_accuracy: hits as f64 / meta_train.n_samples() as f64,
        meta_features,
    })
}
