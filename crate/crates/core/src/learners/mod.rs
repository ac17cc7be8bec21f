//! The classifier contract and the non-tree base learners.
//!
//! A [`Learner`] is a configured, unfitted algorithm; fitting it on a
//! [`Dataset`] yields a boxed [`Classifier`]. Every classifier reports the
//! probability of class 1 and predicts class 1 exactly when that probability is
//! at least 0.5 (ties go to class 1).

mod knn;
mod linear;
mod logistic;
mod naive_bayes;
mod svm;

use std::fmt::Debug;

use ndarray::ArrayView2;

pub use knn::{fit_knn, DistanceMetric, KnnModel, KnnParams};
pub use linear::{fit_linear_regression, LinearModel};
pub use logistic::{fit_logistic_regression, logistic_loss_and_gradient, LogisticModel, LogisticParams};
pub use naive_bayes::{fit_gaussian_nb, GaussianNbModel};
pub use svm::{fit_linear_svm, svm_objective, svm_subgradient, LinearSvmModel, SvmParams};

use crate::data::{Dataset, ScalerParams};
use crate::error::{Error, Result};

pub const DECISION_THRESHOLD: f64 = 0.5;

pub trait Classifier: Send + Sync + Debug {
    /// Probability of class 1, always within `[0, 1]`.
    fn predict_proba(&self, x: &[f64]) -> f64;

    /// Width of the feature rows this model was fitted on.
    fn n_features(&self) -> usize;

    fn predict(&self, x: &[f64]) -> u8 {
        u8::from(self.predict_proba(x) >= DECISION_THRESHOLD)
    }

    fn predict_proba_batch(&self, features: ArrayView2<'_, f64>) -> Vec<f64> {
        features
            .rows()
            .into_iter()
            .map(|row| match row.as_slice() {
                Some(s) => self.predict_proba(s),
                None => self.predict_proba(&row.to_vec()),
            })
            .collect()
    }

    fn checked_predict_proba(&self, x: &[f64]) -> Result<f64> {
        if x.len() != self.n_features() {
            return Err(Error::WidthMismatch {
                expected: self.n_features(),
                found: x.len(),
            });
        }
        Ok(self.predict_proba(x))
    }
}

pub trait Learner: Send + Sync {
    fn name(&self) -> String;

    fn fit(&self, train: &Dataset, seed: u64) -> Result<Box<dyn Classifier>>;

    fn supports_weights(&self) -> bool {
        false
    }

    /// Fit with per-instance weights (non-negative, summing to 1).
    fn fit_weighted(
        &self,
        _train: &Dataset,
        _weights: &[f64],
        _seed: u64,
    ) -> Result<Box<dyn Classifier>> {
        Err(Error::WeightsUnsupported(self.name()))
    }
}

impl<L: Learner + ?Sized> Learner for &L {
    fn name(&self) -> String {
        (**self).name()
    }
    fn fit(&self, train: &Dataset, seed: u64) -> Result<Box<dyn Classifier>> {
        (**self).fit(train, seed)
    }
    fn supports_weights(&self) -> bool {
        (**self).supports_weights()
    }
    fn fit_weighted(&self, train: &Dataset, weights: &[f64], seed: u64) -> Result<Box<dyn Classifier>> {
        (**self).fit_weighted(train, weights, seed)
    }
}

/// A model fitted on z-scored features; rescales incoming rows with the
/// training-fold parameters before delegating.
#[derive(Debug)]
pub struct Standardized {
    pub scaler: ScalerParams,
    pub inner: Box<dyn Classifier>,
}

impl Standardized {
    pub fn fit_with<F>(train: &Dataset, fit: F) -> Result<Self>
    where
        F: FnOnce(&Dataset) -> Result<Box<dyn Classifier>>,
    {
        let scaler = ScalerParams::fit(train.features())?;
        let scaled = train.with_features(scaler.transform(train.features()))?;
        Ok(Standardized {
            inner: fit(&scaled)?,
            scaler,
        })
    }
}

impl Classifier for Standardized {
    fn predict_proba(&self, x: &[f64]) -> f64 {
        let mut buf = Vec::with_capacity(x.len());
        self.scaler.transform_row_into(x, &mut buf);
        self.inner.predict_proba(&buf)
    }

    fn n_features(&self) -> usize {
        self.scaler.width()
    }

    fn predict_proba_batch(&self, features: ArrayView2<'_, f64>) -> Vec<f64> {
        self.inner.predict_proba_batch(self.scaler.transform(features).view())
    }
}

/// Majority-class baseline: predicts the training positive rate for every row.
#[derive(Debug, Clone)]
pub struct PriorModel {
    pub positive_rate: f64,
    pub width: usize,
}

impl PriorModel {
    pub fn fit(train: &Dataset) -> Result<Self> {
        if train.is_empty() {
            return Err(Error::Empty("training set"));
        }
        let [_, pos] = train.class_counts();
        Ok(PriorModel {
            positive_rate: pos as f64 / train.n_samples() as f64,
            width: train.n_features(),
        })
    }
}

impl Classifier for PriorModel {
    fn predict_proba(&self, _x: &[f64]) -> f64 {
        self.positive_rate
    }

    fn n_features(&self) -> usize {
        self.width
    }
}

pub(crate) fn require_both_classes(train: &Dataset) -> Result<()> {
    let [neg, pos] = train.class_counts();
    if neg == 0 || pos == 0 {
        return Err(Error::SingleClass);
    }
    Ok(())
}
