use rand::Rng as _;
use rayon::prelude::*;

use crate::data::Dataset;
use crate::error::{Error, Result};
use crate::learners::{Classifier, Learner};
use crate::rng;

#[derive(Debug)]
pub struct BaggedModel {
    pub models: Vec<Box<dyn Classifier>>,
    pub base_name: String,
    /// Seed of each bag, in model order.
    pub seeds: Vec<u64>,
}

impl Classifier for BaggedModel {
    /// Mean of the member probabilities.
    fn predict_proba(&self, x: &[f64]) -> f64 {
        let sum: f64 = self.models.iter().map(|m| m.predict_proba(x)).sum();
        (sum / self.models.len() as f64).clamp(0.0, 1.0)
    }

    fn n_features(&self) -> usize {
        self.models[0].n_features()
    }
}

/// Fits `n_models` copies of `base`, each on its own bootstrap resample (or on
/// the full set when `bootstrap` is false). Bag `b` draws from
/// `derive_seed(seed, [b])`.
pub fn fit_bagging<L: Learner>(
    base: &L,
    n_models: usize,
    train: &Dataset,
    bootstrap: bool,
    seed: u64,
) -> Result<BaggedModel> {
    if n_models == 0 {
        return Err(Error::InvalidParameter("bagging: n_estimators must be >= 1".into()));
    }
    if train.is_empty() {
        return Err(Error::Empty("training set"));
    }
    let n = train.n_samples();
    let seeds: Vec<u64> = (0..n_models as u64).map(|b| rng::derive_seed(seed, &[b])).collect();
    let models = seeds
        .par_iter()
        .map(|&bag_seed| {
            if !bootstrap {
                return base.fit(train, rng::derive_seed(bag_seed, &[1]));
            }
            let mut r = rng::stream(rng::derive_seed(bag_seed, &[0]));
            let mut rows: Vec<usize> = (0..n).map(|_| r.random_range(0..n)).collect();
            rows.sort_unstable();
            base.fit(&train.subset(&rows), rng::derive_seed(bag_seed, &[1]))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(BaggedModel {
        models,
        base_name: base.name(),
        seeds,
    })
}
