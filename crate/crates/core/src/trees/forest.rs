use rand::Rng as _;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::impurity::Criterion;
use super::tree::{fit_tree_weighted, DecisionTree, TreeParams};
use crate::data::Dataset;
use crate::error::{Error, Result};
use crate::learners::Classifier;
use crate::rng;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ForestParams {
    pub n_trees: usize,
    /// Features tried per split; `None` means `ceil(sqrt(p))`.
    pub max_features: Option<usize>,
    pub bootstrap: bool,
    pub tree: TreeParams,
}

impl Default for ForestParams {
    fn default() -> Self {
        ForestParams {
            n_trees: 100,
            max_features: None,
            bootstrap: true,
            tree: TreeParams {
                criterion: Criterion::Gini,
                max_depth: 16,
                min_leaf: 1,
                ..Default::default()
            },
        }
    }
}

impl ForestParams {
    pub fn resolved_max_features(&self, n_features: usize) -> usize {
        self.max_features
            .unwrap_or_else(|| (n_features as f64).sqrt().ceil() as usize)
            .clamp(1, n_features.max(1))
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ForestModel {
    trees: Vec<DecisionTree>,
    seeds: Vec<u64>,
    max_features: usize,
}

impl ForestModel {
    pub fn trees(&self) -> &[DecisionTree] {
        &self.trees
    }

    /// Seed each tree was grown with, in tree order.
    pub fn seeds(&self) -> &[u64] {
        &self.seeds
    }

    pub fn max_features(&self) -> usize {
        self.max_features
    }
}

impl Classifier for ForestModel {
    /// Mean of the per-tree leaf fractions.
    fn predict_proba(&self, x: &[f64]) -> f64 {
        let sum: f64 = self.trees.iter().map(|t| t.predict_proba(x)).sum();
        (sum / self.trees.len() as f64).clamp(0.0, 1.0)
    }

    fn n_features(&self) -> usize {
        self.trees[0].n_features()
    }
}

/// Bootstrap-resampled trees with per-split feature subsampling. Tree `b` uses
/// seed `derive_seed(seed, [b])` for both its resample and its feature draws, so
/// the fitted forest does not depend on thread scheduling.
pub fn fit_random_forest(train: &Dataset, params: &ForestParams, seed: u64) -> Result<ForestModel> {
    if params.n_trees == 0 {
        return Err(Error::InvalidParameter("forest: n_trees must be >= 1".into()));
    }
    if train.is_empty() {
        return Err(Error::Empty("training set"));
    }
    let m = params.resolved_max_features(train.n_features());
    let tree_params = TreeParams {
        max_features: Some(m),
        ..params.tree.clone()
    };
    let seeds: Vec<u64> = (0..params.n_trees as u64).map(|b| rng::derive_seed(seed, &[b])).collect();
    let n = train.n_samples();
    let trees = seeds
        .par_iter()
        .map(|&tree_seed| {
            // Bootstrap multiplicities become integer weights, so the tree sees
            // the resample without copying rows.
            let mut weights = vec![0.0; n];
            if params.bootstrap {
                let mut r = rng::stream(rng::derive_seed(tree_seed, &[0]));
                for _ in 0..n {
                    weights[r.random_range(0..n)] += 1.0;
                }
            } else {
                weights.iter_mut().for_each(|w| *w = 1.0);
            }
            let rows: Vec<usize> = (0..n).filter(|&i| weights[i] > 0.0).collect();
            let sample = train.subset(&rows);
            let w: Vec<f64> = rows.iter().map(|&i| weights[i]).collect();
            fit_tree_weighted(&sample, &w, &tree_params, tree_seed)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(ForestModel {
        trees,
        seeds,
        max_features: m,
    })
}
