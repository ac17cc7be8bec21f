use ndarray::Array2;
use serde::{Deserialize, Serialize};

use super::Classifier;
use crate::data::Dataset;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DistanceMetric {
    #[default]
    Euclidean,
    /// Number of coordinates that differ; meant for binary-coded features.
    Hamming,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct KnnParams {
    pub k: usize,
    pub metric: DistanceMetric,
}

impl Default for KnnParams {
    fn default() -> Self {
        KnnParams {
            k: 5,
            metric: DistanceMetric::Euclidean,
        }
    }
}

#[derive(Debug, Clone)]
pub struct KnnModel {
    features: Array2<f64>,
    labels: Vec<u8>,
    k: usize,
    metric: DistanceMetric,
}

impl KnnModel {
    pub fn k(&self) -> usize {
        self.k
    }

    fn distance(&self, a: &[f64], b: &[f64]) -> f64 {
        match self.metric {
            // Squared distance orders neighbours identically.
            DistanceMetric::Euclidean => a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum(),
            DistanceMetric::Hamming => a.iter().zip(b).filter(|(x, y)| x != y).count() as f64,
        }
    }

    /// Training-row indices of the `k` nearest neighbours, nearest first;
    /// equal distances are ordered by row index.
    pub fn neighbours(&self, x: &[f64]) -> Vec<usize> {
        let mut scored: Vec<(f64, usize)> = self
            .features
            .rows()
            .into_iter()
            .enumerate()
            .map(|(i, row)| (self.distance(x, row.as_slice().expect("standard layout")), i))
            .collect();
        let order = |a: &(f64, usize), b: &(f64, usize)| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1));
        if self.k < scored.len() {
            scored.select_nth_unstable_by(self.k - 1, order);
            scored.truncate(self.k);
        }
        scored.sort_by(order);
        scored.into_iter().map(|(_, i)| i).collect()
    }
}

impl Classifier for KnnModel {
    /// Fraction of class-1 labels among the `k` nearest training rows.
    fn predict_proba(&self, x: &[f64]) -> f64 {
        let hits = self
            .neighbours(x)
            .into_iter()
            .filter(|&i| self.labels[i] == 1)
            .count();
        hits as f64 / self.k as f64
    }

    fn n_features(&self) -> usize {
        self.features.ncols()
    }
}

pub fn fit_knn(train: &Dataset, params: &KnnParams) -> Result<KnnModel> {
    if params.k == 0 || params.k > train.n_samples() {
        return Err(Error::InvalidParameter(format!(
            "k-NN: k = {} must be in 1..={}",
            params.k,
            train.n_samples()
        )));
    }
    Ok(KnnModel {
        features: train.features().to_owned(),
        labels: train.labels().to_vec(),
        k: params.k,
        metric: params.metric,
    })
}
