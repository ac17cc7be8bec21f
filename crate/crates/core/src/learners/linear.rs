use serde::{Deserialize, Serialize};

use super::Classifier;
use crate::data::Dataset;
use crate::error::{Error, Result};
use crate::linalg::{dot, solve};

const RIDGE_FALLBACK: f64 = 1e-8;

/// Ordinary least squares `y = a + b·x + u`, used as a classifier by clamping
/// the linear response to `[0, 1]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LinearModel {
    pub intercept: f64,
    pub coefficients: Vec<f64>,
    /// Residual variance estimate `RSS / (n - p - 1)`.
    pub residual_variance: f64,
}

impl LinearModel {
    pub fn response(&self, x: &[f64]) -> f64 {
        self.intercept + dot(&self.coefficients, x)
    }
}

impl Classifier for LinearModel {
    fn predict_proba(&self, x: &[f64]) -> f64 {
        let r = self.response(x);
        if r.is_nan() {
            return 0.5;
        }
        r.clamp(0.0, 1.0)
    }

    fn n_features(&self) -> usize {
        self.coefficients.len()
    }
}

/// Least squares via the normal equations on `[1, x]`. A singular Gram matrix
/// (e.g. duplicated columns) is retried with a `1e-8` ridge on the diagonal.
pub fn fit_linear_regression(train: &Dataset) -> Result<LinearModel> {
    let targets: Vec<f64> = train.labels().iter().map(|&l| f64::from(l)).collect();
    fit_least_squares(train, &targets)
}

pub(crate) fn fit_least_squares(train: &Dataset, targets: &[f64]) -> Result<LinearModel> {
    let n = train.n_samples();
    let p = train.n_features();
    if n < p + 1 {
        return Err(Error::TooFewSamples { needed: p + 1, found: n });
    }
    let dim = p + 1;
    let mut gram = vec![0.0; dim * dim];
    let mut rhs = vec![0.0; dim];
    let mut augmented = vec![1.0; dim];
    for (i, &y) in targets.iter().enumerate() {
        augmented[1..].copy_from_slice(train.row(i));
        for r in 0..dim {
            rhs[r] += augmented[r] * y;
            for c in r..dim {
                gram[r * dim + c] += augmented[r] * augmented[c];
            }
        }
    }
    for r in 0..dim {
        for c in 0..r {
            gram[r * dim + c] = gram[c * dim + r];
        }
    }
    let beta = match solve(gram.clone(), rhs.clone()) {
        Some(beta) => beta,
        None => {
            for d in 0..dim {
                gram[d * dim + d] += RIDGE_FALLBACK;
            }
            solve(gram, rhs).ok_or_else(|| {
                Error::InvalidParameter("normal equations singular even with ridge fallback".into())
            })?
        }
    };
    let model = LinearModel {
        intercept: beta[0],
        coefficients: beta[1..].to_vec(),
        residual_variance: 0.0,
    };
    let rss: f64 = targets
        .iter()
        .enumerate()
        .map(|(i, &y)| (y - model.response(train.row(i))).powi(2))
        .sum();
    let dof = (n - p - 1).max(1);
    Ok(LinearModel {
        residual_variance: rss / dof as f64,
        ..model
    })
}
