use ndarray::ArrayView2;
use serde::{Deserialize, Serialize};

use super::{require_both_classes, Classifier};
use crate::data::Dataset;
use crate::error::{Error, Result};
use crate::linalg::{dot, sigmoid, softplus};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LogisticParams {
    pub lr: f64,
    pub epochs: usize,
    pub l2: f64,
}

impl Default for LogisticParams {
    fn default() -> Self {
        LogisticParams {
            lr: 0.1,
            epochs: 1000,
            l2: 1e-4,
        }
    }
}

/// `logit(p) = b0 + b·x`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LogisticModel {
    pub intercept: f64,
    pub coefficients: Vec<f64>,
    /// Objective value before each epoch, followed by the final value.
    pub loss_trace: Vec<f64>,
}

impl LogisticModel {
    pub fn zeros(width: usize) -> Self {
        LogisticModel {
            intercept: 0.0,
            coefficients: vec![0.0; width],
            loss_trace: Vec::new(),
        }
    }

    pub fn logit(&self, x: &[f64]) -> f64 {
        self.intercept + dot(&self.coefficients, x)
    }
}

impl Classifier for LogisticModel {
    fn predict_proba(&self, x: &[f64]) -> f64 {
        sigmoid(self.logit(x))
    }

    fn n_features(&self) -> usize {
        self.coefficients.len()
    }
}

/// Mean negative log-likelihood plus `(l2 / 2)·|b|²` (the intercept is not
/// penalized), with its gradient `(d/d b0, d/d b)`.
pub fn logistic_loss_and_gradient(
    features: ArrayView2<'_, f64>,
    labels: &[u8],
    intercept: f64,
    coefficients: &[f64],
    l2: f64,
) -> (f64, f64, Vec<f64>) {
    let n = labels.len() as f64;
    let mut loss = 0.0;
    let mut g0 = 0.0;
    let mut g = vec![0.0; coefficients.len()];
    for (row, &y) in features.rows().into_iter().zip(labels) {
        let z = intercept + row.iter().zip(coefficients).map(|(x, b)| x * b).sum::<f64>();
        let y = f64::from(y);
        loss += softplus(z) - y * z;
        let residual = sigmoid(z) - y;
        g0 += residual;
        for (gj, xj) in g.iter_mut().zip(row.iter()) {
            *gj += residual * xj;
        }
    }
    loss /= n;
    g0 /= n;
    for (gj, bj) in g.iter_mut().zip(coefficients) {
        *gj = *gj / n + l2 * bj;
    }
    loss += 0.5 * l2 * dot(coefficients, coefficients);
    (loss, g0, g)
}

/// Full-batch gradient descent from zero initialization.
pub fn fit_logistic_regression(train: &Dataset, params: &LogisticParams) -> Result<LogisticModel> {
    require_both_classes(train)?;
    if !(params.lr > 0.0) || params.l2 < 0.0 {
        return Err(Error::InvalidParameter("logistic: lr must be > 0 and l2 >= 0".into()));
    }
    let mut model = LogisticModel::zeros(train.n_features());
    let mut trace = Vec::with_capacity(params.epochs + 1);
    for epoch in 0..params.epochs {
        let (loss, g0, g) = logistic_loss_and_gradient(
            train.features(),
            train.labels(),
            model.intercept,
            &model.coefficients,
            params.l2,
        );
        if !loss.is_finite() {
            return Err(Error::NonFiniteLoss { epoch });
        }
        trace.push(loss);
        model.intercept -= params.lr * g0;
        for (b, gj) in model.coefficients.iter_mut().zip(&g) {
            *b -= params.lr * gj;
        }
    }
    let (loss, _, _) = logistic_loss_and_gradient(
        train.features(),
        train.labels(),
        model.intercept,
        &model.coefficients,
        params.l2,
    );
    trace.push(loss);
    model.loss_trace = trace;
    Ok(model)
}
