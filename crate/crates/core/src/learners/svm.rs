use serde::{Deserialize, Serialize};

use super::{require_both_classes, Classifier};
use crate::data::Dataset;
use crate::error::{Error, Result};
use crate::linalg::{dot, sigmoid};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SvmParams {
    pub c: f64,
    pub epochs: usize,
    /// Initial step size.
    pub lr: f64,
    /// Step at iteration t is `lr / (1 + lr_decay * t)`.
    pub lr_decay: f64,
}

impl Default for SvmParams {
    fn default() -> Self {
        SvmParams {
            c: 1.0,
            epochs: 1000,
            lr: 0.1,
            lr_decay: 0.01,
        }
    }
}

/// Linear soft-margin SVM. Probabilities are the logistic function of the
/// signed margin, which is monotone in the margin but not calibrated.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LinearSvmModel {
    pub weights: Vec<f64>,
    pub bias: f64,
    pub c: f64,
    /// Primal objective of the returned iterate.
    pub objective: f64,
}

impl LinearSvmModel {
    pub fn margin(&self, x: &[f64]) -> f64 {
        dot(&self.weights, x) + self.bias
    }
}

impl Classifier for LinearSvmModel {
    fn predict_proba(&self, x: &[f64]) -> f64 {
        sigmoid(self.margin(x))
    }

    fn n_features(&self) -> usize {
        self.weights.len()
    }
}

fn signed(label: u8) -> f64 {
    if label == 1 {
        1.0
    } else {
        -1.0
    }
}

/// `½|w|² + C Σ max(0, 1 - y_i (w·x_i + b))` with `y_i ∈ {-1, +1}`.
pub fn svm_objective(data: &Dataset, weights: &[f64], bias: f64, c: f64) -> f64 {
    let hinge: f64 = data
        .labels()
        .iter()
        .enumerate()
        .map(|(i, &l)| (1.0 - signed(l) * (dot(weights, data.row(i)) + bias)).max(0.0))
        .sum();
    0.5 * dot(weights, weights) + c * hinge
}

/// A subgradient of [`svm_objective`]; exact gradient wherever no sample sits
/// on the hinge (margin exactly 1). Returns `(d/dw, d/db)`.
pub fn svm_subgradient(data: &Dataset, weights: &[f64], bias: f64, c: f64) -> (Vec<f64>, f64) {
    let mut gw = weights.to_vec();
    let mut gb = 0.0;
    for (i, &l) in data.labels().iter().enumerate() {
        let y = signed(l);
        let x = data.row(i);
        if y * (dot(weights, x) + bias) < 1.0 {
            for (g, xj) in gw.iter_mut().zip(x) {
                *g -= c * y * xj;
            }
            gb -= c * y;
        }
    }
    (gw, gb)
}

/// Deterministic full-batch subgradient descent. Steps are taken on the
/// objective divided by `C·n` (same minimizer, step sizes independent of the
/// sample count); the iterate with the lowest objective is returned, since
/// subgradient steps do not decrease the objective monotonically.
pub fn fit_linear_svm(train: &Dataset, params: &SvmParams) -> Result<LinearSvmModel> {
    require_both_classes(train)?;
    if !(params.c > 0.0) {
        return Err(Error::InvalidParameter(format!("SVM: C must be > 0, got {}", params.c)));
    }
    if !(params.lr > 0.0) || params.lr_decay < 0.0 {
        return Err(Error::InvalidParameter("SVM: lr must be > 0 and lr_decay >= 0".into()));
    }
    let scale = 1.0 / (params.c * train.n_samples() as f64);
    let mut w = vec![0.0; train.n_features()];
    let mut b = 0.0;
    let mut best = (svm_objective(train, &w, b, params.c), w.clone(), b);
    for t in 0..params.epochs {
        let (gw, gb) = svm_subgradient(train, &w, b, params.c);
        let step = params.lr / (1.0 + params.lr_decay * t as f64) * scale;
        for (wj, g) in w.iter_mut().zip(&gw) {
            *wj -= step * g;
        }
        b -= step * gb;
        let obj = svm_objective(train, &w, b, params.c);
        if !obj.is_finite() {
            return Err(Error::NonFiniteLoss { epoch: t });
        }
        if obj < best.0 {
            best = (obj, w.clone(), b);
        }
    }
    let (objective, weights, bias) = best;
    Ok(LinearSvmModel {
        weights,
        bias,
        c: params.c,
        objective,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn separable() -> Dataset {
        let mut rows = Vec::new();
        let mut labels = Vec::new();
        for _ in 0..10 {
            rows.push(vec![-1.0]);
            labels.push(0);
            rows.push(vec![1.0]);
            labels.push(1);
        }
        Dataset::from_rows(&rows, &labels).unwrap()
    }

    #[test]
    fn separable_set_reaches_zero_hinge() {
        let d = separable();
        let params = SvmParams {
            c: 100.0,
            ..Default::default()
        };
        let m = fit_linear_svm(&d, &params).unwrap();
        let hinge = m.objective - 0.5 * dot(&m.weights, &m.weights);
        assert_eq!(hinge, 0.0);
        assert!((0..d.n_samples()).all(|i| m.predict(d.row(i)) == d.labels()[i]));
    }

    #[test]
    fn zero_model_predicts_half() {
        let m = LinearSvmModel {
            weights: vec![0.0, 0.0],
            bias: 0.0,
            c: 1.0,
            objective: 0.0,
        };
        assert_eq!(m.predict_proba(&[3.0, -4.0]), 0.5);
    }

    #[test]
    fn rescaling_features_against_weights_keeps_margins() {
        let m = LinearSvmModel {
            weights: vec![0.7, -1.3],
            bias: 0.2,
            c: 1.0,
            objective: 0.0,
        };
        let halved = LinearSvmModel {
            weights: m.weights.iter().map(|w| w / 2.0).collect(),
            ..m.clone()
        };
        for x in [[1.0, 2.0], [-0.5, 0.25], [3.0, 3.0]] {
            let doubled = [2.0 * x[0], 2.0 * x[1]];
            assert_eq!(m.margin(&x), halved.margin(&doubled));
            assert_eq!(m.predict(&x), halved.predict(&doubled));
        }
    }

    #[test]
    fn rejects_bad_inputs() {
        let d = separable();
        let bad_c = SvmParams {
            c: 0.0,
            ..Default::default()
        };
        assert!(matches!(fit_linear_svm(&d, &bad_c), Err(Error::InvalidParameter(_))));
        let one_class = Dataset::from_rows(&[vec![1.0], vec![2.0]], &[0, 0]).unwrap();
        assert!(matches!(
            fit_linear_svm(&one_class, &SvmParams::default()),
            Err(Error::SingleClass)
        ));
    }
}
