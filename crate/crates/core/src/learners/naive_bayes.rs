use serde::{Deserialize, Serialize};

use super::{require_both_classes, Classifier};
use crate::data::Dataset;
use crate::error::Result;

const VARIANCE_FLOOR_FRACTION: f64 = 1e-9;

/// Gaussian naive Bayes: class priors and per-class, per-feature normal
/// likelihoods, combined under conditional independence.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GaussianNbModel {
    pub priors: [f64; 2],
    pub means: [Vec<f64>; 2],
    pub variances: [Vec<f64>; 2],
}

impl GaussianNbModel {
    /// `ln P(h) + Σ ln P(d_j | h)` for both classes.
    pub fn log_joint(&self, x: &[f64]) -> [f64; 2] {
        let mut out = [0.0; 2];
        for (c, slot) in out.iter_mut().enumerate() {
            let mut acc = self.priors[c].ln();
            for ((&v, &mu), &var) in x.iter().zip(&self.means[c]).zip(&self.variances[c]) {
                let d = v - mu;
                acc -= 0.5 * (2.0 * std::f64::consts::PI * var).ln() + d * d / (2.0 * var);
            }
            *slot = acc;
        }
        out
    }

    /// `[P(h=0 | x), P(h=1 | x)]`, normalized in log space.
    pub fn posterior(&self, x: &[f64]) -> [f64; 2] {
        let [l0, l1] = self.log_joint(x);
        [1.0 / (1.0 + (l1 - l0).exp()), 1.0 / (1.0 + (l0 - l1).exp())]
    }
}

impl Classifier for GaussianNbModel {
    fn predict_proba(&self, x: &[f64]) -> f64 {
        self.posterior(x)[1]
    }

    fn n_features(&self) -> usize {
        self.means[0].len()
    }
}

/// Maximum-likelihood fit. Variances are floored at `1e-9` times the largest
/// whole-column variance (or `1e-9` if every column is constant).
pub fn fit_gaussian_nb(train: &Dataset) -> Result<GaussianNbModel> {
    require_both_classes(train)?;
    let n = train.n_samples();
    let p = train.n_features();
    let counts = train.class_counts();

    let mut largest_var: f64 = 0.0;
    for col in train.features().columns() {
        let m = col.sum() / n as f64;
        let var = col.iter().map(|v| (v - m) * (v - m)).sum::<f64>() / n as f64;
        largest_var = largest_var.max(var);
    }
    let floor = if largest_var > 0.0 {
        VARIANCE_FLOOR_FRACTION * largest_var
    } else {
        VARIANCE_FLOOR_FRACTION
    };

    let mut means = [vec![0.0; p], vec![0.0; p]];
    let mut variances = [vec![0.0; p], vec![0.0; p]];
    for (i, &label) in train.labels().iter().enumerate() {
        for (m, v) in means[label as usize].iter_mut().zip(train.row(i)) {
            *m += v;
        }
    }
    for c in 0..2 {
        for m in &mut means[c] {
            *m /= counts[c] as f64;
        }
    }
    for (i, &label) in train.labels().iter().enumerate() {
        let c = label as usize;
        for ((s, v), m) in variances[c].iter_mut().zip(train.row(i)).zip(&means[c]) {
            *s += (v - m) * (v - m);
        }
    }
    for c in 0..2 {
        for s in &mut variances[c] {
            *s = (*s / counts[c] as f64).max(floor);
        }
    }
    Ok(GaussianNbModel {
        priors: [counts[0] as f64 / n as f64, counts[1] as f64 / n as f64],
        means,
        variances,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn one_d(values: &[(f64, u8)]) -> Dataset {
        let rows: Vec<Vec<f64>> = values.iter().map(|(v, _)| vec![*v]).collect();
        let labels: Vec<u8> = values.iter().map(|(_, l)| *l).collect();
        Dataset::from_rows(&rows, &labels).unwrap()
    }

    #[test]
    fn identical_class_distributions_give_half() {
        let d = one_d(&[(1.0, 0), (3.0, 0), (1.0, 1), (3.0, 1)]);
        let m = fit_gaussian_nb(&d).unwrap();
        assert_eq!(m.predict_proba(&[2.5]), 0.5);
    }

    #[test]
    fn symmetric_means_midpoint_is_half() {
        let d = one_d(&[(-1.0, 0), (-1.0, 0), (1.0, 1), (1.0, 1)]);
        let m = fit_gaussian_nb(&d).unwrap();
        assert!((m.predict_proba(&[0.0]) - 0.5).abs() < 1e-12);
    }

    #[test]
    fn hand_computed_posterior() {
        // Class means 0 and 2, population variance 1 in both classes.
        let d = one_d(&[(-1.0, 0), (1.0, 0), (1.0, 1), (3.0, 1)]);
        let m = fit_gaussian_nb(&d).unwrap();
        assert_eq!(m.means, [vec![0.0], vec![2.0]]);
        assert_eq!(m.variances, [vec![1.0], vec![1.0]]);
        let expected = 1.0 / (1.0 + 1f64.exp());
        assert!((m.predict_proba(&[0.5]) - expected).abs() < 1e-12);
        assert!((expected - 0.2689).abs() < 1e-4);
    }

    #[test]
    fn constant_feature_uses_floor() {
        let d = Dataset::from_rows(&[vec![1.0, 0.0], vec![1.0, 1.0], vec![1.0, 5.0]], &[0, 1, 1]).unwrap();
        let m = fit_gaussian_nb(&d).unwrap();
        assert!(m.variances[0][0] > 0.0 && m.variances[1][0] > 0.0);
        let p = m.predict_proba(&[1.0, 2.0]);
        assert!((0.0..=1.0).contains(&p));
    }

    #[test]
    fn posterior_sums_to_one() {
        let d = one_d(&[(-1.0, 0), (0.3, 0), (1.0, 1), (2.2, 1), (0.1, 1)]);
        let m = fit_gaussian_nb(&d).unwrap();
        for x in [-50.0, -1.0, 0.0, 0.7, 4.0, 60.0] {
            let [a, b] = m.posterior(&[x]);
            assert!((a + b - 1.0).abs() <= 1e-12);
        }
    }
}
