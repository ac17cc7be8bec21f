use crate::data::Dataset;
use crate::error::{Error, Result};
use crate::learners::{Classifier, Learner};
use crate::linalg::sigmoid;
use crate::rng;

/// Weighted errors below this are clamped before computing the stage weight.
pub const EPSILON_FLOOR: f64 = 1e-10;

/// `0.5 * ln((1 - e) / e)` with `e` clamped to `[EPSILON_FLOOR, 1 - EPSILON_FLOOR]`.
pub fn stage_weight(error: f64) -> f64 {
    let e = error.clamp(EPSILON_FLOOR, 1.0 - EPSILON_FLOOR);
    0.5 * ((1.0 - e) / e).ln()
}

#[derive(Debug)]
pub struct AdaBoostModel {
    /// `(alpha_t, f_t)` in fitting order.
    pub stages: Vec<(f64, Box<dyn Classifier>)>,
    pub weak_name: String,
    /// Weighted training error of each stage's weak model.
    pub stage_errors: Vec<f64>,
}

impl AdaBoostModel {
    /// `F(x) = sum alpha_t f_t(x)` with `f_t` in {-1, +1}.
    pub fn score(&self, x: &[f64]) -> f64 {
        self.stages
            .iter()
            .map(|(alpha, f)| if f.predict(x) == 1 { *alpha } else { -*alpha })
            .sum()
    }

    /// `prod_t 2 sqrt(e_t (1 - e_t))`, the bound on training error after
    /// every stage.
    pub fn exp_loss_bound(&self) -> f64 {
        self.stage_errors
            .iter()
            .map(|&e| {
                let e = e.clamp(EPSILON_FLOOR, 1.0 - EPSILON_FLOOR);
                2.0 * (e * (1.0 - e)).sqrt()
            })
            .product()
    }
}

impl Classifier for AdaBoostModel {
    fn predict_proba(&self, x: &[f64]) -> f64 {
        sigmoid(self.score(x))
    }

    fn n_features(&self) -> usize {
        self.stages[0].1.n_features()
    }
}

pub struct BoostRound {
    pub model: Box<dyn Classifier>,
    pub error: f64,
    pub alpha: f64,
    /// Instance weights for the next round, normalized to sum 1.
    pub next_weights: Vec<f64>,
}

/// One boosting stage: fit the weak learner under `weights`, measure its
/// weighted error, and reweight (misclassified rows by `exp(alpha)`, correct
/// rows by `exp(-alpha)`, then normalize).
pub fn adaboost_round<L: Learner>(
    weak: &L,
    train: &Dataset,
    weights: &[f64],
    seed: u64,
) -> Result<BoostRound> {
    let model = weak.fit_weighted(train, weights, seed)?;
    let wrong: Vec<bool> = (0..train.n_samples())
        .map(|i| model.predict(train.row(i)) != train.labels()[i])
        .collect();
    let error: f64 = weights.iter().zip(&wrong).filter(|(_, &w)| w).map(|(p, _)| p).sum();
    let alpha = stage_weight(error);
    let up = alpha.exp();
    let down = (-alpha).exp();
    let mut next: Vec<f64> = weights
        .iter()
        .zip(&wrong)
        .map(|(&w, &miss)| w * if miss { up } else { down })
        .collect();
    let total: f64 = next.iter().sum();
    next.iter_mut().for_each(|w| *w /= total);
    Ok(BoostRound {
        model,
        error,
        alpha,
        next_weights: next,
    })
}

/// Discrete AdaBoost for up to `rounds` stages. Stops before adding a stage
/// whose weighted error is at least 0.5, and after adding one whose error is
/// at or below [`EPSILON_FLOOR`].
pub fn fit_adaboost<L: Learner>(weak: &L, rounds: usize, train: &Dataset, seed: u64) -> Result<AdaBoostModel> {
    if rounds == 0 {
        return Err(Error::InvalidParameter("boosting: rounds must be >= 1".into()));
    }
    if !weak.supports_weights() {
        return Err(Error::WeightsUnsupported(weak.name()));
    }
    if train.is_empty() {
        return Err(Error::Empty("training set"));
    }
    let n = train.n_samples();
    let mut weights = vec![1.0 / n as f64; n];
    let mut model = AdaBoostModel {
        stages: Vec::new(),
        weak_name: weak.name(),
        stage_errors: Vec::new(),
    };
    for t in 0..rounds {
        let round = adaboost_round(weak, train, &weights, rng::derive_seed(seed, &[t as u64]))?;
        if round.error >= 0.5 {
            if t == 0 {
                return Err(Error::NoBoostableStage { error: round.error });
            }
            break;
        }
        model.stages.push((round.alpha, round.model));
        model.stage_errors.push(round.error);
        if round.error <= EPSILON_FLOOR {
            break;
        }
        weights = round.next_weights;
    }
    Ok(model)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn stage_weight_values() {
        assert!((stage_weight(0.25) - 0.549306).abs() < 1e-6);
        assert_eq!(stage_weight(0.5), 0.0);
        assert!(stage_weight(0.0).is_finite());
        assert_eq!(stage_weight(0.0), stage_weight(EPSILON_FLOOR));
    }
}
