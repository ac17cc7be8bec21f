use serde::{Deserialize, Serialize};

use super::confusion::rate;
use crate::error::{Error, Result};

/// Points of the threshold sweep. `thresholds[i]` produced `(fpr[i], tpr[i])`;
/// the first threshold is `+inf` (nothing predicted positive).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RocCurve {
    pub thresholds: Vec<f64>,
    pub fpr: Vec<f64>,
    pub tpr: Vec<f64>,
}

impl RocCurve {
    pub fn points(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.fpr.iter().copied().zip(self.tpr.iter().copied())
    }
}

/// A row is predicted positive at threshold `t` when its score is `>= t`.
/// Tied scores enter the positive set together, producing one (possibly
/// diagonal) step.
pub fn roc_curve(scores: &[f64], actual: &[u8]) -> Result<RocCurve> {
    if scores.len() != actual.len() {
        return Err(Error::LengthMismatch {
            left: scores.len(),
            right: actual.len(),
        });
    }
    if scores.iter().any(|s| s.is_nan()) {
        return Err(Error::InvalidParameter("roc: scores contain NaN".into()));
    }
    let positives = actual.iter().filter(|&&y| y == 1).count();
    let negatives = actual.len() - positives;
    if positives == 0 || negatives == 0 {
        return Err(Error::SingleClass);
    }
    let mut order: Vec<usize> = (0..scores.len()).collect();
    order.sort_by(|&a, &b| scores[b].total_cmp(&scores[a]));

    let mut curve = RocCurve {
        thresholds: vec![f64::INFINITY],
        fpr: vec![0.0],
        tpr: vec![0.0],
    };
    let (mut tp, mut fp) = (0usize, 0usize);
    let mut i = 0;
    while i < order.len() {
        let threshold = scores[order[i]];
        while i < order.len() && scores[order[i]] == threshold {
            if actual[order[i]] == 1 {
                tp += 1;
            } else {
                fp += 1;
            }
            i += 1;
        }
        curve.thresholds.push(threshold);
        curve.fpr.push(rate(fp, negatives).unwrap_or(0.0));
        curve.tpr.push(rate(tp, positives).unwrap_or(0.0));
    }
    Ok(curve)
}

/// Trapezoidal area under the curve.
pub fn auc(curve: &RocCurve) -> f64 {
    let area: f64 = curve
        .fpr
        .windows(2)
        .zip(curve.tpr.windows(2))
        .map(|(x, y)| (x[1] - x[0]) * (y[1] + y[0]) / 2.0)
        .sum();
    area.clamp(0.0, 1.0)
}

pub fn roc_auc(scores: &[f64], actual: &[u8]) -> Result<f64> {
    Ok(auc(&roc_curve(scores, actual)?))
}
