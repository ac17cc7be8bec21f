use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Criterion {
    /// Information gain (ID3 / C4.5 family).
    #[default]
    Entropy,
    /// Gini impurity (CART).
    Gini,
}

impl Criterion {
    /// Impurity of a node holding (possibly weighted) class masses `w0`, `w1`.
    pub fn impurity(self, w0: f64, w1: f64) -> f64 {
        let total = w0 + w1;
        if total <= 0.0 {
            return 0.0;
        }
        let p1 = w1 / total;
        let p0 = w0 / total;
        match self {
            Criterion::Entropy => -(plogp(p0) + plogp(p1)),
            Criterion::Gini => 1.0 - (p0 * p0 + p1 * p1),
        }
    }
}

fn plogp(p: f64) -> f64 {
    if p <= 0.0 {
        0.0
    } else {
        p * p.log2()
    }
}

fn counts(labels: &[u8]) -> Result<(f64, f64)> {
    if labels.is_empty() {
        return Err(Error::Empty("label vector"));
    }
    let pos = labels.iter().filter(|&&l| l == 1).count();
    Ok(((labels.len() - pos) as f64, pos as f64))
}

/// `H = -Σ p_i log2 p_i` in bits, with `0 · log 0 = 0`.
pub fn entropy(labels: &[u8]) -> Result<f64> {
    let (w0, w1) = counts(labels)?;
    Ok(Criterion::Entropy.impurity(w0, w1))
}

/// `1 - Σ p_i²`.
pub fn gini_impurity(labels: &[u8]) -> Result<f64> {
    let (w0, w1) = counts(labels)?;
    Ok(Criterion::Gini.impurity(w0, w1))
}
