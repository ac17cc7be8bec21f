use ndarray::{Array2, ArrayView2, Axis};
use serde::{Deserialize, Serialize};

use super::dataset::Dataset;
use super::schema::DatasetSchema;
use crate::error::{Error, Result};

/// Median of a non-empty slice (mean of the two middle values for even length).
pub fn median(values: &[f64]) -> Option<f64> {
    if values.is_empty() {
        return None;
    }
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let mid = v.len() / 2;
    Some(if v.len() % 2 == 0 {
        (v[mid - 1] + v[mid]) / 2.0
    } else {
        v[mid]
    })
}

/// Replaces sentinel cells with the median of the column's non-sentinel values
/// over `train_indices`. Rows outside the training set are imputed too, but
/// never contribute to the medians.
pub fn impute_missing(
    data: &Dataset,
    schema: &DatasetSchema,
    train_indices: &[usize],
) -> Result<Dataset> {
    if train_indices.is_empty() {
        return Err(Error::Empty("training indices"));
    }
    let mut features = data.features().to_owned();
    for (column, &sentinel) in &schema.sentinels {
        let Some(j) = data.feature_names().iter().position(|n| n == column) else {
            continue;
        };
        let observed: Vec<f64> = train_indices
            .iter()
            .map(|&i| features[[i, j]])
            .filter(|&v| v != sentinel)
            .collect();
        let fill = median(&observed).ok_or_else(|| Error::AllSentinel {
            column: column.clone(),
        })?;
        for v in features.column_mut(j) {
            if *v == sentinel {
                *v = fill;
            }
        }
    }
    data.with_features(features)
}

/// Per-feature z-score parameters fitted on training rows.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScalerParams {
    pub mean: Vec<f64>,
    /// Population standard deviation; zero-variance columns record 0 and are
    /// only centered.
    pub std: Vec<f64>,
}

impl ScalerParams {
    pub fn fit(features: ArrayView2<'_, f64>) -> Result<Self> {
        let n = features.nrows();
        if n == 0 {
            return Err(Error::Empty("training features"));
        }
        let mut mean = Vec::with_capacity(features.ncols());
        let mut std = Vec::with_capacity(features.ncols());
        for col in features.axis_iter(Axis(1)) {
            let m = col.sum() / n as f64;
            let var = col.iter().map(|v| (v - m) * (v - m)).sum::<f64>() / n as f64;
            mean.push(m);
            std.push(var.sqrt());
        }
        Ok(ScalerParams { mean, std })
    }

    pub fn width(&self) -> usize {
        self.mean.len()
    }

    fn scale(&self, j: usize, v: f64) -> f64 {
        let centered = v - self.mean[j];
        if self.std[j] > 0.0 {
            centered / self.std[j]
        } else {
            centered
        }
    }

    pub fn transform(&self, features: ArrayView2<'_, f64>) -> Array2<f64> {
        let mut out = features.to_owned();
        for mut row in out.rows_mut() {
            for (j, v) in row.iter_mut().enumerate() {
                *v = self.scale(j, *v);
            }
        }
        out
    }

    pub fn transform_row_into(&self, row: &[f64], out: &mut Vec<f64>) {
        out.clear();
        out.extend(row.iter().enumerate().map(|(j, &v)| self.scale(j, v)));
    }

    pub fn inverse_transform(&self, features: ArrayView2<'_, f64>) -> Array2<f64> {
        let mut out = features.to_owned();
        for mut row in out.rows_mut() {
            for (j, v) in row.iter_mut().enumerate() {
                let scale = if self.std[j] > 0.0 { self.std[j] } else { 1.0 };
                *v = *v * scale + self.mean[j];
            }
        }
        out
    }
}

/// Fits z-scoring on `train` and applies it to `train` and every dataset in
/// `others`.
pub fn standardize(
    train: &Dataset,
    others: &[Dataset],
) -> Result<(Dataset, Vec<Dataset>, ScalerParams)> {
    let params = ScalerParams::fit(train.features())?;
    let scaled_train = train.with_features(params.transform(train.features()))?;
    let scaled_others = others
        .iter()
        .map(|d| {
            if d.n_features() != params.width() {
                return Err(Error::WidthMismatch {
                    expected: params.width(),
                    found: d.n_features(),
                });
            }
            d.with_features(params.transform(d.features()))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok((scaled_train, scaled_others, params))
}
