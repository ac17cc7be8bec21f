use std::io::Read;
use std::path::Path;

use ndarray::{Array2, ArrayView2};
use serde::Serialize;

use super::schema::{ColumnType, DatasetSchema};
use crate::error::{Error, Result};

/// Feature matrix (rows are samples) with binary labels, 1 = condition present.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    features: Array2<f64>,
    labels: Vec<u8>,
    feature_names: Vec<String>,
    positive_label_name: String,
}

impl Dataset {
    pub fn new(
        features: Array2<f64>,
        labels: Vec<u8>,
        feature_names: Vec<String>,
        positive_label_name: impl Into<String>,
    ) -> Result<Self> {
        if features.nrows() != labels.len() {
            return Err(Error::LengthMismatch {
                left: features.nrows(),
                right: labels.len(),
            });
        }
        if feature_names.len() != features.ncols() {
            return Err(Error::LengthMismatch {
                left: feature_names.len(),
                right: features.ncols(),
            });
        }
        if let Some(bad) = labels.iter().find(|&&l| l > 1) {
            return Err(Error::InvalidParameter(format!("label {bad} is not 0 or 1")));
        }
        let features = if features.is_standard_layout() {
            features
        } else {
            features.as_standard_layout().into_owned()
        };
        Ok(Dataset {
            features,
            labels,
            feature_names,
            positive_label_name: positive_label_name.into(),
        })
    }

    /// Convenience constructor with generated feature names `x0, x1, ...`.
    pub fn from_rows(rows: &[Vec<f64>], labels: &[u8]) -> Result<Self> {
        let width = rows.first().map_or(0, Vec::len);
        if let Some(bad) = rows.iter().find(|r| r.len() != width) {
            return Err(Error::WidthMismatch {
                expected: width,
                found: bad.len(),
            });
        }
        let flat: Vec<f64> = rows.iter().flatten().copied().collect();
        let features = Array2::from_shape_vec((rows.len(), width), flat)
            .map_err(|e| Error::InvalidParameter(e.to_string()))?;
        let names = (0..width).map(|j| format!("x{j}")).collect();
        Dataset::new(features, labels.to_vec(), names, "positive")
    }

    pub fn features(&self) -> ArrayView2<'_, f64> {
        self.features.view()
    }

    pub fn labels(&self) -> &[u8] {
        &self.labels
    }

    pub fn feature_names(&self) -> &[String] {
        &self.feature_names
    }

    pub fn positive_label_name(&self) -> &str {
        &self.positive_label_name
    }

    pub fn n_samples(&self) -> usize {
        self.labels.len()
    }

    pub fn n_features(&self) -> usize {
        self.features.ncols()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn row(&self, i: usize) -> &[f64] {
        self.features
            .row(i)
            .to_slice()
            .expect("features are kept in standard layout")
    }

    /// `[negatives, positives]`
    pub fn class_counts(&self) -> [usize; 2] {
        let pos = self.labels.iter().filter(|&&l| l == 1).count();
        [self.labels.len() - pos, pos]
    }

    pub fn subset(&self, indices: &[usize]) -> Dataset {
        let features = self.features.select(ndarray::Axis(0), indices);
        Dataset {
            features,
            labels: indices.iter().map(|&i| self.labels[i]).collect(),
            feature_names: self.feature_names.clone(),
            positive_label_name: self.positive_label_name.clone(),
        }
    }

    /// Same labels and metadata, new feature matrix of identical shape.
    pub fn with_features(&self, features: Array2<f64>) -> Result<Dataset> {
        if features.dim() != self.features.dim() {
            return Err(Error::WidthMismatch {
                expected: self.n_features(),
                found: features.ncols(),
            });
        }
        Dataset::new(
            features,
            self.labels.clone(),
            self.feature_names.clone(),
            self.positive_label_name.clone(),
        )
    }

    /// Labels flipped 0 <-> 1.
    pub fn with_swapped_labels(&self) -> Dataset {
        let mut out = self.clone();
        for l in &mut out.labels {
            *l = 1 - *l;
        }
        out
    }
}

pub fn load_csv(path: impl AsRef<Path>, schema: &DatasetSchema) -> Result<Dataset> {
    let path = path.as_ref();
    let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
    load_reader(file, &path.display().to_string(), schema)
}

/// Parses an in-memory CSV document (e.g. a bundled dataset).
pub fn load_csv_bytes(bytes: &[u8], source: &str, schema: &DatasetSchema) -> Result<Dataset> {
    load_reader(bytes, source, schema)
}

fn load_reader<R: Read>(reader: R, source: &str, schema: &DatasetSchema) -> Result<Dataset> {
    schema.validate()?;
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(schema.header)
        .delimiter(schema.delimiter)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(reader);

    let width = schema.columns.len();
    if schema.header {
        let header = rdr.headers().map_err(|e| csv_error(source, e))?;
        if header.len() != width {
            return Err(Error::RowArity {
                row: 1,
                expected: width,
                found: header.len(),
            });
        }
        for (got, want) in header.iter().zip(&schema.columns) {
            if got != want.name {
                return Err(Error::Schema(format!(
                    "{source}: header column '{got}' where schema expects '{}'",
                    want.name
                )));
            }
        }
    }

    let label_idx = schema.label_index();
    let feature_idx: Vec<usize> = schema
        .columns
        .iter()
        .enumerate()
        .filter(|(_, c)| c.name != schema.label && !schema.drop.contains(&c.name))
        .map(|(i, _)| i)
        .collect();

    let mut flat = Vec::new();
    let mut labels = Vec::new();
    for record in rdr.records() {
        let record = record.map_err(|e| csv_error(source, e))?;
        let row = record.position().map_or(0, |p| p.line() as usize);
        if record.len() == 1 && record.get(0).is_some_and(str::is_empty) {
            continue;
        }
        if record.len() != width {
            return Err(Error::RowArity {
                row,
                expected: width,
                found: record.len(),
            });
        }
        let raw_label = &record[label_idx];
        let label = schema.code_label(raw_label).ok_or_else(|| Error::UnknownLabel {
            row,
            value: raw_label.to_string(),
        })?;
        labels.push(label);
        for &j in &feature_idx {
            let col = &schema.columns[j];
            flat.push(parse_cell(&record[j], col.kind, row, &col.name)?);
        }
    }
    if labels.is_empty() {
        return Err(Error::EmptyFile(source.to_string()));
    }
    let n = labels.len();
    let features = Array2::from_shape_vec((n, feature_idx.len()), flat)
        .expect("row arity checked above");
    let names = feature_idx
        .iter()
        .map(|&j| schema.columns[j].name.clone())
        .collect();
    Dataset::new(features, labels, names, schema.positive_name.clone())
}

fn parse_cell(cell: &str, kind: ColumnType, row: usize, column: &str) -> Result<f64> {
    let err = |message: String| Error::Parse {
        row,
        column: column.to_string(),
        message,
    };
    let value: f64 = cell
        .parse()
        .map_err(|_| err(format!("'{cell}' is not a number")))?;
    if !value.is_finite() {
        return Err(err(format!("'{cell}' is not finite")));
    }
    match kind {
        ColumnType::Real => {}
        ColumnType::Integer | ColumnType::Categorical => {
            if value.fract() != 0.0 {
                return Err(err(format!("'{cell}' is not an integer")));
            }
        }
        ColumnType::Binary => {
            if value != 0.0 && value != 1.0 {
                return Err(err(format!("'{cell}' is not 0 or 1")));
            }
        }
        ColumnType::Text => unreachable!("text feature columns are rejected by validate"),
    }
    Ok(value)
}

fn csv_error(source: &str, e: csv::Error) -> Error {
    let row = e.position().map_or(0, |p| p.line() as usize);
    Error::Parse {
        row,
        column: String::new(),
        message: format!("{source}: {e}"),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ClassDistribution {
    pub negative: usize,
    pub positive: usize,
    pub majority_rate: f64,
}

pub fn class_distribution(data: &Dataset) -> Result<ClassDistribution> {
    if data.is_empty() {
        return Err(Error::Empty("dataset"));
    }
    let [negative, positive] = data.class_counts();
    Ok(ClassDistribution {
        negative,
        positive,
        majority_rate: negative.max(positive) as f64 / data.n_samples() as f64,
    })
}
