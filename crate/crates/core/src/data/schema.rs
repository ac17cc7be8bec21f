use std::collections::BTreeMap;
use std::path::Path;

use serde::Deserialize;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ColumnType {
    Integer,
    Real,
    Binary,
    #[serde(alias = "categorical-coded")]
    Categorical,
    /// Free text. Only valid for the label column and dropped columns.
    Text,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ColumnSpec {
    pub name: String,
    pub kind: ColumnType,
}

/// Column layout of a binary-class CSV file.
///
/// `columns` lists every column in file order, including the label and any
/// dropped identifier columns. Label strings are mapped to `{0, 1}` through
/// `coding`; a cell equal to a column's entry in `sentinels` is treated as
/// missing and left for [`impute_missing`](super::impute_missing).
#[derive(Debug, Clone, PartialEq)]
pub struct DatasetSchema {
    pub name: String,
    pub header: bool,
    pub delimiter: u8,
    pub columns: Vec<ColumnSpec>,
    pub label: String,
    pub coding: BTreeMap<String, u8>,
    pub positive_name: String,
    pub sentinels: BTreeMap<String, f64>,
    pub drop: Vec<String>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSchema {
    name: String,
    #[serde(default = "default_true")]
    header: bool,
    #[serde(default = "default_delimiter")]
    delimiter: String,
    columns: Vec<String>,
    types: Vec<ColumnType>,
    label: String,
    coding: BTreeMap<String, u8>,
    #[serde(default = "default_positive")]
    positive: String,
    #[serde(default)]
    sentinels: BTreeMap<String, f64>,
    #[serde(default)]
    drop: Vec<String>,
}

fn default_true() -> bool {
    true
}

fn default_delimiter() -> String {
    ",".to_string()
}

fn default_positive() -> String {
    "positive".to_string()
}

impl DatasetSchema {
    /// Parses a schema file. Keys: `name`, `header`, `delimiter`, `columns`,
    /// `types`, `label`, `positive`, `drop`, and the tables `[coding]` and
    /// `[sentinels]`.
    pub fn from_toml_str(text: &str) -> Result<Self> {
        let raw: RawSchema =
            toml::from_str(text).map_err(|e| Error::Schema(format!("schema file: {e}")))?;
        if raw.columns.len() != raw.types.len() {
            return Err(Error::Schema(format!(
                "{} columns but {} types",
                raw.columns.len(),
                raw.types.len()
            )));
        }
        let delimiter = match raw.delimiter.as_str() {
            "\\t" | "\t" => b'\t',
            d if d.len() == 1 => d.as_bytes()[0],
            d => return Err(Error::Schema(format!("delimiter must be one byte, got '{d}'"))),
        };
        let columns = raw
            .columns
            .into_iter()
            .zip(raw.types)
            .map(|(name, kind)| ColumnSpec { name, kind })
            .collect();
        let schema = DatasetSchema {
            name: raw.name,
            header: raw.header,
            delimiter,
            columns,
            label: raw.label,
            coding: raw.coding,
            positive_name: raw.positive,
            sentinels: raw.sentinels,
            drop: raw.drop,
        };
        schema.validate()?;
        Ok(schema)
    }

    pub fn from_file(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_toml_str(&text)
    }

    pub fn validate(&self) -> Result<()> {
        let mut seen = std::collections::BTreeSet::new();
        for col in &self.columns {
            if !seen.insert(col.name.as_str()) {
                return Err(Error::Schema(format!("duplicate column '{}'", col.name)));
            }
        }
        let label_count = self.columns.iter().filter(|c| c.name == self.label).count();
        if label_count != 1 {
            return Err(Error::Schema(format!(
                "label column '{}' must appear exactly once",
                self.label
            )));
        }
        for name in self.sentinels.keys().chain(self.drop.iter()) {
            if !seen.contains(name.as_str()) {
                return Err(Error::Schema(format!("'{name}' is not a declared column")));
            }
        }
        if self.sentinels.contains_key(&self.label) || self.drop.contains(&self.label) {
            return Err(Error::Schema("the label column cannot be dropped or carry a sentinel".into()));
        }
        for col in self.feature_columns() {
            if col.kind == ColumnType::Text {
                return Err(Error::Schema(format!(
                    "feature column '{}' is text; only the label or dropped columns may be",
                    col.name
                )));
            }
        }
        let mut codes: Vec<u8> = self.coding.values().copied().collect();
        codes.sort_unstable();
        codes.dedup();
        if codes != [0, 1] {
            return Err(Error::Schema("label coding must map onto both 0 and 1 and nothing else".into()));
        }
        if self.feature_columns().next().is_none() {
            return Err(Error::Schema("no feature columns".into()));
        }
        Ok(())
    }

    pub fn feature_columns(&self) -> impl Iterator<Item = &ColumnSpec> {
        self.columns
            .iter()
            .filter(|c| c.name != self.label && !self.drop.contains(&c.name))
    }

    pub fn label_index(&self) -> usize {
        self.columns.iter().position(|c| c.name == self.label).expect("validated")
    }

    /// Maps a raw label cell to 0/1. Numeric spellings such as `1.0` match a
    /// key `1`.
    pub fn code_label(&self, value: &str) -> Option<u8> {
        let value = value.trim();
        if let Some(&code) = self.coding.get(value) {
            return Some(code);
        }
        let numeric: f64 = value.parse().ok()?;
        self.coding
            .iter()
            .find(|(k, _)| k.parse::<f64>().map(|v| v == numeric).unwrap_or(false))
            .map(|(_, &code)| code)
    }

    /// Built-in schemas: `pima`, `wdbc`, `statlog-heart` (the bundled files),
    /// plus `pima-uci`, `wdbc-uci`, `statlog-heart-uci` for the headerless
    /// original distributions.
    pub fn builtin(name: &str) -> Option<Self> {
        let schema = match name {
            "pima" => pima(true),
            "pima-uci" => pima(false),
            "wdbc" => wdbc(false),
            "wdbc-uci" => wdbc(true),
            "statlog-heart" => heart(true),
            "statlog-heart-uci" => heart(false),
            _ => return None,
        };
        schema.validate().expect("built-in schema is valid");
        Some(schema)
    }

    pub fn builtin_names() -> &'static [&'static str] {
        &["pima", "wdbc", "statlog-heart", "pima-uci", "wdbc-uci", "statlog-heart-uci"]
    }
}

fn cols(spec: &[(&str, ColumnType)]) -> Vec<ColumnSpec> {
    spec.iter()
        .map(|(name, kind)| ColumnSpec {
            name: (*name).to_string(),
            kind: *kind,
        })
        .collect()
}

fn coding(pairs: &[(&str, u8)]) -> BTreeMap<String, u8> {
    pairs.iter().map(|(k, v)| ((*k).to_string(), *v)).collect()
}

fn pima(header: bool) -> DatasetSchema {
    use ColumnType::*;
    let columns = cols(&[
        ("Pregnancies", Integer),
        ("Glucose", Integer),
        ("BloodPressure", Integer),
        ("SkinThickness", Integer),
        ("Insulin", Integer),
        ("BMI", Real),
        ("DiabetesPedigreeFunction", Real),
        ("Age", Integer),
        ("Outcome", Binary),
    ]);
    // Zero is physiologically impossible for these five; pregnancies = 0 is real.
    let sentinels = ["Glucose", "BloodPressure", "SkinThickness", "Insulin", "BMI"]
        .iter()
        .map(|c| ((*c).to_string(), 0.0))
        .collect();
    DatasetSchema {
        name: if header { "pima" } else { "pima-uci" }.into(),
        header,
        delimiter: b',',
        columns,
        label: "Outcome".into(),
        coding: coding(&[("0", 0), ("1", 1)]),
        positive_name: "diabetic".into(),
        sentinels,
        drop: vec![],
    }
}

fn wdbc(with_id: bool) -> DatasetSchema {
    let mut columns = Vec::new();
    if with_id {
        columns.push(ColumnSpec {
            name: "id".into(),
            kind: ColumnType::Integer,
        });
    }
    columns.push(ColumnSpec {
        name: "diagnosis".into(),
        kind: ColumnType::Text,
    });
    let measures = [
        "radius",
        "texture",
        "perimeter",
        "area",
        "smoothness",
        "compactness",
        "concavity",
        "concave_points",
        "symmetry",
        "fractal_dimension",
    ];
    for stat in ["mean", "se", "worst"] {
        for m in measures {
            columns.push(ColumnSpec {
                name: format!("{m}_{stat}"),
                kind: ColumnType::Real,
            });
        }
    }
    DatasetSchema {
        name: if with_id { "wdbc-uci" } else { "wdbc" }.into(),
        header: !with_id,
        delimiter: b',',
        columns,
        label: "diagnosis".into(),
        coding: coding(&[("M", 1), ("B", 0)]),
        positive_name: "malignant".into(),
        sentinels: BTreeMap::new(),
        drop: if with_id { vec!["id".into()] } else { vec![] },
    }
}

fn heart(bundled: bool) -> DatasetSchema {
    use ColumnType::*;
    let columns = cols(&[
        ("age", Integer),
        ("sex", Binary),
        ("chest_pain", Categorical),
        ("resting_bp", Integer),
        ("cholesterol", Integer),
        ("fasting_blood_sugar", Binary),
        ("resting_ecg", Categorical),
        ("max_heart_rate", Integer),
        ("exercise_angina", Binary),
        ("oldpeak", Real),
        ("slope", Categorical),
        ("major_vessels", Categorical),
        ("thal", Categorical),
        ("heart_disease", Categorical),
    ]);
    DatasetSchema {
        name: if bundled { "statlog-heart" } else { "statlog-heart-uci" }.into(),
        header: bundled,
        delimiter: if bundled { b',' } else { b' ' },
        columns,
        label: "heart_disease".into(),
        coding: coding(&[("1", 0), ("2", 1)]),
        positive_name: "presence".into(),
        sentinels: BTreeMap::new(),
        drop: vec![],
    }
}
