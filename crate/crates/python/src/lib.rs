//! Python module `medstack`: datasets, fold plans, learners by roster name,
//! metrics, and the cross-validation harness.

use medstack_core::data::{class_distribution, load_csv, load_csv_bytes, stratified_kfold};
use medstack_core::ensembles::stage_weight as core_stage_weight;
use medstack_core::metrics::{self, ConfusionMatrix, MetricsRecord};
use medstack_core::trees::{entropy as core_entropy, gini_impurity};
use medstack_core::{Classifier, Learner, LearnerSpec};
use medstack_harness::{config::ExperimentConfig, fetch, run_experiment, LoadedDataset};
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use pyo3::types::PyDict;

fn err(e: impl std::fmt::Display) -> PyErr {
    PyValueError::new_err(e.to_string())
}

#[pyclass(name = "Dataset", module = "medstack", frozen, skip_from_py_object)]
#[derive(Clone)]
pub struct PyDataset {
    inner: medstack_core::Dataset,
    schema: Option<medstack_core::DatasetSchema>,
}

#[pymethods]
impl PyDataset {
    #[staticmethod]
    fn from_rows(rows: Vec<Vec<f64>>, labels: Vec<u8>) -> PyResult<Self> {
        Ok(PyDataset {
            inner: medstack_core::Dataset::from_rows(&rows, &labels).map_err(err)?,
            schema: None,
        })
    }

    #[getter]
    fn n_samples(&self) -> usize {
        self.inner.n_samples()
    }

    #[getter]
    fn n_features(&self) -> usize {
        self.inner.n_features()
    }

    #[getter]
    fn feature_names(&self) -> Vec<String> {
        self.inner.feature_names().to_vec()
    }

    #[getter]
    fn labels(&self) -> Vec<u32> {
        self.inner.labels().iter().map(|&y| u32::from(y)).collect()
    }

    #[getter]
    fn features(&self) -> Vec<Vec<f64>> {
        (0..self.inner.n_samples()).map(|i| self.inner.row(i).to_vec()).collect()
    }

    fn row(&self, i: usize) -> PyResult<Vec<f64>> {
        if i >= self.inner.n_samples() {
            return Err(pyo3::exceptions::PyIndexError::new_err(i));
        }
        Ok(self.inner.row(i).to_vec())
    }

    /// `(negatives, positives)`.
    fn class_counts(&self) -> (usize, usize) {
        let [n, p] = self.inner.class_counts();
        (n, p)
    }

    fn majority_rate(&self) -> PyResult<f64> {
        Ok(class_distribution(&self.inner).map_err(err)?.majority_rate)
    }

    fn subset(&self, indices: Vec<usize>) -> PyResult<Self> {
        if let Some(&bad) = indices.iter().find(|&&i| i >= self.inner.n_samples()) {
            return Err(pyo3::exceptions::PyIndexError::new_err(bad));
        }
        Ok(PyDataset {
            inner: self.inner.subset(&indices),
            schema: self.schema.clone(),
        })
    }

    /// Median-imputes schema sentinels using only `train_indices`.
    fn impute(&self, train_indices: Vec<usize>) -> PyResult<Self> {
        let schema = self
            .schema
            .as_ref()
            .ok_or_else(|| PyValueError::new_err("dataset has no schema; load it by name"))?;
        Ok(PyDataset {
            inner: medstack_core::data::impute_missing(&self.inner, schema, &train_indices).map_err(err)?,
            schema: self.schema.clone(),
        })
    }

    fn __len__(&self) -> usize {
        self.inner.n_samples()
    }

    fn __repr__(&self) -> String {
        let [n, p] = self.inner.class_counts();
        format!(
            "Dataset(n_samples={}, n_features={}, negatives={n}, positives={p})",
            self.inner.n_samples(),
            self.inner.n_features()
        )
    }
}

/// Loads a built-in dataset by name (`pima`, `wdbc`, `statlog-heart`), from
/// `path` when given, otherwise from the copy bundled with the library.
#[pyfunction]
#[pyo3(signature = (name, path=None))]
fn load_dataset(name: &str, path: Option<&str>) -> PyResult<PyDataset> {
    let schema = medstack_core::DatasetSchema::builtin(name).ok_or_else(|| err(format!("unknown dataset '{name}'")))?;
    let inner = match path {
        Some(p) => load_csv(p, &schema).map_err(err)?,
        None => {
            let src = fetch::source(name).map_err(err)?;
            load_csv_bytes(src.bundled, src.file_name, &schema).map_err(err)?
        }
    };
    Ok(PyDataset {
        inner,
        schema: Some(schema),
    })
}

/// List of `(train_indices, test_indices)` pairs.
#[pyfunction]
fn kfold(data: &PyDataset, k: usize, seed: u64) -> PyResult<Vec<(Vec<usize>, Vec<usize>)>> {
    let plan = stratified_kfold(&data.inner, k, seed).map_err(err)?;
    Ok(plan.folds.into_iter().map(|f| (f.train, f.test)).collect())
}

#[pyclass(name = "Model", module = "medstack", frozen)]
pub struct PyModel {
    name: String,
    inner: Box<dyn Classifier>,
}

#[pymethods]
impl PyModel {
    #[getter]
    fn name(&self) -> &str {
        &self.name
    }

    #[getter]
    fn n_features(&self) -> usize {
        self.inner.n_features()
    }

    fn predict_proba(&self, rows: Vec<Vec<f64>>) -> PyResult<Vec<f64>> {
        rows.iter()
            .map(|r| self.inner.checked_predict_proba(r).map_err(err))
            .collect()
    }

    fn predict(&self, rows: Vec<Vec<f64>>) -> PyResult<Vec<u32>> {
        Ok(self
            .predict_proba(rows)?
            .into_iter()
            .map(|p| u32::from(p >= medstack_core::learners::DECISION_THRESHOLD))
            .collect())
    }

    fn __repr__(&self) -> String {
        format!("Model({})", self.name)
    }
}

fn spec_from(py: Python<'_>, name: &str, params: Option<&Bound<'_, PyDict>>) -> PyResult<LearnerSpec> {
    let spec = LearnerSpec::from_name(name).map_err(err)?;
    match params {
        None => Ok(spec),
        Some(d) => {
            let text: String = py.import("json")?.call_method1("dumps", (d,))?.extract()?;
            let value: serde_json::Value = serde_json::from_str(&text).map_err(err)?;
            spec.with_overrides(&value).map_err(err)
        }
    }
}

/// Fits the learner registered under `name` (e.g. `"knn"`, `"stacking-nn"`),
/// with optional hyperparameter overrides.
#[pyfunction]
#[pyo3(signature = (name, data, seed=0, params=None))]
fn fit(py: Python<'_>, name: &str, data: &PyDataset, seed: u64, params: Option<&Bound<'_, PyDict>>) -> PyResult<PyModel> {
    let spec = spec_from(py, name, params)?;
    let inner = spec.fit(&data.inner, seed).map_err(err)?;
    Ok(PyModel {
        name: name.to_string(),
        inner,
    })
}

#[pyfunction]
fn learner_names() -> Vec<&'static str> {
    medstack_core::spec::LEARNER_NAMES.to_vec()
}

fn metrics_dict<'py>(py: Python<'py>, cm: &ConfusionMatrix, m: &MetricsRecord) -> PyResult<Bound<'py, PyDict>> {
    let d = PyDict::new(py);
    d.set_item("tp", cm.tp)?;
    d.set_item("tn", cm.tn)?;
    d.set_item("fp", cm.fp)?;
    d.set_item("fn", cm.fn_)?;
    d.set_item("accuracy", m.accuracy)?;
    d.set_item("sensitivity", m.sensitivity)?;
    d.set_item("specificity", m.specificity)?;
    d.set_item("ppv", m.ppv)?;
    d.set_item("npv", m.npv)?;
    d.set_item("tpr", m.tpr)?;
    d.set_item("fpr", m.fpr)?;
    Ok(d)
}

/// Confusion counts and derived rates; undefined rates are `None`.
#[pyfunction]
fn evaluate<'py>(py: Python<'py>, predicted: Vec<u8>, actual: Vec<u8>) -> PyResult<Bound<'py, PyDict>> {
    let cm = metrics::confusion_matrix(&predicted, &actual).map_err(err)?;
    let m = metrics::metrics_from_confusion(&cm).map_err(err)?;
    metrics_dict(py, &cm, &m)
}

#[pyfunction]
#[pyo3(name = "metrics_from_counts")]
fn metrics_from_counts<'py>(py: Python<'py>, tp: usize, tn: usize, fp: usize, fn_: usize) -> PyResult<Bound<'py, PyDict>> {
    let cm = ConfusionMatrix { tp, tn, fp, fn_ };
    let m = metrics::metrics_from_confusion(&cm).map_err(err)?;
    metrics_dict(py, &cm, &m)
}

/// `(fpr, tpr, thresholds)`.
#[pyfunction]
fn roc_curve(scores: Vec<f64>, actual: Vec<u8>) -> PyResult<(Vec<f64>, Vec<f64>, Vec<f64>)> {
    let c = metrics::roc_curve(&scores, &actual).map_err(err)?;
    Ok((c.fpr, c.tpr, c.thresholds))
}

#[pyfunction]
fn roc_auc(scores: Vec<f64>, actual: Vec<u8>) -> PyResult<f64> {
    metrics::roc_auc(&scores, &actual).map_err(err)
}

#[pyfunction]
fn entropy(labels: Vec<u8>) -> PyResult<f64> {
    core_entropy(&labels).map_err(err)
}

#[pyfunction]
fn gini(labels: Vec<u8>) -> PyResult<f64> {
    gini_impurity(&labels).map_err(err)
}

#[pyfunction]
fn stage_weight(error: f64) -> f64 {
    core_stage_weight(error)
}

/// Runs the cross-validation harness on bundled data. `config` is TOML text
/// (empty for defaults). Returns one dict per (dataset, model) with fold-mean
/// rates as fractions.
#[pyfunction]
#[pyo3(signature = (config=""))]
fn run<'py>(py: Python<'py>, config: &str) -> PyResult<Vec<Bound<'py, PyDict>>> {
    let cfg = ExperimentConfig::from_toml_str(config).map_err(err)?;
    let datasets = cfg
        .datasets
        .iter()
        .map(|name| {
            let schema = medstack_core::DatasetSchema::builtin(name).ok_or_else(|| err(format!("unknown dataset '{name}'")))?;
            let src = fetch::source(name).map_err(err)?;
            let data = load_csv_bytes(src.bundled, src.file_name, &schema).map_err(err)?;
            Ok(LoadedDataset {
                name: name.clone(),
                data,
                schema,
            })
        })
        .collect::<PyResult<Vec<_>>>()?;
    let report = py.detach(|| run_experiment(&cfg, &datasets)).map_err(err)?;
    report
        .rows
        .iter()
        .map(|r| {
            let d = PyDict::new(py);
            d.set_item("dataset", &r.dataset)?;
            d.set_item("model", &r.model)?;
            d.set_item("accuracy", r.summary.accuracy)?;
            d.set_item("sensitivity", r.summary.sensitivity)?;
            d.set_item("specificity", r.summary.specificity)?;
            d.set_item("auc", r.summary.auc)?;
            d.set_item("ppv", r.summary.ppv)?;
            d.set_item("npv", r.summary.npv)?;
            d.set_item("n_evaluated", r.n_evaluated)?;
            Ok(d)
        })
        .collect()
}

#[pymodule]
fn medstack(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("__version__", env!("CARGO_PKG_VERSION"))?;
    m.add_class::<PyDataset>()?;
    m.add_class::<PyModel>()?;
    m.add_function(wrap_pyfunction!(load_dataset, m)?)?;
    m.add_function(wrap_pyfunction!(kfold, m)?)?;
    m.add_function(wrap_pyfunction!(fit, m)?)?;
    m.add_function(wrap_pyfunction!(learner_names, m)?)?;
    m.add_function(wrap_pyfunction!(evaluate, m)?)?;
    m.add_function(wrap_pyfunction!(metrics_from_counts, m)?)?;
    m.add_function(wrap_pyfunction!(roc_curve, m)?)?;
    m.add_function(wrap_pyfunction!(roc_auc, m)?)?;
    m.add_function(wrap_pyfunction!(entropy, m)?)?;
    m.add_function(wrap_pyfunction!(gini, m)?)?;
    m.add_function(wrap_pyfunction!(stage_weight, m)?)?;
    m.add_function(wrap_pyfunction!(run, m)?)?;
    Ok(())
}
