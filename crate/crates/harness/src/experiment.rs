//! Cross-validated evaluation of a learner roster over the configured datasets.

use std::time::Instant;

use medstack_core::data::{class_distribution, impute_missing, stratified_kfold};
use medstack_core::metrics::{confusion_matrix, metrics_from_confusion, roc_auc, ConfusionMatrix, MetricsRecord};
use medstack_core::{rng, Classifier, Dataset, DatasetSchema, Learner, LearnerSpec};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::config::ExperimentConfig;
use crate::error::{HarnessError, Result};

/// Accuracy slack below the majority rate tolerated before a model is flagged.
pub const BASELINE_MARGIN: f64 = 0.03;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FoldResult {
    pub fold: usize,
    pub n_test: usize,
    pub confusion: ConfusionMatrix,
    pub metrics: MetricsRecord,
}

/// Fold-mean metrics as fractions; `None` when no fold defined the value.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub specificity: Option<f64>,
    pub sensitivity: Option<f64>,
    pub accuracy: f64,
    pub auc: Option<f64>,
    pub ppv: Option<f64>,
    pub npv: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StackingAudit {
    /// Out-of-fold audits that passed (one per outer fold); zero in naive mode.
    pub folds_verified: usize,
    pub naive: bool,
    /// Mean over outer folds of the meta model's training accuracy.
    pub meta_training_accuracy: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelResult {
    pub dataset: String,
    pub model: String,
    pub folds: Vec<FoldResult>,
    pub summary: Summary,
    pub n_evaluated: usize,
    /// Out-of-fold probability for every row, in dataset order.
    pub oof_scores: Vec<f64>,
    pub stacking: Option<StackingAudit>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DatasetSummary {
    pub name: String,
    pub n_samples: usize,
    pub n_features: usize,
    pub positives: usize,
    pub majority_rate: f64,
    pub labels: Vec<u8>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub version: String,
    pub seed: u64,
    pub k: usize,
    pub config_hash: String,
    pub datasets: Vec<DatasetSummary>,
    pub rows: Vec<ModelResult>,
    pub warnings: Vec<String>,
}

impl Report {
    pub fn row(&self, dataset: &str, model: &str) -> Option<&ModelResult> {
        self.rows.iter().find(|r| r.dataset == dataset && r.model == model)
    }

    pub fn dataset(&self, name: &str) -> Option<&DatasetSummary> {
        self.datasets.iter().find(|d| d.name == name)
    }
}

pub struct LoadedDataset {
    pub name: String,
    pub data: Dataset,
    pub schema: DatasetSchema,
}

/// Seed of one (dataset, model, fold) job.
pub fn job_seed(master: u64, dataset: &str, model: &str, fold: usize) -> u64 {
    rng::derive_seed(master, &[rng::name_id(dataset), rng::name_id(model), fold as u64])
}

fn mean_defined(values: impl Iterator<Item = Option<f64>>) -> Option<f64> {
    let (sum, count) = values.flatten().fold((0.0, 0usize), |(s, c), v| (s + v, c + 1));
    (count > 0).then(|| sum / count as f64)
}

struct JobOutput {
    scores: Vec<f64>,
    stacking: Option<(bool, f64)>,
}

fn fit_and_score(spec: &LearnerSpec, train: &Dataset, test: &Dataset, seed: u64) -> medstack_core::Result<JobOutput> {
    let (model, stacking): (Box<dyn Classifier>, _) = match spec {
        LearnerSpec::Stacking(p) => {
            let stacked = p.fit(train, seed)?;
            let verified = if p.naive {
                false
            } else {
                stacked.meta_features.verify_no_leakage()?;
                true
            };
            let acc = stacked.meta_training_accuracy;
            (Box::new(stacked), Some((verified, acc)))
        }
        other => (other.fit(train, seed)?, None),
    };
    Ok(JobOutput {
        scores: model.predict_proba_batch(test.features()),
        stacking,
    })
}

/// Runs every roster model over every dataset with the configured fold plan.
pub fn run_experiment(cfg: &ExperimentConfig, datasets: &[LoadedDataset]) -> Result<Report> {
    cfg.validate()?;
    let specs: Vec<(String, LearnerSpec)> = cfg
        .roster
        .iter()
        .map(|n| Ok((n.clone(), cfg.learner(n)?)))
        .collect::<Result<_>>()?;
    let mut report = Report {
        version: env!("CARGO_PKG_VERSION").to_string(),
        seed: cfg.seed,
        k: cfg.k,
        config_hash: cfg.hash(),
        datasets: Vec::new(),
        rows: Vec::new(),
        warnings: Vec::new(),
    };
    for ds in datasets {
        let started = Instant::now();
        let data = &ds.data;
        let dist = class_distribution(data)?;
        let plan = stratified_kfold(data, cfg.k, rng::derive_seed(cfg.seed, &[rng::name_id(&ds.name)]))?;
        let prepared: Vec<(Dataset, Dataset)> = plan
            .folds
            .iter()
            .map(|fold| {
                let imputed = impute_missing(data, &ds.schema, &fold.train)?;
                Ok((imputed.subset(&fold.train), imputed.subset(&fold.test)))
            })
            .collect::<medstack_core::Result<_>>()?;

        let jobs: Vec<(usize, usize)> = (0..specs.len())
            .flat_map(|m| (0..plan.folds.len()).map(move |f| (m, f)))
            .collect();
        let outputs = jobs
            .par_iter()
            .map(|&(m, f)| {
                let (name, spec) = &specs[m];
                let (train, test) = &prepared[f];
                fit_and_score(spec, train, test, job_seed(cfg.seed, &ds.name, name, f)).map_err(|source| {
                    HarnessError::Job {
                        dataset: ds.name.clone(),
                        model: name.clone(),
                        fold: f,
                        source,
                    }
                })
            })
            .collect::<Result<Vec<_>>>()?;

        let mut outputs = outputs.into_iter();
        for (name, _) in &specs {
            let mut folds = Vec::with_capacity(plan.folds.len());
            let mut oof = vec![f64::NAN; data.n_samples()];
            let mut audits = Vec::new();
            for (f, fold) in plan.folds.iter().enumerate() {
                let out = outputs.next().expect("one output per job");
                let actual: Vec<u8> = fold.test.iter().map(|&i| data.labels()[i]).collect();
                let predicted: Vec<u8> = out.scores.iter().map(|&p| u8::from(p >= 0.5)).collect();
                let confusion = confusion_matrix(&predicted, &actual)?;
                let mut metrics = metrics_from_confusion(&confusion)?;
                metrics.auc = roc_auc(&out.scores, &actual).ok();
                for (&i, &p) in fold.test.iter().zip(&out.scores) {
                    oof[i] = p;
                }
                if let Some(a) = out.stacking {
                    audits.push(a);
                }
                folds.push(FoldResult {
                    fold: f,
                    n_test: fold.test.len(),
                    confusion,
                    metrics,
                });
            }
            let n_evaluated: usize = folds.iter().map(|f| f.n_test).sum();
            if n_evaluated != data.n_samples() {
                return Err(HarnessError::Report(format!(
                    "{} / {name}: folds evaluated {n_evaluated} rows, expected {}",
                    ds.name,
                    data.n_samples()
                )));
            }
            let summary = Summary {
                specificity: mean_defined(folds.iter().map(|f| f.metrics.specificity)),
                sensitivity: mean_defined(folds.iter().map(|f| f.metrics.sensitivity)),
                accuracy: folds.iter().map(|f| f.metrics.accuracy).sum::<f64>() / folds.len() as f64,
                auc: mean_defined(folds.iter().map(|f| f.metrics.auc)),
                ppv: mean_defined(folds.iter().map(|f| f.metrics.ppv)),
                npv: mean_defined(folds.iter().map(|f| f.metrics.npv)),
            };
            let stacking = (!audits.is_empty()).then(|| StackingAudit {
                folds_verified: audits.iter().filter(|a| a.0).count(),
                naive: audits.iter().all(|a| !a.0),
                meta_training_accuracy: audits.iter().map(|a| a.1).sum::<f64>() / audits.len() as f64,
            });
            if name != "majority" && summary.accuracy < dist.majority_rate - BASELINE_MARGIN {
                if cfg.strict {
                    return Err(HarnessError::BelowBaseline {
                        dataset: ds.name.clone(),
                        model: name.clone(),
                        accuracy: summary.accuracy,
                        majority: dist.majority_rate,
                    });
                }
                report.warnings.push(format!(
                    "{} / {name}: accuracy {:.4} is below the majority rate {:.4} minus {BASELINE_MARGIN}",
                    ds.name, summary.accuracy, dist.majority_rate
                ));
            }
            report.rows.push(ModelResult {
                dataset: ds.name.clone(),
                model: name.clone(),
                folds,
                summary,
                n_evaluated,
                oof_scores: oof,
                stacking,
            });
        }
        let [_, positives] = data.class_counts();
        report.datasets.push(DatasetSummary {
            name: ds.name.clone(),
            n_samples: data.n_samples(),
            n_features: data.n_features(),
            positives,
            majority_rate: dist.majority_rate,
            labels: data.labels().to_vec(),
        });
        eprintln!(
            "{}: {} models x {} folds in {:.1}s",
            ds.name,
            specs.len(),
            plan.folds.len(),
            started.elapsed().as_secs_f64()
        );
    }
    Ok(report)
}
