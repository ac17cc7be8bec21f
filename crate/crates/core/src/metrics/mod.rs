//! Confusion matrices, the derived rates, ROC curves and AUC.

mod confusion;
mod roc;

pub use confusion::{confusion_matrix, metrics_from_confusion, rate, ConfusionMatrix, MetricsRecord};
pub use roc::{auc, roc_auc, roc_curve, RocCurve};

/// Percentage with one decimal, or an em dash when the value is undefined.
pub fn format_percent(value: Option<f64>) -> String {
    match value {
        Some(v) => format!("{:.1}", 100.0 * v),
        None => "\u{2014}".to_string(),
    }
}
