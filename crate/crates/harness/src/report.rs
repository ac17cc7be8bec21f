//! Report files: `report.csv` (full precision), `report.md` (one-decimal
//! percentages), `report.json` (everything, re-renderable) and optional ROC
//! point dumps.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use medstack_core::metrics::{format_percent, roc_curve};

use crate::config::{dataset_title, display_name};
use crate::error::{io, HarnessError, Result};
use crate::experiment::Report;

pub const CSV_HEADER: &str = "dataset,model,specificity,sensitivity,accuracy,auc,ppv,npv,n_evaluated";

fn pct_full(v: Option<f64>) -> String {
    match v {
        Some(x) => format!("{}", 100.0 * x),
        None => "\u{2014}".to_string(),
    }
}

pub fn render_csv(report: &Report) -> Result<String> {
    if report.rows.is_empty() {
        return Err(HarnessError::EmptyReport);
    }
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    for r in &report.rows {
        let s = &r.summary;
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{},{}",
            r.dataset,
            r.model,
            pct_full(s.specificity),
            pct_full(s.sensitivity),
            pct_full(Some(s.accuracy)),
            pct_full(s.auc),
            pct_full(s.ppv),
            pct_full(s.npv),
            r.n_evaluated
        );
    }
    Ok(out)
}

pub fn render_markdown(report: &Report) -> Result<String> {
    if report.rows.is_empty() {
        return Err(HarnessError::EmptyReport);
    }
    let mut out = String::new();
    let _ = writeln!(out, "# Cross-validated results\n");
    let _ = writeln!(
        out,
        "Seed {}, {}-fold stratified cross-validation, config sha256 `{}`, medstack {}.",
        report.seed, report.k, report.config_hash, report.version
    );
    let _ = writeln!(out, "Values are fold means in percent; \u{2014} marks an undefined rate.");
    for ds in &report.datasets {
        let rows: Vec<_> = report.rows.iter().filter(|r| r.dataset == ds.name).collect();
        let _ = writeln!(
            out,
            "\n## {} ({} samples, {} features, majority rate {:.1}%)\n",
            dataset_title(&ds.name),
            ds.n_samples,
            ds.n_features,
            100.0 * ds.majority_rate
        );
        let _ = writeln!(out, "| Model | Specificity | Sensitivity | Accuracy |");
        let _ = writeln!(out, "|---|---:|---:|---:|");
        for r in &rows {
            let s = &r.summary;
            let _ = writeln!(
                out,
                "| {} | {} | {} | {} |",
                display_name(&r.model),
                format_percent(s.specificity),
                format_percent(s.sensitivity),
                format_percent(Some(s.accuracy))
            );
        }
        let _ = writeln!(out, "\n| Model | AUC | PPV | NPV |");
        let _ = writeln!(out, "|---|---:|---:|---:|");
        for r in &rows {
            let s = &r.summary;
            let _ = writeln!(
                out,
                "| {} | {} | {} | {} |",
                display_name(&r.model),
                format_percent(s.auc),
                format_percent(s.ppv),
                format_percent(s.npv)
            );
        }
    }
    if !report.warnings.is_empty() {
        let _ = writeln!(out, "\n## Warnings\n");
        for w in &report.warnings {
            let _ = writeln!(out, "- {w}");
        }
    }
    Ok(out)
}

pub fn render_json(report: &Report) -> Result<String> {
    if report.rows.is_empty() {
        return Err(HarnessError::EmptyReport);
    }
    serde_json::to_string_pretty(report).map_err(|e| HarnessError::Report(e.to_string()))
}

/// `threshold,fpr,tpr` rows for the pooled out-of-fold scores of each model.
pub fn render_roc(report: &Report, dataset: &str, model: &str) -> Result<String> {
    let row = report
        .row(dataset, model)
        .ok_or_else(|| HarnessError::Report(format!("no row for {dataset} / {model}")))?;
    let ds = report
        .dataset(dataset)
        .ok_or_else(|| HarnessError::Report(format!("no dataset {dataset}")))?;
    let curve = roc_curve(&row.oof_scores, &ds.labels)?;
    let mut out = String::from("threshold,fpr,tpr\n");
    for ((t, f), p) in curve.thresholds.iter().zip(&curve.fpr).zip(&curve.tpr) {
        let _ = writeln!(out, "{t},{f},{p}");
    }
    Ok(out)
}

fn write(path: PathBuf, text: &str, written: &mut Vec<PathBuf>) -> Result<()> {
    std::fs::write(&path, text).map_err(io(&path))?;
    written.push(path);
    Ok(())
}

/// Writes the requested formats into `dir`, returning the files written.
pub fn render_report(report: &Report, dir: &Path, formats: &[String], roc: bool) -> Result<Vec<PathBuf>> {
    if report.rows.is_empty() {
        return Err(HarnessError::EmptyReport);
    }
    std::fs::create_dir_all(dir).map_err(io(dir))?;
    let mut written = Vec::new();
    for format in formats {
        match format.as_str() {
            "csv" => write(dir.join("report.csv"), &render_csv(report)?, &mut written)?,
            "md" => write(dir.join("report.md"), &render_markdown(report)?, &mut written)?,
            "json" => write(dir.join("report.json"), &render_json(report)?, &mut written)?,
            other => return Err(HarnessError::Config(format!("unknown output format '{other}'"))),
        }
    }
    if roc {
        let roc_dir = dir.join("roc");
        std::fs::create_dir_all(&roc_dir).map_err(io(&roc_dir))?;
        for r in &report.rows {
            let text = render_roc(report, &r.dataset, &r.model)?;
            write(roc_dir.join(format!("{}__{}.csv", r.dataset, r.model)), &text, &mut written)?;
        }
    }
    Ok(written)
}

pub fn load_json(path: &Path) -> Result<Report> {
    let text = std::fs::read_to_string(path).map_err(io(path))?;
    serde_json::from_str(&text).map_err(|e| HarnessError::Report(format!("{}: {e}", path.display())))
}
