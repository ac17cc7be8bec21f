use medstack_harness::experiment::Report;
use medstack_harness::report::{render_csv, render_markdown, render_report, CSV_HEADER};
use medstack_harness::{load_datasets, run_experiment, ExperimentConfig, HarnessError};

fn quick(text: &str) -> (ExperimentConfig, Report) {
    let dir = tempfile::tempdir().unwrap();
    let cfg = ExperimentConfig::from_toml_str(text).unwrap();
    let data = load_datasets(&cfg.datasets, dir.path(), None).unwrap();
    let report = run_experiment(&cfg, &data).unwrap();
    (cfg, report)
}

#[test]
fn majority_roster_scores_the_majority_rate() {
    let (_, report) = quick("datasets = [\"statlog-heart\", \"pima\"]\nk = 5\nroster = [\"majority\"]\n");
    for ds in &report.datasets {
        let row = report.row(&ds.name, "majority").unwrap();
        assert!((row.summary.accuracy - ds.majority_rate).abs() < 0.01, "{}", ds.name);
        assert_eq!(row.summary.sensitivity, Some(0.0));
        assert_eq!(row.n_evaluated, ds.n_samples);
    }
}

#[test]
fn every_row_is_evaluated_once_per_sample() {
    let (cfg, report) = quick("datasets = [\"statlog-heart\"]\nk = 4\nroster = [\"logistic\", \"naive-bayes\"]\n");
    assert_eq!(report.rows.len(), 2);
    for r in &report.rows {
        assert_eq!(r.folds.len(), cfg.k);
        assert_eq!(r.n_evaluated, 270);
        assert_eq!(r.oof_scores.len(), 270);
        assert!(r.summary.accuracy > 0.75);
    }
}

#[test]
fn csv_and_markdown_have_a_row_per_model() {
    let (_, report) = quick("datasets = [\"statlog-heart\"]\nk = 3\nroster = [\"majority\", \"knn\"]\n");
    let csv = render_csv(&report).unwrap();
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines[0], CSV_HEADER);
    assert_eq!(lines.len(), 3);
    assert!(lines[2].starts_with("statlog-heart,knn,"));
    let md = render_markdown(&report).unwrap();
    assert!(md.contains("| Model | Specificity | Sensitivity | Accuracy |"));
    // The majority model never predicts positive, so its PPV is undefined.
    assert!(md.contains('\u{2014}'));
}

#[test]
fn stacking_rows_carry_an_exact_audit() {
    let (_, report) = quick(
        "datasets = [\"statlog-heart\"]\nk = 3\nroster = [\"stacking-nn\"]\n\
         [ensembles.stacking]\nbases = [\"logistic\", \"naive-bayes\"]\nfolds = 3\n",
    );
    let audit = report.rows[0].stacking.as_ref().unwrap();
    assert_eq!(audit.folds_verified, 3);
    assert!(!audit.naive);
}

#[test]
fn empty_reports_are_not_written() {
    let (_, mut report) = quick("datasets = [\"statlog-heart\"]\nk = 3\nroster = [\"majority\"]\n");
    report.rows.clear();
    let dir = tempfile::tempdir().unwrap();
    let err = render_report(&report, dir.path(), &["csv".to_string()], false).unwrap_err();
    assert!(matches!(err, HarnessError::EmptyReport));
    assert!(!dir.path().join("report.csv").exists());
}

#[test]
fn unknown_roster_names_are_rejected() {
    let err = ExperimentConfig::from_toml_str("roster = [\"quantum\"]\n").unwrap_err();
    assert!(err.to_string().contains("quantum"));
}
