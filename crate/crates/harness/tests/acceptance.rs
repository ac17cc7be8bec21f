//! Acceptance checks, one PASS/FAIL line per criterion.
//!
//! Runs without the libtest harness. Every check always runs and reports; the
//! process exits nonzero on a failure only when `MEDSTACK_ACCEPTANCE_STRICT=1`
//! so that known shortfalls stay visible without blocking the rest of the
//! workspace tests.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::process::Command;
use std::time::{Duration, Instant};

use medstack_core::data::{class_distribution, stratified_kfold};
use medstack_core::ensembles::{fit_stacking, stage_weight, StackingMode};
use medstack_core::learners::{fit_knn, logistic_loss_and_gradient, DistanceMetric, KnnParams};
use medstack_core::metrics::{metrics_from_confusion, roc_auc, ConfusionMatrix};
use medstack_core::neural::{backward, init_mlp, Activation, MlpArchitecture};
use medstack_core::spec::BASE_LEARNERS;
use medstack_core::trees::{entropy, gini_impurity};
use medstack_core::{rng, Classifier, Dataset, Learner};
use medstack_harness::experiment::Report;
use medstack_harness::fetch::{self, Origin};
use medstack_harness::report::load_json;
use ndarray::Array2;
use rand::Rng;

type Check = Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn rel_err(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs()).max(1e-8)
}

fn round4(x: f64) -> f64 {
    (x * 1e4).round() / 1e4
}

fn metric_arithmetic() -> Check {
    let cm = ConfusionMatrix {
        tp: 50,
        tn: 40,
        fp: 5,
        fn_: 5,
    };
    let m = metrics_from_confusion(&cm).map_err(|e| e.to_string())?;
    let got = [
        m.accuracy,
        m.sensitivity.unwrap(),
        m.specificity.unwrap(),
        m.ppv.unwrap(),
        m.npv.unwrap(),
    ];
    let want = [0.9, 0.9091, 0.8889, 0.9091, 0.8889];
    ensure(got.iter().zip(&want).all(|(g, w)| round4(*g) == *w), || {
        format!("hand example gave {got:?}")
    })?;

    let mut r = rng::stream(1);
    for _ in 0..1000 {
        let cm = ConfusionMatrix {
            tp: r.random_range(0..50),
            tn: r.random_range(0..50),
            fp: r.random_range(0..50),
            fn_: r.random_range(1..50),
        };
        let a = metrics_from_confusion(&cm).unwrap();
        let b = metrics_from_confusion(&cm.swapped()).unwrap();
        ensure(a.accuracy == b.accuracy && a.sensitivity == b.specificity && a.specificity == b.sensitivity, || {
            format!("label-swap duality broken at {cm:?}")
        })?;
        ensure(a.ppv == b.npv && a.npv == b.ppv, || format!("ppv/npv duality broken at {cm:?}"))?;
        ensure(a.sensitivity == a.tpr, || format!("sensitivity != TPR at {cm:?}"))?;
    }
    Ok("hand example to 4 d.p.; duality and sensitivity = TPR on 1000 random matrices".into())
}

fn brute_force_knn(train: &Dataset, x: &[f64], k: usize) -> f64 {
    let mut order: Vec<(f64, usize)> = (0..train.n_samples())
        .map(|i| {
            let d = train.row(i).iter().zip(x).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt();
            (d, i)
        })
        .collect();
    order.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
    order[..k].iter().filter(|&&(_, i)| train.labels()[i] == 1).count() as f64 / k as f64
}

fn pairwise_auc(scores: &[f64], labels: &[u8]) -> f64 {
    let (mut wins, mut pairs) = (0.0, 0.0);
    for (i, &si) in scores.iter().enumerate() {
        for (j, &sj) in scores.iter().enumerate() {
            if labels[i] == 1 && labels[j] == 0 {
                pairs += 1.0;
                if si > sj {
                    wins += 1.0;
                } else if si == sj {
                    wins += 0.5;
                }
            }
        }
    }
    wins / pairs
}

/// Predicts 0.9 above the training mean of one feature, 0.1 otherwise.
#[derive(Debug)]
struct Threshold(usize, f64, usize);

impl Classifier for Threshold {
    fn predict_proba(&self, x: &[f64]) -> f64 {
        if x[self.0] > self.1 {
            0.9
        } else {
            0.1
        }
    }
    fn n_features(&self) -> usize {
        self.2
    }
}

struct ThresholdLearner(usize);

impl Learner for ThresholdLearner {
    fn name(&self) -> String {
        format!("threshold-{}", self.0)
    }
    fn fit(&self, train: &Dataset, _seed: u64) -> medstack_core::Result<Box<dyn Classifier>> {
        let col = train.features().column(self.0).to_vec();
        let mean = col.iter().sum::<f64>() / col.len() as f64;
        Ok(Box::new(Threshold(self.0, mean, train.n_features())))
    }
}

#[derive(Debug)]
struct VoteShare(usize);

impl Classifier for VoteShare {
    fn predict_proba(&self, x: &[f64]) -> f64 {
        x.iter().filter(|&&p| p >= 0.5).count() as f64 / x.len() as f64
    }
    fn n_features(&self) -> usize {
        self.0
    }
}

struct MajorityVote;

impl Learner for MajorityVote {
    fn name(&self) -> String {
        "majority-vote".into()
    }
    fn fit(&self, train: &Dataset, _seed: u64) -> medstack_core::Result<Box<dyn Classifier>> {
        Ok(Box::new(VoteShare(train.n_features())))
    }
}

fn oracle_equivalences() -> Check {
    let start = Instant::now();
    let mut r = rng::stream(2);
    for case in 0..200 {
        let n = r.random_range(3..40);
        let p = r.random_range(1..5);
        let rows: Vec<Vec<f64>> = (0..n).map(|_| (0..p).map(|_| r.random_range(0..4) as f64).collect()).collect();
        let labels: Vec<u8> = (0..n).map(|_| r.random_range(0..2)).collect();
        let train = Dataset::from_rows(&rows, &labels).map_err(|e| e.to_string())?;
        let k = r.random_range(1..=n);
        let model = fit_knn(&train, &KnnParams { k, metric: DistanceMetric::Euclidean }).map_err(|e| e.to_string())?;
        for _ in 0..5 {
            let x: Vec<f64> = (0..p).map(|_| r.random_range(0..4) as f64).collect();
            let (got, want) = (model.predict_proba(&x), brute_force_knn(&train, &x, k));
            ensure(got == want, || format!("k-NN case {case}: {got} vs brute force {want}"))?;
        }
    }

    for case in 0..200 {
        let n = r.random_range(2..60);
        let mut labels: Vec<u8> = (0..n).map(|_| r.random_range(0..2)).collect();
        labels[0] = 0;
        labels[1] = 1;
        let scores: Vec<f64> = (0..n).map(|_| (r.random_range(0..10) as f64) / 10.0).collect();
        let got = roc_auc(&scores, &labels).map_err(|e| e.to_string())?;
        let want = pairwise_auc(&scores, &labels);
        ensure((got - want).abs() <= 1e-12, || format!("AUC case {case}: {got} vs pairwise {want}"))?;
    }

    for case in 0..50u64 {
        let n = r.random_range(12..40);
        let p = 3;
        let rows: Vec<Vec<f64>> = (0..n).map(|_| (0..p).map(|_| r.random_range(-1.0..1.0)).collect()).collect();
        let mut labels: Vec<u8> = (0..n).map(|_| r.random_range(0..2)).collect();
        labels[..6].copy_from_slice(&[0, 1, 0, 1, 0, 1]);
        let d = Dataset::from_rows(&rows, &labels).map_err(|e| e.to_string())?;
        let plan = stratified_kfold(&d, 3, case).map_err(|e| e.to_string())?;
        let bases: Vec<ThresholdLearner> = (0..p).map(ThresholdLearner).collect();
        let stacked = fit_stacking(&bases, &MajorityVote, &d, &plan, StackingMode::OutOfFold, case).map_err(|e| e.to_string())?;
        let finals: Vec<Box<dyn Classifier>> = bases.iter().map(|b| b.fit(&d, 0).unwrap()).collect();
        for _ in 0..10 {
            let x: Vec<f64> = (0..p).map(|_| r.random_range(-1.0..1.0)).collect();
            let votes = finals.iter().filter(|m| m.predict(&x) == 1).count();
            ensure(stacked.predict(&x) == u8::from(2 * votes >= p), || format!("majority-vote stacking case {case}"))?;
        }
    }
    let secs = start.elapsed().as_secs_f64();
    ensure(secs < 10.0, || format!("took {secs:.1}s, budget 10s"))?;
    Ok(format!("k-NN 200/200, AUC 200/200, majority-vote stacking 50/50 in {secs:.2}s"))
}

fn random_batch(r: &mut impl Rng, n: usize, p: usize) -> (Array2<f64>, Vec<u8>) {
    let x = Array2::from_shape_fn((n, p), |_| r.random_range(-2.0..2.0));
    let y = (0..n).map(|_| r.random_range(0..2)).collect();
    (x, y)
}

fn gradient_gates() -> Check {
    const H: f64 = 1e-5;
    let start = Instant::now();
    let mut r = rng::stream(3);
    let mut worst_logistic: f64 = 0.0;
    for case in 0..20 {
        let n = r.random_range(3..30);
        let p = r.random_range(1..6);
        let (x, y) = random_batch(&mut r, n, p);
        let b0 = r.random_range(-1.0..1.0);
        let b: Vec<f64> = (0..p).map(|_| r.random_range(-1.0..1.0)).collect();
        let l2 = [0.0, 1e-3, 0.1][case % 3];
        let (_, g0, g) = logistic_loss_and_gradient(x.view(), &y, b0, &b, l2);
        let loss = |b0: f64, b: &[f64]| logistic_loss_and_gradient(x.view(), &y, b0, b, l2).0;
        worst_logistic = worst_logistic.max(rel_err(g0, (loss(b0 + H, &b) - loss(b0 - H, &b)) / (2.0 * H)));
        for j in 0..p {
            let (mut up, mut down) = (b.clone(), b.clone());
            up[j] += H;
            down[j] -= H;
            worst_logistic = worst_logistic.max(rel_err(g[j], (loss(b0, &up) - loss(b0, &down)) / (2.0 * H)));
        }
    }
    ensure(worst_logistic <= 1e-6, || format!("logistic relative error {worst_logistic:.2e} > 1e-6"))?;

    let mut worst_mlp: f64 = 0.0;
    for case in 0..20u64 {
        let input = r.random_range(1..6);
        let hidden: Vec<usize> = (0..r.random_range(1..3)).map(|_| r.random_range(1..6)).collect();
        let activation = if case % 5 == 4 { Activation::Identity } else { Activation::Relu };
        let arch = MlpArchitecture {
            input_width: input,
            hidden_widths: hidden,
            activation,
        };
        let mut model = init_mlp(&arch, case).map_err(|e| e.to_string())?;
        model.params.l2 = [0.0, 1e-4, 1e-2][case as usize % 3];
        let n = r.random_range(2..12);
        let (x, y) = random_batch(&mut r, n, input);
        let (_, grads) = backward(&model, x.view(), &y).map_err(|e| e.to_string())?;
        for l in 0..model.layers.len() {
            let (rows, cols) = model.layers[l].weights.dim();
            for i in 0..rows {
                for j in 0..cols {
                    let mut m = model.clone();
                    m.layers[l].weights[[i, j]] += H;
                    let up = m.loss(x.view(), &y);
                    m.layers[l].weights[[i, j]] -= 2.0 * H;
                    let fd = (up - m.loss(x.view(), &y)) / (2.0 * H);
                    let g = grads[l].weights[[i, j]];
                    // Entries that vanish on both sides (dead ReLU units)
                    // have no meaningful relative error.
                    if g.abs().max(fd.abs()) > 1e-9 {
                        worst_mlp = worst_mlp.max(rel_err(g, fd));
                    }
                }
            }
        }
    }
    ensure(worst_mlp <= 1e-4, || format!("MLP relative error {worst_mlp:.2e} > 1e-4"))?;
    let secs = start.elapsed().as_secs_f64();
    ensure(secs < 10.0, || format!("took {secs:.1}s, budget 10s"))?;
    Ok(format!("worst relative error logistic {worst_logistic:.1e}, MLP {worst_mlp:.1e} over 20 configurations each"))
}

fn spot_values() -> Check {
    let h = entropy(&[1, 1, 1, 0]).map_err(|e| e.to_string())?;
    let g = gini_impurity(&[1, 1, 1, 0]).map_err(|e| e.to_string())?;
    let a = stage_weight(0.25);
    ensure((h - 0.811278).abs() <= 1e-6, || format!("entropy {h}"))?;
    ensure(g == 0.375, || format!("gini {g}"))?;
    ensure((a - 0.549306).abs() <= 1e-6, || format!("alpha {a}"))?;
    Ok(format!("entropy {h:.6}, gini {g}, alpha {a:.6}"))
}

fn ingestion(cache: &Path) -> Check {
    let names: Vec<String> = ["pima", "wdbc", "statlog-heart"].iter().map(|s| s.to_string()).collect();
    let first = fetch::fetch_datasets(&names, cache, None).map_err(|e| e.to_string())?;
    let before: Vec<Vec<u8>> = first.iter().map(|f| std::fs::read(&f.path).unwrap()).collect();
    let second = fetch::fetch_datasets(&names, cache, None).map_err(|e| e.to_string())?;
    ensure(second.iter().all(|f| f.origin == Origin::Cache), || "second fetch did not reuse the cache".into())?;
    for (f, bytes) in second.iter().zip(&before) {
        let now = std::fs::read(&f.path).map_err(|e| e.to_string())?;
        ensure(&now == bytes, || format!("{} changed between fetches", f.name))?;
        let pinned = fetch::source(&f.name).unwrap().sha256;
        ensure(fetch::sha256_hex(&now) == pinned, || format!("{} checksum mismatch", f.name))?;
    }
    let mut shapes = Vec::new();
    for (f, (rows, cols)) in second.iter().zip([(768, 8), (569, 30), (270, 13)]) {
        let (d, _) = fetch::load(f).map_err(|e| e.to_string())?;
        ensure(d.n_samples() == rows && d.n_features() == cols, || {
            format!("{}: {}x{}, expected {rows}x{cols}", f.name, d.n_samples(), d.n_features())
        })?;
        shapes.push(format!("{} {}x{}", f.name, rows, cols));
    }
    Ok(format!("{}; second fetch served from cache unchanged", shapes.join(", ")))
}

fn run_cli(args: &[&str], cache: &Path) -> Result<Duration, String> {
    let start = Instant::now();
    let out = Command::new(env!("CARGO_BIN_EXE_medstack"))
        .args(args)
        .arg("--cache")
        .arg(cache)
        .env_remove(fetch::MIRROR_ENV)
        .output()
        .map_err(|e| e.to_string())?;
    if !out.status.success() {
        return Err(format!("medstack {} failed: {}", args.join(" "), String::from_utf8_lossy(&out.stderr)));
    }
    Ok(start.elapsed())
}

fn directional(report: &Report, elapsed: Duration) -> Check {
    let mut problems = Vec::new();
    let mut notes = Vec::new();
    for ds in &report.datasets {
        let rows: Vec<_> = report.rows.iter().filter(|r| r.dataset == ds.name).collect();
        let majority = 100.0 * ds.majority_rate;
        for r in &rows {
            let acc = 100.0 * r.summary.accuracy;
            if acc < majority + 3.0 {
                problems.push(format!("{} {} {acc:.2} < majority {majority:.2} + 3", ds.name, r.model));
            }
        }
        let (best_name, best) = rows
            .iter()
            .filter(|r| BASE_LEARNERS.contains(&r.model.as_str()))
            .map(|r| (r.model.as_str(), 100.0 * r.summary.accuracy))
            .fold(("", f64::MIN), |a, b| if b.1 > a.1 { b } else { a });
        match rows.iter().find(|r| r.model == "stacking-nn") {
            Some(s) => {
                let acc = 100.0 * s.summary.accuracy;
                notes.push(format!("{} stacking {acc:.2} vs best {best_name} {best:.2}", ds.name));
                if acc < best - 1.0 {
                    problems.push(format!("{} stacking {acc:.2} < best base {best_name} {best:.2} - 1", ds.name));
                }
            }
            None => problems.push(format!("{}: no stacking-nn row", ds.name)),
        }
    }
    if elapsed > Duration::from_secs(300) {
        problems.push(format!("run took {:.0}s, budget 300s", elapsed.as_secs_f64()));
    }
    if problems.is_empty() {
        Ok(format!("{}; run {:.0}s", notes.join("; "), elapsed.as_secs_f64()))
    } else {
        Err(problems.join("; "))
    }
}

fn leakage(oof: &Report, naive: &Report) -> Check {
    let mut notes = Vec::new();
    let mut inflated = false;
    for r in oof.rows.iter().filter(|r| r.model.starts_with("stacking")) {
        let audit = r.stacking.as_ref().ok_or_else(|| format!("{} {}: no stacking audit", r.dataset, r.model))?;
        ensure(!audit.naive && audit.folds_verified == oof.k, || {
            format!("{} {}: {} of {} folds passed the audit", r.dataset, r.model, audit.folds_verified, oof.k)
        })?;
        let n = naive
            .row(&r.dataset, &r.model)
            .and_then(|n| n.stacking.as_ref())
            .ok_or_else(|| format!("{} {}: missing from naive run", r.dataset, r.model))?;
        ensure(n.naive, || "naive run was not naive".into())?;
        inflated |= n.meta_training_accuracy > audit.meta_training_accuracy;
        notes.push(format!(
            "{} meta-train {:.3} naive vs {:.3} out-of-fold",
            r.dataset, n.meta_training_accuracy, audit.meta_training_accuracy
        ));
    }
    ensure(inflated, || format!("naive never exceeded out-of-fold: {}", notes.join("; ")))?;
    Ok(format!("audit exact on every outer fold; {}", notes.join("; ")))
}

fn check(id: &str, title: &str, f: impl FnOnce() -> Check) -> bool {
    let result = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|p| {
        Err(p
            .downcast_ref::<String>()
            .cloned()
            .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
            .unwrap_or_else(|| "panicked".into()))
    });
    match result {
        Ok(detail) => {
            println!("PASS {id} {title}: {detail}");
            true
        }
        Err(detail) => {
            println!("FAIL {id} {title}: {detail}");
            false
        }
    }
}

fn main() {
    let tmp = tempfile::tempdir().expect("temp dir");
    let cache = tmp.path().join("cache");
    let mut passed = Vec::new();

    passed.push(check("AC1", "metric arithmetic", metric_arithmetic));
    passed.push(check("AC2", "oracle equivalences", oracle_equivalences));
    passed.push(check("AC3", "gradient gates", gradient_gates));
    passed.push(check("AC4", "formula spot values", spot_values));
    passed.push(check("AC5", "dataset ingestion", || ingestion(&cache)));

    let (a, b, naive) = (tmp.path().join("a"), tmp.path().join("b"), tmp.path().join("naive"));
    let first = run_cli(&["run", "--seed", "42", "--out", a.to_str().unwrap()], &cache);
    let report = first
        .clone()
        .and_then(|_| load_json(&a.join("report.json")).map_err(|e| e.to_string()));

    passed.push(check("AC6", "directional ensemble claim", || {
        let elapsed = first.clone()?;
        let report = report.clone()?;
        for ds in &report.datasets {
            let d = medstack_harness::load_datasets(&[ds.name.clone()], &cache, None).map_err(|e| e.to_string())?;
            let tally = class_distribution(&d[0].data).map_err(|e| e.to_string())?.majority_rate;
            ensure(tally == ds.majority_rate, || format!("{} majority rate mismatch", ds.name))?;
        }
        directional(&report, elapsed)
    }));

    passed.push(check("AC7", "leakage audit", || {
        let oof = report.clone()?;
        let config = tmp.path().join("stacking.toml");
        std::fs::write(&config, "roster = [\"stacking-nn\"]\n").map_err(|e| e.to_string())?;
        run_cli(
            &["run", "--seed", "42", "--stacking-naive", "--config", config.to_str().unwrap(), "--out", naive.to_str().unwrap()],
            &cache,
        )?;
        let naive_report = load_json(&naive.join("report.json")).map_err(|e| e.to_string())?;
        leakage(&oof, &naive_report)
    }));

    passed.push(check("AC8", "determinism", || {
        first.clone()?;
        run_cli(&["run", "--seed", "42", "--out", b.to_str().unwrap()], &cache)?;
        let x = std::fs::read(a.join("report.csv")).map_err(|e| e.to_string())?;
        let y = std::fs::read(b.join("report.csv")).map_err(|e| e.to_string())?;
        ensure(x == y, || "report.csv differs between identical runs".into())?;
        Ok(format!("two runs wrote identical report.csv ({} bytes)", x.len()))
    }));

    let n_pass = passed.iter().filter(|&&p| p).count();
    println!("{n_pass}/{} acceptance criteria pass", passed.len());
    let strict = std::env::var("MEDSTACK_ACCEPTANCE_STRICT").is_ok_and(|v| v == "1");
    if strict && n_pass < passed.len() {
        std::process::exit(1);
    }
}
