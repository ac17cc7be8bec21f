#![allow(dead_code)]

use medstack_core::rng;
use medstack_core::Dataset;
use rand::Rng;

/// Two Gaussian-ish blobs shifted apart by `gap` along every feature.
pub fn blobs(n: usize, p: usize, gap: f64, seed: u64) -> Dataset {
    let mut r = rng::stream(seed);
    let mut rows = Vec::with_capacity(n);
    let mut labels = Vec::with_capacity(n);
    for i in 0..n {
        let y = u8::from(i % 2 == 0);
        let shift = if y == 1 { gap / 2.0 } else { -gap / 2.0 };
        rows.push(
            (0..p)
                .map(|_| shift + (0..3).map(|_| r.random_range(-1.0..1.0)).sum::<f64>())
                .collect(),
        );
        labels.push(y);
    }
    Dataset::from_rows(&rows, &labels).unwrap()
}

/// Uniform features with random labels; both classes guaranteed.
pub fn noise(n: usize, p: usize, seed: u64) -> Dataset {
    let mut r = rng::stream(seed);
    let rows: Vec<Vec<f64>> = (0..n).map(|_| (0..p).map(|_| r.random_range(-2.0..2.0)).collect()).collect();
    let mut labels: Vec<u8> = (0..n).map(|_| r.random_range(0..2)).collect();
    labels[0] = 0;
    labels[1] = 1;
    Dataset::from_rows(&rows, &labels).unwrap()
}

pub fn accuracy(model: &dyn medstack_core::Classifier, d: &Dataset) -> f64 {
    let hits = (0..d.n_samples()).filter(|&i| model.predict(d.row(i)) == d.labels()[i]).count();
    hits as f64 / d.n_samples() as f64
}

pub fn rel_err(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs()).max(1e-8)
}
