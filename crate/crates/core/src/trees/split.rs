use ndarray::ArrayView2;

use super::impurity::Criterion;

/// Route `x` left when `x[feature] < threshold`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Split {
    pub feature: usize,
    pub threshold: f64,
    /// Parent impurity minus the weight-averaged child impurities.
    pub decrease: f64,
}

// Decreases within this margin count as ties, so the earlier candidate wins.
const TIE_EPS: f64 = 1e-12;

/// Exhaustive search over midpoints between consecutive distinct values of
/// each candidate feature. Returns the split with the largest impurity
/// decrease, preferring the lower feature index and then the lower threshold
/// on ties, or `None` if no split decreases impurity.
pub fn best_split(
    features: ArrayView2<'_, f64>,
    labels: &[u8],
    candidates: &[usize],
    criterion: Criterion,
) -> Option<Split> {
    let rows: Vec<usize> = (0..labels.len()).collect();
    let weights = vec![1.0; labels.len()];
    let mut sorted = candidates.to_vec();
    sorted.sort_unstable();
    best_split_rows(features, labels, &weights, &rows, &sorted, criterion, 1)
}

/// Weighted search restricted to `rows`; both children must keep at least
/// `min_leaf` samples. `candidates` must be ascending.
pub(crate) fn best_split_rows(
    features: ArrayView2<'_, f64>,
    labels: &[u8],
    weights: &[f64],
    rows: &[usize],
    candidates: &[usize],
    criterion: Criterion,
    min_leaf: usize,
) -> Option<Split> {
    if rows.len() < 2 || rows.len() < 2 * min_leaf {
        return None;
    }
    let mut total = [0.0f64; 2];
    for &i in rows {
        total[labels[i] as usize] += weights[i];
    }
    let total_w = total[0] + total[1];
    if total_w <= 0.0 {
        return None;
    }
    let parent = criterion.impurity(total[0], total[1]);
    if parent <= 0.0 {
        return None;
    }

    let mut best: Option<Split> = None;
    let mut column: Vec<(f64, u8, f64)> = Vec::with_capacity(rows.len());
    for &f in candidates {
        column.clear();
        column.extend(rows.iter().map(|&i| (features[[i, f]], labels[i], weights[i])));
        column.sort_by(|a, b| a.0.total_cmp(&b.0));
        let mut left = [0.0f64; 2];
        for pos in 0..column.len() - 1 {
            let (value, label, w) = column[pos];
            left[label as usize] += w;
            let next = column[pos + 1].0;
            if next <= value {
                continue;
            }
            let n_left = pos + 1;
            if n_left < min_leaf || column.len() - n_left < min_leaf {
                continue;
            }
            let right = [total[0] - left[0], total[1] - left[1]];
            let wl = left[0] + left[1];
            let wr = right[0] + right[1];
            let children = (wl * criterion.impurity(left[0], left[1])
                + wr * criterion.impurity(right[0].max(0.0), right[1].max(0.0)))
                / total_w;
            let decrease = parent - children;
            if decrease <= TIE_EPS {
                continue;
            }
            if best.is_none_or(|b| decrease > b.decrease + TIE_EPS) {
                best = Some(Split {
                    feature: f,
                    threshold: midpoint(value, next),
                    decrease,
                });
            }
        }
    }
    best
}

/// Midpoint strictly above `lo`, so that `lo` routes left and `hi` right.
fn midpoint(lo: f64, hi: f64) -> f64 {
    let mid = lo + (hi - lo) / 2.0;
    if mid > lo && mid <= hi {
        mid
    } else {
        hi
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::array;

    #[test]
    fn separates_two_clusters_at_midpoint() {
        let x = array![[1.0], [2.0], [8.0], [9.0]];
        let s = best_split(x.view(), &[0, 0, 1, 1], &[0], Criterion::Entropy).unwrap();
        assert_eq!(s.feature, 0);
        assert_eq!(s.threshold, 5.0);
        assert!((s.decrease - 1.0).abs() < 1e-15);
    }

    #[test]
    fn pure_node_has_no_split() {
        let x = array![[1.0], [2.0], [3.0]];
        assert!(best_split(x.view(), &[1, 1, 1], &[0], Criterion::Gini).is_none());
    }

    #[test]
    fn constant_feature_has_no_split() {
        let x = array![[4.0], [4.0], [4.0], [4.0]];
        assert!(best_split(x.view(), &[0, 1, 0, 1], &[0], Criterion::Gini).is_none());
    }

    #[test]
    fn ties_prefer_lower_feature() {
        // Both columns separate the classes perfectly.
        let x = array![[0.0, 10.0], [1.0, 11.0], [5.0, 20.0], [6.0, 21.0]];
        let s = best_split(x.view(), &[0, 0, 1, 1], &[1, 0], Criterion::Gini).unwrap();
        assert_eq!(s.feature, 0);
        assert_eq!(s.threshold, 3.0);
    }

    #[test]
    fn min_leaf_restricts_candidates() {
        let x = array![[0.0], [1.0], [2.0], [3.0]];
        let labels = [1, 0, 0, 0];
        let rows = [0, 1, 2, 3];
        let w = [1.0; 4];
        let s = best_split_rows(x.view(), &labels, &w, &rows, &[0], Criterion::Gini, 1).unwrap();
        assert_eq!(s.threshold, 0.5);
        let s = best_split_rows(x.view(), &labels, &w, &rows, &[0], Criterion::Gini, 2).unwrap();
        assert_eq!(s.threshold, 1.5);
    }

    #[test]
    fn adjacent_floats_route_correctly() {
        let lo = 1.0f64;
        let hi = f64::from_bits(lo.to_bits() + 1);
        let t = midpoint(lo, hi);
        assert!(lo < t && hi >= t);
    }
}
