use std::fmt::Write as _;

use rand::seq::index;
use serde::{Deserialize, Serialize};

use super::impurity::Criterion;
use super::split::best_split_rows;
use crate::data::Dataset;
use crate::error::{Error, Result};
use crate::learners::Classifier;
use crate::rng::{self, Rng};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TreeParams {
    pub criterion: Criterion,
    /// Depth of the deepest split; a stump has depth 1.
    pub max_depth: usize,
    pub min_leaf: usize,
    pub min_impurity_decrease: f64,
    /// Features sampled (without replacement) at every split; `None` = all.
    pub max_features: Option<usize>,
}

impl Default for TreeParams {
    fn default() -> Self {
        TreeParams {
            criterion: Criterion::Entropy,
            max_depth: 12,
            min_leaf: 2,
            min_impurity_decrease: 1e-7,
            max_features: None,
        }
    }
}

impl TreeParams {
    pub fn stump() -> Self {
        TreeParams {
            criterion: Criterion::Gini,
            max_depth: 1,
            min_leaf: 1,
            ..Default::default()
        }
    }

    fn validate(&self, n_features: usize) -> Result<()> {
        if self.max_depth < 1 {
            return Err(Error::InvalidParameter("tree: max_depth must be >= 1".into()));
        }
        if self.min_leaf < 1 {
            return Err(Error::InvalidParameter("tree: min_leaf must be >= 1".into()));
        }
        if let Some(m) = self.max_features {
            if m < 1 || m > n_features {
                return Err(Error::InvalidParameter(format!(
                    "tree: max_features = {m} must be in 1..={n_features}"
                )));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum TreeNode {
    Split {
        feature: usize,
        threshold: f64,
        left: usize,
        right: usize,
    },
    Leaf {
        /// (Weighted) fraction of class-1 samples that reached this leaf.
        positive_fraction: f64,
        samples: usize,
    },
}

/// Binary classification tree stored as an arena; node 0 is the root.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecisionTree {
    nodes: Vec<TreeNode>,
    n_features: usize,
    depth: usize,
}

impl DecisionTree {
    pub fn nodes(&self) -> &[TreeNode] {
        &self.nodes
    }

    pub fn depth(&self) -> usize {
        self.depth
    }

    /// Index of the leaf reached by `x`.
    pub fn leaf_index(&self, x: &[f64]) -> usize {
        let mut at = 0;
        loop {
            match self.nodes[at] {
                TreeNode::Split {
                    feature,
                    threshold,
                    left,
                    right,
                } => at = if x[feature] < threshold { left } else { right },
                TreeNode::Leaf { .. } => return at,
            }
        }
    }

    /// One node per line, indented by depth:
    /// `split feature=<f> threshold=<t>` or `leaf fraction=<p> samples=<n>`.
    pub fn export_text(&self) -> String {
        let mut out = String::new();
        let mut stack = vec![(0usize, 0usize)];
        while let Some((at, depth)) = stack.pop() {
            let pad = "  ".repeat(depth);
            match &self.nodes[at] {
                TreeNode::Split {
                    feature,
                    threshold,
                    left,
                    right,
                } => {
                    let _ = writeln!(out, "{pad}split feature={feature} threshold={threshold}");
                    stack.push((*right, depth + 1));
                    stack.push((*left, depth + 1));
                }
                TreeNode::Leaf {
                    positive_fraction,
                    samples,
                } => {
                    let _ = writeln!(out, "{pad}leaf fraction={positive_fraction} samples={samples}");
                }
            }
        }
        out
    }
}

impl Classifier for DecisionTree {
    fn predict_proba(&self, x: &[f64]) -> f64 {
        match self.nodes[self.leaf_index(x)] {
            TreeNode::Leaf {
                positive_fraction, ..
            } => positive_fraction,
            TreeNode::Split { .. } => unreachable!("leaf_index returns leaves"),
        }
    }

    fn n_features(&self) -> usize {
        self.n_features
    }
}

/// Greedy top-down induction with uniform sample weights.
pub fn fit_tree(train: &Dataset, params: &TreeParams, seed: u64) -> Result<DecisionTree> {
    let weights = vec![1.0; train.n_samples()];
    fit_tree_weighted(train, &weights, params, seed)
}

/// Greedy induction where impurities and leaf fractions use `weights`;
/// `min_leaf` still counts samples. `seed` drives per-split feature sampling.
pub fn fit_tree_weighted(
    train: &Dataset,
    weights: &[f64],
    params: &TreeParams,
    seed: u64,
) -> Result<DecisionTree> {
    if train.is_empty() {
        return Err(Error::Empty("training set"));
    }
    if weights.len() != train.n_samples() {
        return Err(Error::LengthMismatch {
            left: weights.len(),
            right: train.n_samples(),
        });
    }
    if weights.iter().any(|w| !(w.is_finite() && *w >= 0.0)) {
        return Err(Error::InvalidParameter("tree: weights must be finite and >= 0".into()));
    }
    params.validate(train.n_features())?;
    let mut builder = Builder {
        train,
        weights,
        params,
        rng: rng::stream(seed),
        nodes: Vec::new(),
        depth: 0,
    };
    let rows: Vec<usize> = (0..train.n_samples()).collect();
    builder.grow(rows, 0);
    Ok(DecisionTree {
        nodes: builder.nodes,
        n_features: train.n_features(),
        depth: builder.depth,
    })
}

struct Builder<'a> {
    train: &'a Dataset,
    weights: &'a [f64],
    params: &'a TreeParams,
    rng: Rng,
    nodes: Vec<TreeNode>,
    depth: usize,
}

impl Builder<'_> {
    fn candidates(&mut self) -> Vec<usize> {
        let p = self.train.n_features();
        match self.params.max_features {
            Some(m) if m < p => {
                let mut picked = index::sample(&mut self.rng, p, m).into_vec();
                picked.sort_unstable();
                picked
            }
            _ => (0..p).collect(),
        }
    }

    fn leaf(&self, rows: &[usize]) -> TreeNode {
        let labels = self.train.labels();
        let (mut w1, mut total) = (0.0, 0.0);
        for &i in rows {
            total += self.weights[i];
            if labels[i] == 1 {
                w1 += self.weights[i];
            }
        }
        let positive_fraction = if total > 0.0 {
            (w1 / total).clamp(0.0, 1.0)
        } else {
            let pos = rows.iter().filter(|&&i| labels[i] == 1).count();
            pos as f64 / rows.len() as f64
        };
        TreeNode::Leaf {
            positive_fraction,
            samples: rows.len(),
        }
    }

    fn grow(&mut self, rows: Vec<usize>, depth: usize) -> usize {
        let at = self.nodes.len();
        self.nodes.push(self.leaf(&rows));
        if depth >= self.params.max_depth {
            return at;
        }
        let candidates = self.candidates();
        let Some(split) = best_split_rows(
            self.train.features(),
            self.train.labels(),
            self.weights,
            &rows,
            &candidates,
            self.params.criterion,
            self.params.min_leaf,
        ) else {
            return at;
        };
        if split.decrease < self.params.min_impurity_decrease {
            return at;
        }
        let features = self.train.features();
        let (left_rows, right_rows): (Vec<usize>, Vec<usize>) = rows
            .iter()
            .partition(|&&i| features[[i, split.feature]] < split.threshold);
        drop(rows);
        self.depth = self.depth.max(depth + 1);
        let left = self.grow(left_rows, depth + 1);
        let right = self.grow(right_rows, depth + 1);
        self.nodes[at] = TreeNode::Split {
            feature: split.feature,
            threshold: split.threshold,
            left,
            right,
        };
        at
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn accuracy(tree: &DecisionTree, d: &Dataset) -> f64 {
        let hits = (0..d.n_samples()).filter(|&i| tree.predict(d.row(i)) == d.labels()[i]).count();
        hits as f64 / d.n_samples() as f64
    }

    fn leaf_counts(tree: &DecisionTree) -> usize {
        tree.nodes()
            .iter()
            .map(|n| match n {
                TreeNode::Leaf { samples, .. } => *samples,
                TreeNode::Split { .. } => 0,
            })
            .sum()
    }

    #[test]
    fn two_points_need_one_split() {
        let d = Dataset::from_rows(&[vec![0.0], vec![1.0]], &[0, 1]).unwrap();
        let params = TreeParams {
            min_leaf: 1,
            ..Default::default()
        };
        let t = fit_tree(&d, &params, 0).unwrap();
        assert_eq!(t.depth(), 1);
        assert_eq!(accuracy(&t, &d), 1.0);
    }

    #[test]
    fn xor_stump_is_no_better_than_enumerated_bound() {
        let rows = vec![vec![0.0, 0.0], vec![0.0, 1.0], vec![1.0, 0.0], vec![1.0, 1.0]];
        let labels = [0, 1, 1, 0];
        let d = Dataset::from_rows(&rows, &labels).unwrap();
        // Oracle: every stump (feature, threshold among -0.5, 0.5, 1.5) with
        // majority leaves.
        let mut best_stump = 0.0f64;
        for f in 0..2 {
            for t in [-0.5, 0.5, 1.5] {
                let mut hits = 0;
                for side in [true, false] {
                    let members: Vec<u8> = (0..4)
                        .filter(|&i| (rows[i][f] < t) == side)
                        .map(|i| labels[i])
                        .collect();
                    let pos = members.iter().filter(|&&l| l == 1).count();
                    hits += pos.max(members.len() - pos);
                }
                best_stump = best_stump.max(hits as f64 / 4.0);
            }
        }
        let params = TreeParams {
            max_depth: 1,
            min_leaf: 1,
            ..Default::default()
        };
        let t = fit_tree(&d, &params, 0).unwrap();
        assert!(accuracy(&t, &d) <= best_stump);
        assert!(accuracy(&t, &d) <= 0.75);
    }

    #[test]
    fn zero_depth_is_rejected() {
        let d = Dataset::from_rows(&[vec![0.0], vec![1.0]], &[0, 1]).unwrap();
        let params = TreeParams {
            max_depth: 0,
            ..Default::default()
        };
        assert!(fit_tree(&d, &params, 0).is_err());
    }

    #[test]
    fn pure_set_is_a_single_leaf() {
        let d = Dataset::from_rows(&[vec![0.0], vec![1.0], vec![2.0]], &[1, 1, 1]).unwrap();
        let t = fit_tree(&d, &TreeParams::default(), 0).unwrap();
        assert_eq!(
            t.nodes(),
            &[TreeNode::Leaf {
                positive_fraction: 1.0,
                samples: 3
            }]
        );
    }

    #[test]
    fn leaf_counts_sum_to_n_and_export_lists_every_node() {
        let rows: Vec<Vec<f64>> = (0..40).map(|i| vec![(i * 7 % 13) as f64, (i % 5) as f64]).collect();
        let labels: Vec<u8> = (0..40).map(|i| u8::from(i * 7 % 13 > 6)).collect();
        let d = Dataset::from_rows(&rows, &labels).unwrap();
        let t = fit_tree(&d, &TreeParams::default(), 3).unwrap();
        assert_eq!(leaf_counts(&t), 40);
        assert_eq!(t.export_text().lines().count(), t.nodes().len());
        assert!(t.export_text().starts_with("split feature=0"));
    }

    #[test]
    fn weights_shift_the_leaf_fraction() {
        let d = Dataset::from_rows(&[vec![0.0], vec![0.0]], &[0, 1]).unwrap();
        let t = fit_tree_weighted(&d, &[0.25, 0.75], &TreeParams::default(), 0).unwrap();
        assert_eq!(t.predict_proba(&[0.0]), 0.75);
    }
}
