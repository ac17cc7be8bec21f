use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};

use super::dataset::Dataset;
use crate::error::{Error, Result};
use crate::rng;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Fold {
    pub train: Vec<usize>,
    pub test: Vec<usize>,
}

/// A k-way partition of `0..n` into test sets, each paired with its
/// complement as the training set. Index lists are sorted ascending.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FoldPlan {
    pub k: usize,
    pub seed: u64,
    pub folds: Vec<Fold>,
}

impl FoldPlan {
    /// Builds a plan from explicit test sets, checking that they partition `0..n`.
    pub fn from_test_sets(n: usize, test_sets: Vec<Vec<usize>>, seed: u64) -> Result<Self> {
        let mut owner = vec![usize::MAX; n];
        for (f, set) in test_sets.iter().enumerate() {
            for &i in set {
                if i >= n {
                    return Err(Error::InvalidParameter(format!("index {i} out of range 0..{n}")));
                }
                if owner[i] != usize::MAX {
                    return Err(Error::InvalidParameter(format!("index {i} appears in two test sets")));
                }
                owner[i] = f;
            }
        }
        if let Some(i) = owner.iter().position(|&o| o == usize::MAX) {
            return Err(Error::InvalidParameter(format!("index {i} is in no test set")));
        }
        let k = test_sets.len();
        let folds = (0..k)
            .map(|f| {
                let (test, train): (Vec<usize>, Vec<usize>) = (0..n).partition(|&i| owner[i] == f);
                Fold { train, test }
            })
            .collect();
        Ok(FoldPlan { k, seed, folds })
    }

    pub fn n_samples(&self) -> usize {
        self.folds.iter().map(|f| f.test.len()).sum()
    }

    /// For every sample, the fold whose test set holds it.
    pub fn test_fold_of(&self) -> Vec<usize> {
        let mut owner = vec![0; self.n_samples()];
        for (f, fold) in self.folds.iter().enumerate() {
            for &i in &fold.test {
                owner[i] = f;
            }
        }
        owner
    }
}

/// Stratified k-fold: each class is shuffled with the seeded stream and dealt
/// round-robin across folds, continuing the rotation from one class to the
/// next so fold sizes also differ by at most one.
pub fn stratified_kfold(data: &Dataset, k: usize, seed: u64) -> Result<FoldPlan> {
    let [neg, pos] = data.class_counts();
    let minority = neg.min(pos);
    if k < 2 || k > minority {
        return Err(Error::FoldCount { k, minority });
    }
    let mut rng = rng::stream(seed);
    let mut test_sets = vec![Vec::new(); k];
    let mut offset = 0;
    for class in [0u8, 1] {
        let mut members: Vec<usize> = data
            .labels()
            .iter()
            .enumerate()
            .filter(|(_, &l)| l == class)
            .map(|(i, _)| i)
            .collect();
        members.shuffle(&mut rng);
        for (j, &i) in members.iter().enumerate() {
            test_sets[(offset + j) % k].push(i);
        }
        offset = (offset + members.len()) % k;
    }
    for set in &mut test_sets {
        set.sort_unstable();
    }
    FoldPlan::from_test_sets(data.n_samples(), test_sets, seed)
}
