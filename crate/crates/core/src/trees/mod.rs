//! Impurity measures, exhaustive threshold search, greedy tree induction and
//! random forests.

mod forest;
mod impurity;
mod split;
mod tree;

pub use forest::{fit_random_forest, ForestModel, ForestParams};
pub use impurity::{entropy, gini_impurity, Criterion};
pub use split::{best_split, Split};
pub use tree::{fit_tree, fit_tree_weighted, DecisionTree, TreeNode, TreeParams};
