//! Bagging, discrete AdaBoost and stacked generalization over any [`Learner`].
//!
//! [`Learner`]: crate::learners::Learner

mod adaboost;
mod bagging;
mod stacking;

pub use adaboost::{adaboost_round, fit_adaboost, stage_weight, AdaBoostModel, BoostRound, EPSILON_FLOOR};
pub use bagging::{fit_bagging, BaggedModel};
pub use stacking::{build_meta_features, fit_stacking, MetaFeatures, StackedModel, StackingMode};
