//! Classifiers, ensembles and stacked generalization for small binary-class
//! tabular problems (diabetes, breast cancer, heart disease).
//!
//! The crate is organised bottom-up:
//!
//! - [`data`]: CSV ingestion against a column schema, median imputation,
//!   z-score scaling and stratified k-fold plans.
//! - [`learners`]: the uniform [`Classifier`]/[`Learner`] contract plus linear
//!   regression, logistic regression, Gaussian naive Bayes, k-NN and a linear SVM.
//! - [`trees`]: impurity measures, split search, decision trees and random forests.
//! - [`ensembles`]: bagging, discrete AdaBoost and stacking with out-of-fold
//!   meta-features.
//! - [`neural`]: a small multilayer perceptron used standalone and as a stacking
//!   meta-learner.
//! - [`metrics`]: confusion matrices, the derived rates, ROC curves and AUC.
//!
//! Every randomized routine takes an explicit `u64` seed; see [`rng`] for how
//! per-fold and per-learner streams are derived from a master seed.

pub mod data;
pub mod ensembles;
pub mod error;
pub mod learners;
pub mod linalg;
pub mod metrics;
pub mod neural;
pub mod rng;
pub mod spec;
pub mod trees;

pub use data::{Dataset, DatasetSchema, FoldPlan, ScalerParams};
pub use error::{Error, Result};
pub use learners::{Classifier, Learner};
pub use spec::LearnerSpec;
