//! Tabular data: schemas, CSV loading, imputation, scaling and fold plans.

mod dataset;
mod folds;
mod preprocess;
mod schema;

pub use dataset::{class_distribution, load_csv, load_csv_bytes, ClassDistribution, Dataset};
pub use folds::{stratified_kfold, Fold, FoldPlan};
pub use preprocess::{impute_missing, median, standardize, ScalerParams};
pub use schema::{ColumnSpec, ColumnType, DatasetSchema};
