//! Random-forest classifier and stratified cross-validation.

mod cv;
mod forest;
mod tree;

pub use cv::{cross_val_accuracy, fold_assignment, CvScore, Folds};
pub use forest::{rf_fit, rf_predict, Forest, ForestParams};
