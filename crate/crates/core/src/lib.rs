//! Naive Bayes and support vector machine classifiers for daily market-direction
//! forecasting, with the data pipeline, stratified cross-validation and the
//! evaluation metrics needed to compare them.
//!
//! The crate is organised bottom-up:
//!
//! * [`dataset`] loads labeled samples, turns raw price series into features and
//!   assigns stratified folds.
//! * [`naive_bayes`] fits Gaussian / categorical naive Bayes models.
//! * [`svm`] trains kernel SVMs with sequential minimal optimization.
//! * [`evaluation`] pools cross-validated predictions into an [`EvaluationReport`].
//! * [`report`] renders reports as text or as a `key = value` document.

pub mod dataset;
pub mod evaluation;
pub mod kv;
pub mod learner;
pub mod naive_bayes;
pub mod report;
pub mod svm;

pub use dataset::{ClassDistribution, Dataset, Direction, FoldAssignment, Sample};
pub use evaluation::{ConfusionMatrix, EvaluationReport, PredictionRecord};
pub use learner::{Learner, NaiveBayesLearner, SvmLearner};
pub use naive_bayes::NaiveBayesModel;
pub use svm::{KernelSpec, SvmModel, TrainerConfig};
