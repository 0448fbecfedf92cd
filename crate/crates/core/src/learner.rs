//! Uniform train/predict interface used by cross-validation.

use crate::dataset::{ClassDistribution, Dataset};
use crate::evaluation::EvaluationError;
use crate::naive_bayes::{self, NaiveBayesConfig, NaiveBayesModel};
use crate::svm::{self, KernelSpec, SvmModel, TrainerConfig};

pub trait Learner: Sync {
    type Model: Send + Sync;

    fn name(&self) -> String;

    fn fit(&self, train: &Dataset) -> Result<Self::Model, EvaluationError>;

    fn predict(&self, model: &Self::Model, features: &[f64]) -> Result<ClassDistribution, EvaluationError>;
}

/// Naive Bayes over an all-continuous schema.
#[derive(Debug, Clone, Default)]
pub struct NaiveBayesLearner {
    pub config: NaiveBayesConfig,
}

impl Learner for NaiveBayesLearner {
    type Model = NaiveBayesModel;

    fn name(&self) -> String {
        "naive Bayes".into()
    }

    fn fit(&self, train: &Dataset) -> Result<NaiveBayesModel, EvaluationError> {
        Ok(naive_bayes::train_continuous(train, &self.config)?)
    }

    fn predict(&self, model: &NaiveBayesModel, features: &[f64]) -> Result<ClassDistribution, EvaluationError> {
        Ok(model.predict_distribution(features)?)
    }
}

/// SVM with one-hot output distributions.
#[derive(Debug, Clone, Default)]
pub struct SvmLearner {
    pub kernel: KernelSpec,
    pub config: TrainerConfig,
}

impl Learner for SvmLearner {
    type Model = SvmModel;

    fn name(&self) -> String {
        format!("SVM ({})", self.kernel)
    }

    fn fit(&self, train: &Dataset) -> Result<SvmModel, EvaluationError> {
        Ok(svm::train_smo(train, self.kernel, &self.config)?.model)
    }

    fn predict(&self, model: &SvmModel, features: &[f64]) -> Result<ClassDistribution, EvaluationError> {
        Ok(svm::hard_distribution(model, features)?)
    }
}
