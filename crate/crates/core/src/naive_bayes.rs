//! Naive Bayes with Gaussian likelihoods for continuous attributes and
//! smoothed frequency tables for categorical ones.
//!
//! Class scores are `ln P(C) + sum_k ln P(x_k | C)`, normalized with the
//! max-subtraction trick, so wide schemas and extreme inputs stay finite.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use crate::dataset::{ClassDistribution, Dataset, DatasetError, Direction};
use crate::kv::{self, KvDocument, KvError};

/// Smallest standard deviation a fitted Gaussian may have (percent units).
pub const SIGMA_FLOOR: f64 = 1e-9;

/// Precision used when an attribute has a single distinct value.
pub const DEFAULT_PRECISION: f64 = 0.01;

const MODEL_FORMAT: &str = "setcast-naive-bayes/1";

#[derive(Debug, thiserror::Error)]
pub enum NaiveBayesError {
    #[error("cannot fit a Gaussian to an empty list")]
    EmptyValues,
    #[error("class {0} has no training samples")]
    MissingClass(Direction),
    #[error("empty training set")]
    EmptyDataset,
    #[error("schema mismatch: model has {expected} attributes, sample has {found}")]
    SchemaMismatch { expected: usize, found: usize },
    #[error("attribute {0} is not a categorical attribute of this model")]
    UnknownAttribute(usize),
    #[error("invalid Gaussian parameters mu={mu}, sigma={sigma}")]
    InvalidParams { mu: f64, sigma: f64 },
    #[error("non-finite feature value {0}")]
    NonFinite(f64),
    #[error("malformed model file: {0}")]
    Format(String),
    #[error(transparent)]
    Kv(#[from] KvError),
    #[error(transparent)]
    Dataset(#[from] DatasetError),
}

type Result<T> = std::result::Result<T, NaiveBayesError>;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaussianParams {
    pub mu: f64,
    pub sigma: f64,
}

impl GaussianParams {
    pub fn new(mu: f64, sigma: f64) -> Result<Self> {
        if mu.is_finite() && sigma.is_finite() && sigma >= SIGMA_FLOOR {
            Ok(GaussianParams { mu, sigma })
        } else {
            Err(NaiveBayesError::InvalidParams { mu, sigma })
        }
    }

    pub fn pdf(&self, x: f64) -> f64 {
        gaussian_pdf(x, self)
    }

    pub fn ln_pdf(&self, x: f64) -> f64 {
        let z = (x - self.mu) / self.sigma;
        -0.5 * z * z - self.sigma.ln() - 0.5 * (2.0 * PI).ln()
    }
}

/// `exp(-(x - mu)^2 / (2 sigma^2)) / (sqrt(2 pi) sigma)`
pub fn gaussian_pdf(x: f64, params: &GaussianParams) -> f64 {
    let z = (x - params.mu) / params.sigma;
    (-0.5 * z * z).exp() / ((2.0 * PI).sqrt() * params.sigma)
}

/// Denominator of the plain standard deviation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SigmaConvention {
    /// Divide by `n`.
    Population,
    /// Divide by `n - 1`.
    Sample,
}

/// Arithmetic mean and standard deviation, floored at [`SIGMA_FLOOR`].
pub fn fit_gaussian(values: &[f64], convention: SigmaConvention) -> Result<GaussianParams> {
    if values.is_empty() {
        return Err(NaiveBayesError::EmptyValues);
    }
    let n = values.len() as f64;
    let mu = values.iter().sum::<f64>() / n;
    let ss: f64 = values.iter().map(|v| (v - mu) * (v - mu)).sum();
    let denom = match convention {
        SigmaConvention::Population => n,
        SigmaConvention::Sample => n - 1.0,
    };
    let sigma = if denom > 0.0 { (ss / denom).sqrt() } else { 0.0 };
    GaussianParams::new(mu, sigma.max(SIGMA_FLOOR))
}

/// Average gap between consecutive distinct values of an attribute.
///
/// This is the resolution at which the attribute was recorded; values are
/// snapped to it before fitting under [`DensityEstimator::PrecisionRounded`].
pub fn numeric_precision(values: &[f64]) -> f64 {
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    let mut gaps = 0.0;
    let mut distinct = 0usize;
    for pair in sorted.windows(2) {
        if pair[1] != pair[0] {
            gaps += pair[1] - pair[0];
            distinct += 1;
        }
    }
    if distinct == 0 {
        DEFAULT_PRECISION
    } else {
        gaps / distinct as f64
    }
}

/// Mean and population deviation of the values snapped to `precision`
/// (round half to even); the deviation is floored at `precision / 6`.
pub fn fit_gaussian_rounded(values: &[f64], precision: f64) -> Result<GaussianParams> {
    if values.is_empty() {
        return Err(NaiveBayesError::EmptyValues);
    }
    let n = values.len() as f64;
    let mut sum = 0.0;
    let mut sum_sq = 0.0;
    for v in values {
        let r = (v / precision).round_ties_even() * precision;
        sum += r;
        sum_sq += r * r;
    }
    let mu = sum / n;
    let sd = ((sum_sq - mu * sum).abs() / n).sqrt();
    GaussianParams::new(mu, sd.max(precision / 6.0).max(SIGMA_FLOOR))
}

/// How continuous attributes are summarized per class.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum DensityEstimator {
    /// Values snapped to the attribute's [`numeric_precision`] over the whole
    /// training set, then mean and population deviation.
    #[default]
    PrecisionRounded,
    Population,
    Sample,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum PriorMode {
    #[default]
    Frequency,
    Uniform,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Smoothing {
    /// `(count + 1) / (n_class + |V|)` with `V` the values seen in training.
    #[default]
    AddOne,
    /// Raw `count / n_class`; a value absent from the class scores
    /// `1 / freq(value in T)`.
    FrequencyFallback,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AttributeKind {
    Continuous,
    Categorical,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct NaiveBayesConfig {
    pub priors: PriorMode,
    pub smoothing: Smoothing,
    pub estimator: DensityEstimator,
}

macro_rules! keyword_enum {
    ($ty:ty { $($variant:ident => $name:literal),+ $(,)? }) => {
        impl fmt::Display for $ty {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str(match self { $(Self::$variant => $name),+ })
            }
        }

        impl FromStr for $ty {
            type Err = String;

            fn from_str(s: &str) -> std::result::Result<Self, String> {
                match s {
                    $($name => Ok(Self::$variant),)+
                    other => Err(format!("unknown value {other:?}")),
                }
            }
        }
    };
}

keyword_enum!(PriorMode { Frequency => "frequency", Uniform => "uniform" });
keyword_enum!(Smoothing { AddOne => "add-one", FrequencyFallback => "paper" });
keyword_enum!(DensityEstimator {
    PrecisionRounded => "precision-rounded",
    Population => "population",
    Sample => "sample",
});
keyword_enum!(AttributeKind { Continuous => "gaussian", Categorical => "categorical" });

/// Class probabilities `P(C)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClassPriors([f64; 2]);

impl ClassPriors {
    pub fn uniform() -> Self {
        ClassPriors([0.5, 0.5])
    }

    pub fn get(&self, class: Direction) -> f64 {
        self.0[class.index()]
    }

    pub fn values(&self) -> [f64; 2] {
        self.0
    }
}

/// `P(C) = count(C) / n`. Every class must be present.
pub fn estimate_priors(dataset: &Dataset) -> Result<ClassPriors> {
    if dataset.is_empty() {
        return Err(NaiveBayesError::EmptyDataset);
    }
    let counts = dataset.class_counts();
    for class in Direction::ALL {
        if counts[class.index()] == 0 {
            return Err(NaiveBayesError::MissingClass(class));
        }
    }
    let n = dataset.len() as f64;
    Ok(ClassPriors([counts[0] as f64 / n, counts[1] as f64 / n]))
}

/// Per-class frequency table of one categorical attribute.
#[derive(Debug, Clone, PartialEq)]
pub struct CategoricalTable {
    /// Distinct values seen in training, ascending.
    values: Vec<f64>,
    /// `counts[class][value_index]`
    counts: [Vec<usize>; 2],
    smoothing: Smoothing,
}

impl CategoricalTable {
    fn fit(dataset: &Dataset, attribute: usize, smoothing: Smoothing) -> Self {
        let mut values = dataset.column(attribute, None);
        values.sort_by(f64::total_cmp);
        values.dedup();
        let mut counts = [vec![0; values.len()], vec![0; values.len()]];
        for s in dataset.samples() {
            let v = s.features[attribute];
            let slot = values.binary_search_by(|p| p.total_cmp(&v)).unwrap();
            counts[s.label.index()][slot] += 1;
        }
        CategoricalTable {
            values,
            counts,
            smoothing,
        }
    }

    fn from_counts(values: Vec<f64>, counts: [Vec<usize>; 2], smoothing: Smoothing) -> Self {
        CategoricalTable {
            values,
            counts,
            smoothing,
        }
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn count(&self, class: Direction, value: f64) -> usize {
        self.slot(value).map_or(0, |i| self.counts[class.index()][i])
    }

    fn slot(&self, value: f64) -> Option<usize> {
        self.values.binary_search_by(|p| p.total_cmp(&value)).ok()
    }

    fn class_total(&self, class: Direction) -> usize {
        self.counts[class.index()].iter().sum()
    }

    /// `P(value | class)`; strictly positive for every query value.
    pub fn likelihood(&self, class: Direction, value: f64) -> f64 {
        let count = self.count(class, value) as f64;
        let class_total = self.class_total(class) as f64;
        match self.smoothing {
            Smoothing::AddOne => (count + 1.0) / (class_total + self.values.len() as f64),
            Smoothing::FrequencyFallback => {
                if count > 0.0 {
                    count / class_total
                } else {
                    let overall = self.count(Direction::Up, value) + self.count(Direction::Down, value);
                    if overall > 0 {
                        1.0 / overall as f64
                    } else {
                        let n = self.class_total(Direction::Up) + self.class_total(Direction::Down);
                        1.0 / (n as f64 + 1.0)
                    }
                }
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum AttributeModel {
    /// Indexed by class: `[UP, DOWN]`.
    Gaussian([GaussianParams; 2]),
    Categorical(CategoricalTable),
}

#[derive(Debug, Clone, PartialEq)]
pub struct NaiveBayesModel {
    feature_names: Vec<String>,
    priors: ClassPriors,
    prior_mode: PriorMode,
    attributes: Vec<AttributeModel>,
}

impl NaiveBayesModel {
    pub fn priors(&self) -> ClassPriors {
        self.priors
    }

    pub fn feature_names(&self) -> &[String] {
        &self.feature_names
    }

    pub fn attributes(&self) -> &[AttributeModel] {
        &self.attributes
    }

    /// Gaussian parameters of a continuous attribute for one class.
    pub fn gaussian(&self, attribute: usize, class: Direction) -> Option<GaussianParams> {
        match self.attributes.get(attribute)? {
            AttributeModel::Gaussian(params) => Some(params[class.index()]),
            AttributeModel::Categorical(_) => None,
        }
    }

    /// Unnormalized log scores `ln P(C) + sum ln P(x_k | C)`.
    pub fn log_scores(&self, features: &[f64]) -> Result<[f64; 2]> {
        if features.len() != self.attributes.len() {
            return Err(NaiveBayesError::SchemaMismatch {
                expected: self.attributes.len(),
                found: features.len(),
            });
        }
        if let Some(&bad) = features.iter().find(|v| !v.is_finite()) {
            return Err(NaiveBayesError::NonFinite(bad));
        }
        let mut scores = [0.0; 2];
        for class in Direction::ALL {
            let mut score = self.priors.get(class).ln();
            for (attribute, &x) in self.attributes.iter().zip(features) {
                score += match attribute {
                    AttributeModel::Gaussian(params) => params[class.index()].ln_pdf(x),
                    AttributeModel::Categorical(table) => table.likelihood(class, x).ln(),
                };
            }
            scores[class.index()] = score;
        }
        Ok(scores)
    }

    pub fn predict_distribution(&self, features: &[f64]) -> Result<ClassDistribution> {
        let scores = self.log_scores(features)?;
        let max = scores[0].max(scores[1]);
        let weights = scores.map(|s| (s - max).exp());
        let total = weights[0] + weights[1];
        Ok(ClassDistribution::new(weights.map(|w| w / total))?)
    }

    /// Maximum-posterior class; ties go to UP.
    pub fn classify(&self, features: &[f64]) -> Result<Direction> {
        Ok(self.predict_distribution(features)?.argmax())
    }

    pub fn to_kv(&self) -> KvDocument {
        let mut doc = KvDocument::new();
        doc.push("format", MODEL_FORMAT);
        doc.push("classes", kv::join(Direction::ALL));
        doc.push("priors.mode", self.prior_mode);
        for class in Direction::ALL {
            doc.push(format!("prior.{class}"), self.priors.get(class));
        }
        doc.push("features", self.feature_names.join(","));
        for (i, attribute) in self.attributes.iter().enumerate() {
            match attribute {
                AttributeModel::Gaussian(params) => {
                    doc.push(format!("attr.{i}.kind"), AttributeKind::Continuous);
                    for class in Direction::ALL {
                        let p = params[class.index()];
                        doc.push(format!("attr.{i}.{class}.mu"), p.mu);
                        doc.push(format!("attr.{i}.{class}.sigma"), p.sigma);
                    }
                }
                AttributeModel::Categorical(table) => {
                    doc.push(format!("attr.{i}.kind"), AttributeKind::Categorical);
                    doc.push(format!("attr.{i}.smoothing"), table.smoothing);
                    doc.push(format!("attr.{i}.values"), kv::join(&table.values));
                    for class in Direction::ALL {
                        doc.push(
                            format!("attr.{i}.{class}.counts"),
                            kv::join(&table.counts[class.index()]),
                        );
                    }
                }
            }
        }
        doc
    }

    pub fn to_text(&self) -> String {
        format!("# naive Bayes model\n{}", self.to_kv().render())
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let doc = KvDocument::parse(text)?;
        if doc.require("format")? != MODEL_FORMAT {
            return Err(NaiveBayesError::Format(format!("expected format {MODEL_FORMAT}")));
        }
        let prior_mode: PriorMode = doc.parse_value("priors.mode")?;
        let priors = ClassPriors([doc.parse_value("prior.UP")?, doc.parse_value("prior.DOWN")?]);
        let feature_names: Vec<String> = doc.parse_list("features")?;
        let mut attributes = Vec::with_capacity(feature_names.len());
        for i in 0..feature_names.len() {
            let kind: AttributeKind = doc.parse_value(&format!("attr.{i}.kind"))?;
            attributes.push(match kind {
                AttributeKind::Continuous => {
                    let mut params = [GaussianParams { mu: 0.0, sigma: 1.0 }; 2];
                    for class in Direction::ALL {
                        params[class.index()] = GaussianParams::new(
                            doc.parse_value(&format!("attr.{i}.{class}.mu"))?,
                            doc.parse_value(&format!("attr.{i}.{class}.sigma"))?,
                        )?;
                    }
                    AttributeModel::Gaussian(params)
                }
                AttributeKind::Categorical => {
                    let values: Vec<f64> = doc.parse_list(&format!("attr.{i}.values"))?;
                    let up: Vec<usize> = doc.parse_list(&format!("attr.{i}.UP.counts"))?;
                    let down: Vec<usize> = doc.parse_list(&format!("attr.{i}.DOWN.counts"))?;
                    if up.len() != values.len() || down.len() != values.len() {
                        return Err(NaiveBayesError::Format(format!(
                            "attribute {i}: count lists do not match values"
                        )));
                    }
                    AttributeModel::Categorical(CategoricalTable::from_counts(
                        values,
                        [up, down],
                        doc.parse_value(&format!("attr.{i}.smoothing"))?,
                    ))
                }
            });
        }
        Ok(NaiveBayesModel {
            feature_names,
            priors,
            prior_mode,
            attributes,
        })
    }
}

/// `P(value | class)` for a categorical attribute of a trained model.
pub fn categorical_likelihood(model: &NaiveBayesModel, class: Direction, attribute: usize, value: f64) -> Result<f64> {
    match model.attributes.get(attribute) {
        Some(AttributeModel::Categorical(table)) => Ok(table.likelihood(class, value)),
        _ => Err(NaiveBayesError::UnknownAttribute(attribute)),
    }
}

/// Fits a model; `kinds` gives one [`AttributeKind`] per feature column.
pub fn train(dataset: &Dataset, kinds: &[AttributeKind], config: &NaiveBayesConfig) -> Result<NaiveBayesModel> {
    if kinds.len() != dataset.dim() {
        return Err(NaiveBayesError::SchemaMismatch {
            expected: kinds.len(),
            found: dataset.dim(),
        });
    }
    let frequency_priors = estimate_priors(dataset)?;
    let priors = match config.priors {
        PriorMode::Frequency => frequency_priors,
        PriorMode::Uniform => ClassPriors::uniform(),
    };
    let mut attributes = Vec::with_capacity(kinds.len());
    for (attribute, kind) in kinds.iter().enumerate() {
        attributes.push(match kind {
            AttributeKind::Continuous => {
                let precision = numeric_precision(&dataset.column(attribute, None));
                let mut params = Vec::with_capacity(2);
                for class in Direction::ALL {
                    let values = dataset.column(attribute, Some(class));
                    params.push(match config.estimator {
                        DensityEstimator::PrecisionRounded => fit_gaussian_rounded(&values, precision)?,
                        DensityEstimator::Population => fit_gaussian(&values, SigmaConvention::Population)?,
                        DensityEstimator::Sample => fit_gaussian(&values, SigmaConvention::Sample)?,
                    });
                }
                AttributeModel::Gaussian([params[0], params[1]])
            }
            AttributeKind::Categorical => {
                AttributeModel::Categorical(CategoricalTable::fit(dataset, attribute, config.smoothing))
            }
        });
    }
    Ok(NaiveBayesModel {
        feature_names: dataset.feature_names().to_vec(),
        priors,
        prior_mode: config.priors,
        attributes,
    })
}

/// Trains with every attribute treated as continuous.
pub fn train_continuous(dataset: &Dataset, config: &NaiveBayesConfig) -> Result<NaiveBayesModel> {
    train(dataset, &vec![AttributeKind::Continuous; dataset.dim()], config)
}
