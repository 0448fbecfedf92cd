//! Soft-margin kernel SVM trained with sequential minimal optimization.
//!
//! The dual problem
//!
//! ```text
//! maximize   W(a) = sum_i a_i - 1/2 sum_ij a_i a_j y_i y_j K(x_i, x_j)
//! subject to 0 <= a_i <= C,  sum_i a_i y_i = 0
//! ```
//!
//! is solved two multipliers at a time (Platt's SMO). The first multiplier is
//! any sample violating its KKT condition; the second is chosen by the
//! largest error gap, falling back to scans from a seeded random starting
//! point. The decision function is `f(x) = b + sum_i a_i y_i K(x_i, x)`.

use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::dataset::{ClassDistribution, Dataset, DatasetError, Direction};
use crate::kv::{self, KvDocument, KvError};

const MODEL_FORMAT: &str = "setcast-svm/1";

/// Smallest multiplier change accepted as progress.
const STEP_EPS: f64 = 1e-12;

#[derive(Debug, thiserror::Error)]
pub enum SvmError {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    Dimension { expected: usize, found: usize },
    #[error("invalid kernel: {0}")]
    Kernel(String),
    #[error("invalid trainer configuration: {0}")]
    Config(String),
    #[error("training needs both classes; {0} is missing")]
    SingleClass(Direction),
    #[error("training needs at least 2 samples, got {0}")]
    TooFewSamples(usize),
    #[error("malformed model file: {0}")]
    Format(String),
    #[error(transparent)]
    Kv(#[from] KvError),
    #[error(transparent)]
    Dataset(#[from] DatasetError),
}

type Result<T> = std::result::Result<T, SvmError>;

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub enum KernelSpec {
    /// `x . y`
    #[default]
    Linear,
    /// `(x . y + 1)^degree`
    Polynomial { degree: u32 },
    /// `exp(-|x - y|^2 / delta_sq)`
    Rbf { delta_sq: f64 },
}

impl KernelSpec {
    pub fn validate(&self) -> Result<()> {
        match *self {
            KernelSpec::Polynomial { degree } if degree < 1 => {
                Err(SvmError::Kernel("polynomial degree must be >= 1".into()))
            }
            KernelSpec::Rbf { delta_sq } if !(delta_sq > 0.0 && delta_sq.is_finite()) => {
                Err(SvmError::Kernel(format!("rbf delta_sq must be > 0, got {delta_sq}")))
            }
            _ => Ok(()),
        }
    }

    fn apply(&self, x: &[f64], y: &[f64]) -> f64 {
        match *self {
            KernelSpec::Linear => dot(x, y),
            KernelSpec::Polynomial { degree } => (dot(x, y) + 1.0).powi(degree as i32),
            KernelSpec::Rbf { delta_sq } => {
                let d2: f64 = x.iter().zip(y).map(|(a, b)| (a - b) * (a - b)).sum();
                (-d2 / delta_sq).exp()
            }
        }
    }
}

impl fmt::Display for KernelSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            KernelSpec::Linear => f.write_str("linear"),
            KernelSpec::Polynomial { degree } => write!(f, "poly:{degree}"),
            KernelSpec::Rbf { delta_sq } => write!(f, "rbf:{delta_sq}"),
        }
    }
}

impl FromStr for KernelSpec {
    type Err = SvmError;

    /// Accepts `linear`, `poly:<degree>` and `rbf:<delta_sq>`.
    fn from_str(s: &str) -> Result<Self> {
        let (name, arg) = s.split_once(':').unwrap_or((s, ""));
        let bad = || SvmError::Kernel(format!("cannot parse kernel {s:?}"));
        let spec = match name {
            "linear" if arg.is_empty() => KernelSpec::Linear,
            "poly" => KernelSpec::Polynomial {
                degree: arg.parse().map_err(|_| bad())?,
            },
            "rbf" => KernelSpec::Rbf {
                delta_sq: arg.parse().map_err(|_| bad())?,
            },
            _ => return Err(bad()),
        };
        spec.validate()?;
        Ok(spec)
    }
}

fn dot(x: &[f64], y: &[f64]) -> f64 {
    x.iter().zip(y).map(|(a, b)| a * b).sum()
}

pub fn kernel_eval(spec: &KernelSpec, x: &[f64], y: &[f64]) -> Result<f64> {
    if x.len() != y.len() {
        return Err(SvmError::Dimension {
            expected: x.len(),
            found: y.len(),
        });
    }
    spec.validate()?;
    Ok(spec.apply(x, y))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrainerConfig {
    /// Box constraint `C`.
    pub cost: f64,
    pub kkt_tol: f64,
    /// Upper bound on full sweeps over the training set.
    pub max_passes: usize,
    pub seed: u64,
    /// Z-score features using training-set statistics before training.
    pub standardize: bool,
}

impl Default for TrainerConfig {
    fn default() -> Self {
        TrainerConfig {
            cost: 1.0,
            kkt_tol: 1e-3,
            max_passes: 100,
            seed: 0,
            standardize: false,
        }
    }
}

impl TrainerConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.cost > 0.0 && self.cost.is_finite()) {
            return Err(SvmError::Config(format!("C must be > 0, got {}", self.cost)));
        }
        if !(self.kkt_tol > 0.0 && self.kkt_tol.is_finite()) {
            return Err(SvmError::Config(format!("kkt_tol must be > 0, got {}", self.kkt_tol)));
        }
        if self.max_passes == 0 {
            return Err(SvmError::Config("max_passes must be positive".into()));
        }
        Ok(())
    }
}

/// Per-feature affine map `(x - mean) / scale`.
#[derive(Debug, Clone, PartialEq)]
pub struct Standardizer {
    pub means: Vec<f64>,
    pub scales: Vec<f64>,
}

impl Standardizer {
    fn fit(dataset: &Dataset) -> Self {
        let n = dataset.len() as f64;
        let (means, scales) = (0..dataset.dim())
            .map(|a| {
                let col = dataset.column(a, None);
                let mean = col.iter().sum::<f64>() / n;
                let var = col.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n;
                let sd = var.sqrt();
                (mean, if sd > 0.0 { sd } else { 1.0 })
            })
            .unzip();
        Standardizer { means, scales }
    }

    fn apply(&self, x: &[f64]) -> Vec<f64> {
        x.iter()
            .zip(self.means.iter().zip(&self.scales))
            .map(|(v, (m, s))| (v - m) / s)
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SupportVector {
    pub alpha: f64,
    pub label: Direction,
    /// In the (possibly standardized) space the kernel sees.
    pub features: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SvmModel {
    pub kernel: KernelSpec,
    pub bias: f64,
    pub cost: f64,
    pub dim: usize,
    pub support_vectors: Vec<SupportVector>,
    pub standardizer: Option<Standardizer>,
    /// False when training stopped at `max_passes` with KKT violations left.
    pub converged: bool,
}

/// Training output: the model plus the full multiplier vector.
#[derive(Debug, Clone)]
pub struct SmoFit {
    pub model: SvmModel,
    /// One multiplier per training sample, in dataset order.
    pub alphas: Vec<f64>,
    pub passes: usize,
}

struct Smo<'a> {
    gram: Vec<f64>,
    n: usize,
    y: Vec<f64>,
    alpha: Vec<f64>,
    bias: f64,
    errors: Vec<f64>,
    config: &'a TrainerConfig,
}

impl Smo<'_> {
    fn k(&self, i: usize, j: usize) -> f64 {
        self.gram[i * self.n + j]
    }

    fn output(&self, i: usize) -> f64 {
        self.bias
            + (0..self.n)
                .filter(|&j| self.alpha[j] > 0.0)
                .map(|j| self.alpha[j] * self.y[j] * self.k(i, j))
                .sum::<f64>()
    }

    fn refresh_errors(&mut self) {
        for i in 0..self.n {
            self.errors[i] = self.output(i) - self.y[i];
        }
    }

    fn violates(&self, i: usize) -> bool {
        let r = self.y[i] * self.errors[i];
        let tol = self.config.kkt_tol;
        (r < -tol && self.alpha[i] < self.config.cost) || (r > tol && self.alpha[i] > 0.0)
    }

    fn clamp(&self, a: f64) -> f64 {
        let c = self.config.cost;
        if a < STEP_EPS * c {
            0.0
        } else if a > c * (1.0 - STEP_EPS) {
            c
        } else {
            a
        }
    }

    /// Jointly optimizes `alpha[i]` and `alpha[j]`; true when they moved.
    fn take_step(&mut self, i: usize, j: usize) -> bool {
        if i == j {
            return false;
        }
        let c = self.config.cost;
        let (ai, aj) = (self.alpha[i], self.alpha[j]);
        let (yi, yj) = (self.y[i], self.y[j]);
        let (ei, ej) = (self.errors[i], self.errors[j]);
        let s = yi * yj;
        let (lo, hi) = if s < 0.0 {
            ((aj - ai).max(0.0), (c + aj - ai).min(c))
        } else {
            ((ai + aj - c).max(0.0), (ai + aj).min(c))
        };
        if hi - lo < STEP_EPS * c {
            return false;
        }
        let eta = self.k(i, i) + self.k(j, j) - 2.0 * self.k(i, j);
        // Objective gain of moving alpha[j] by t along the constraint line.
        let gain = |t: f64| t * yj * (ei - ej) - 0.5 * eta * t * t;
        let aj_new = if eta > 0.0 {
            (aj + yj * (ei - ej) / eta).clamp(lo, hi)
        } else {
            let (g_lo, g_hi) = (gain(lo - aj), gain(hi - aj));
            if g_lo > g_hi + STEP_EPS {
                lo
            } else if g_hi > g_lo + STEP_EPS {
                hi
            } else {
                return false;
            }
        };
        let aj_new = self.clamp(aj_new);
        if (aj_new - aj).abs() < STEP_EPS * (aj_new + aj + STEP_EPS) {
            return false;
        }
        let ai_new = self.clamp(ai + s * (aj - aj_new));

        let (di, dj) = (yi * (ai_new - ai), yj * (aj_new - aj));
        let b1 = self.bias - ei - di * self.k(i, i) - dj * self.k(i, j);
        let b2 = self.bias - ej - di * self.k(i, j) - dj * self.k(j, j);
        let bias_new = if ai_new > 0.0 && ai_new < c {
            b1
        } else if aj_new > 0.0 && aj_new < c {
            b2
        } else {
            0.5 * (b1 + b2)
        };
        let db = bias_new - self.bias;
        for k in 0..self.n {
            self.errors[k] += di * self.k(i, k) + dj * self.k(j, k) + db;
        }
        self.alpha[i] = ai_new;
        self.alpha[j] = aj_new;
        self.bias = bias_new;
        true
    }

    /// Sets `b` from the KKT conditions: the mean over free multipliers, or
    /// the midpoint of the feasible interval when every multiplier is bound.
    fn settle_bias(&mut self) {
        let c = self.config.cost;
        let mut free_sum = 0.0;
        let mut free = 0usize;
        let mut lower = f64::NEG_INFINITY;
        let mut upper = f64::INFINITY;
        for i in 0..self.n {
            let g = self.output(i) - self.bias;
            let target = self.y[i] - g;
            if self.alpha[i] > 0.0 && self.alpha[i] < c {
                free_sum += target;
                free += 1;
                continue;
            }
            // alpha = 0 needs y f >= 1, alpha = C needs y f <= 1
            let at_zero = self.alpha[i] == 0.0;
            if (self.y[i] > 0.0) == at_zero {
                lower = lower.max(target);
            } else {
                upper = upper.min(target);
            }
        }
        self.bias = if free > 0 {
            free_sum / free as f64
        } else if lower.is_finite() && upper.is_finite() {
            0.5 * (lower + upper)
        } else if lower.is_finite() {
            lower
        } else if upper.is_finite() {
            upper
        } else {
            self.bias
        };
        self.refresh_errors();
    }

    fn is_free(&self, i: usize) -> bool {
        self.alpha[i] > 0.0 && self.alpha[i] < self.config.cost
    }

    /// Platt's second-choice order: the free multiplier with the largest
    /// `|E_i - E_j|`, then free multipliers, then all, each scan starting at
    /// a random offset.
    fn examine(&mut self, i: usize, rng: &mut ChaCha8Rng) -> bool {
        if !self.violates(i) {
            return false;
        }
        let n = self.n;
        let ei = self.errors[i];
        let best = (0..n)
            .filter(|&j| j != i && self.is_free(j))
            .max_by(|&a, &b| (ei - self.errors[a]).abs().total_cmp(&(ei - self.errors[b]).abs()));
        if let Some(j) = best {
            if self.take_step(i, j) {
                return true;
            }
        }
        for free_only in [true, false] {
            let start = rng.gen_range(0..n);
            for offset in 0..n {
                let j = (start + offset) % n;
                if (!free_only || self.is_free(j)) && self.take_step(i, j) {
                    return true;
                }
            }
        }
        false
    }

    fn sweep(&mut self, rng: &mut ChaCha8Rng, free_only: bool) -> usize {
        let mut changed = 0;
        for i in 0..self.n {
            if (!free_only || self.is_free(i)) && self.examine(i, rng) {
                changed += 1;
            }
        }
        changed
    }

    fn any_violation(&self) -> bool {
        (0..self.n).any(|i| self.violates(i))
    }
}

/// Trains on `dataset` with UP as +1 and DOWN as -1.
///
/// Never fails on non-convergence: the last iterate is returned with
/// `converged = false`.
pub fn train_smo(dataset: &Dataset, kernel: KernelSpec, config: &TrainerConfig) -> Result<SmoFit> {
    kernel.validate()?;
    config.validate()?;
    let n = dataset.len();
    if n < 2 {
        return Err(SvmError::TooFewSamples(n));
    }
    let counts = dataset.class_counts();
    for class in Direction::ALL {
        if counts[class.index()] == 0 {
            return Err(SvmError::SingleClass(class));
        }
    }

    let standardizer = config.standardize.then(|| Standardizer::fit(dataset));
    let points: Vec<Vec<f64>> = dataset
        .samples()
        .iter()
        .map(|s| match &standardizer {
            Some(st) => st.apply(&s.features),
            None => s.features.clone(),
        })
        .collect();
    let mut gram = vec![0.0; n * n];
    for i in 0..n {
        for j in i..n {
            let v = kernel.apply(&points[i], &points[j]);
            gram[i * n + j] = v;
            gram[j * n + i] = v;
        }
    }
    let y: Vec<f64> = dataset.samples().iter().map(|s| s.label.sign()).collect();
    let mut smo = Smo {
        gram,
        n,
        errors: y.iter().map(|v| -v).collect(),
        y,
        alpha: vec![0.0; n],
        bias: 0.0,
        config,
    };

    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut passes = 0;
    let mut converged = false;
    while passes < config.max_passes {
        passes += 1;
        // one sweep over every sample, then sweeps over the free multipliers
        // until they stop moving
        let mut changed = smo.sweep(&mut rng, false);
        let mut inner = 0;
        while changed > 0 && inner < 10 * n {
            changed = smo.sweep(&mut rng, true);
            inner += 1;
        }
        smo.refresh_errors();
        if smo.sweep(&mut rng, false) == 0 {
            smo.settle_bias();
            if !smo.any_violation() {
                converged = true;
                break;
            }
        }
    }
    if !converged {
        smo.settle_bias();
        converged = !smo.any_violation();
    }

    let support_vectors = (0..n)
        .filter(|&i| smo.alpha[i] > 0.0)
        .map(|i| SupportVector {
            alpha: smo.alpha[i],
            label: dataset.samples()[i].label,
            features: points[i].clone(),
        })
        .collect();
    Ok(SmoFit {
        model: SvmModel {
            kernel,
            bias: smo.bias,
            cost: config.cost,
            dim: dataset.dim(),
            support_vectors,
            standardizer,
            converged,
        },
        alphas: smo.alpha,
        passes,
    })
}

/// Indices of training samples whose KKT condition fails by more than `tol`.
pub fn kkt_violations(model: &SvmModel, dataset: &Dataset, alphas: &[f64], tol: f64) -> Result<Vec<usize>> {
    let mut bad = Vec::new();
    for (i, (sample, &alpha)) in dataset.samples().iter().zip(alphas).enumerate() {
        let margin = sample.label.sign() * decision_value(model, &sample.features)?;
        let ok = if alpha <= 0.0 {
            margin >= 1.0 - tol
        } else if alpha >= model.cost {
            margin <= 1.0 + tol
        } else {
            (margin - 1.0).abs() <= tol
        };
        if !ok {
            bad.push(i);
        }
    }
    Ok(bad)
}

impl SvmModel {
    pub fn decision_value(&self, x: &[f64]) -> Result<f64> {
        decision_value(self, x)
    }

    /// Primal weights `w = sum_i a_i y_i x_i` (linear kernel only).
    pub fn linear_weights(&self) -> Option<Vec<f64>> {
        if self.kernel != KernelSpec::Linear {
            return None;
        }
        let mut w = vec![0.0; self.dim];
        for sv in &self.support_vectors {
            for (wk, xk) in w.iter_mut().zip(&sv.features) {
                *wk += sv.alpha * sv.label.sign() * xk;
            }
        }
        Some(w)
    }

    pub fn to_kv(&self) -> KvDocument {
        let mut doc = KvDocument::new();
        doc.push("format", MODEL_FORMAT);
        doc.push("kernel", self.kernel);
        doc.push("bias", self.bias);
        doc.push("cost", self.cost);
        doc.push("dim", self.dim);
        doc.push("converged", self.converged);
        if let Some(st) = &self.standardizer {
            doc.push("standardize.means", kv::join(&st.means));
            doc.push("standardize.scales", kv::join(&st.scales));
        }
        doc.push("support_vectors", self.support_vectors.len());
        for (i, sv) in self.support_vectors.iter().enumerate() {
            doc.push(format!("sv.{i}.alpha"), sv.alpha);
            doc.push(format!("sv.{i}.label"), sv.label);
            doc.push(format!("sv.{i}.x"), kv::join(&sv.features));
        }
        doc
    }

    pub fn to_text(&self) -> String {
        format!("# SVM model\n{}", self.to_kv().render())
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let doc = KvDocument::parse(text)?;
        if doc.require("format")? != MODEL_FORMAT {
            return Err(SvmError::Format(format!("expected format {MODEL_FORMAT}")));
        }
        let kernel: KernelSpec = doc.require("kernel")?.parse()?;
        let dim: usize = doc.parse_value("dim")?;
        let standardizer = match doc.get("standardize.means") {
            Some(_) => Some(Standardizer {
                means: doc.parse_list("standardize.means")?,
                scales: doc.parse_list("standardize.scales")?,
            }),
            None => None,
        };
        let count: usize = doc.parse_value("support_vectors")?;
        let mut support_vectors = Vec::with_capacity(count);
        for i in 0..count {
            let label: String = doc.parse_value(&format!("sv.{i}.label"))?;
            let features: Vec<f64> = doc.parse_list(&format!("sv.{i}.x"))?;
            if features.len() != dim {
                return Err(SvmError::Format(format!("support vector {i} has wrong dimension")));
            }
            support_vectors.push(SupportVector {
                alpha: doc.parse_value(&format!("sv.{i}.alpha"))?,
                label: label.parse().map_err(SvmError::Format)?,
                features,
            });
        }
        Ok(SvmModel {
            kernel,
            bias: doc.parse_value("bias")?,
            cost: doc.parse_value("cost")?,
            dim,
            support_vectors,
            standardizer,
            converged: doc.parse_value("converged")?,
        })
    }
}

/// `b + sum_i a_i y_i K(x_i, x)`.
pub fn decision_value(model: &SvmModel, x: &[f64]) -> Result<f64> {
    if x.len() != model.dim {
        return Err(SvmError::Dimension {
            expected: model.dim,
            found: x.len(),
        });
    }
    let scaled;
    let x = match &model.standardizer {
        Some(st) => {
            scaled = st.apply(x);
            &scaled[..]
        }
        None => x,
    };
    Ok(model.bias
        + model
            .support_vectors
            .iter()
            .map(|sv| sv.alpha * sv.label.sign() * model.kernel.apply(&sv.features, x))
            .sum::<f64>())
}

/// UP for a positive decision value, DOWN otherwise (zero included).
pub fn classify(model: &SvmModel, x: &[f64]) -> Result<Direction> {
    Ok(direction_of(decision_value(model, x)?))
}

pub fn direction_of(decision: f64) -> Direction {
    if decision > 0.0 {
        Direction::Up
    } else {
        Direction::Down
    }
}

/// One-hot distribution on the classified label.
pub fn hard_distribution(model: &SvmModel, x: &[f64]) -> Result<ClassDistribution> {
    Ok(ClassDistribution::one_hot(classify(model, x)?))
}
