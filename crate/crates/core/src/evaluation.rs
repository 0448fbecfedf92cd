//! Prediction records, the confusion-matrix metric suite and stratified
//! cross-validation.
//!
//! Probabilistic errors follow the convention of averaging `|p_j - t_j|` over
//! both classes as well as over records, so a hard one-hot predictor with
//! misclassification rate `r` has `MAE = r` and `RMSE = sqrt(r)`. Relative
//! errors divide by the same statistics of a baseline predictor that outputs
//! each fold's add-one-smoothed training class distribution.

use std::thread;

use crate::dataset::{self, ClassDistribution, Dataset, DatasetError, Direction, FoldAssignment};
use crate::learner::Learner;
use crate::naive_bayes::NaiveBayesError;
use crate::svm::SvmError;

#[derive(Debug, thiserror::Error)]
pub enum EvaluationError {
    #[error("no prediction records")]
    EmptyRecords,
    #[error("baseline predictor has zero error; relative errors are undefined")]
    ZeroBaselineError,
    #[error("baseline covers {baseline} records but {records} were given")]
    BaselineLength { records: usize, baseline: usize },
    #[error("training failed on fold {fold}: {source}")]
    Training {
        fold: usize,
        #[source]
        source: Box<EvaluationError>,
    },
    #[error(transparent)]
    NaiveBayes(#[from] NaiveBayesError),
    #[error(transparent)]
    Svm(#[from] SvmError),
    #[error(transparent)]
    Dataset(#[from] DatasetError),
}

type Result<T> = std::result::Result<T, EvaluationError>;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PredictionRecord {
    pub actual: Direction,
    pub distribution: ClassDistribution,
    pub predicted: Direction,
}

impl PredictionRecord {
    pub fn new(actual: Direction, distribution: ClassDistribution) -> Self {
        PredictionRecord {
            actual,
            distribution,
            predicted: distribution.argmax(),
        }
    }

    pub fn hard(actual: Direction, predicted: Direction) -> Self {
        PredictionRecord::new(actual, ClassDistribution::one_hot(predicted))
    }
}

/// `counts[actual][predicted]`, rows and columns ordered (UP, DOWN).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct ConfusionMatrix {
    counts: [[usize; 2]; 2],
}

impl ConfusionMatrix {
    pub fn from_counts(counts: [[usize; 2]; 2]) -> Self {
        ConfusionMatrix { counts }
    }

    pub fn counts(&self) -> [[usize; 2]; 2] {
        self.counts
    }

    pub fn get(&self, actual: Direction, predicted: Direction) -> usize {
        self.counts[actual.index()][predicted.index()]
    }

    pub fn total(&self) -> usize {
        self.counts.iter().flatten().sum()
    }

    pub fn correct(&self) -> usize {
        self.counts[0][0] + self.counts[1][1]
    }

    pub fn actual_count(&self, class: Direction) -> usize {
        self.counts[class.index()].iter().sum()
    }

    pub fn predicted_count(&self, class: Direction) -> usize {
        self.counts[0][class.index()] + self.counts[1][class.index()]
    }

    /// Hard records that reproduce these counts, in row-major order.
    pub fn to_hard_records(&self) -> Vec<PredictionRecord> {
        let mut records = Vec::with_capacity(self.total());
        for actual in Direction::ALL {
            for predicted in Direction::ALL {
                for _ in 0..self.get(actual, predicted) {
                    records.push(PredictionRecord::hard(actual, predicted));
                }
            }
        }
        records
    }
}

pub fn confusion_matrix(records: &[PredictionRecord]) -> Result<ConfusionMatrix> {
    if records.is_empty() {
        return Err(EvaluationError::EmptyRecords);
    }
    let mut counts = [[0; 2]; 2];
    for r in records {
        counts[r.actual.index()][r.predicted.index()] += 1;
    }
    Ok(ConfusionMatrix { counts })
}

pub fn accuracy(matrix: &ConfusionMatrix) -> f64 {
    matrix.correct() as f64 / matrix.total() as f64
}

/// Cohen's kappa; 0 when chance agreement is already perfect.
pub fn kappa(matrix: &ConfusionMatrix) -> f64 {
    let n = matrix.total() as f64;
    let observed = matrix.correct() as f64 / n;
    let expected: f64 = Direction::ALL
        .iter()
        .map(|&c| matrix.actual_count(c) as f64 * matrix.predicted_count(c) as f64)
        .sum::<f64>()
        / (n * n);
    if expected >= 1.0 {
        0.0
    } else {
        (observed - expected) / (1.0 - expected)
    }
}

fn error_sums<'a>(pairs: impl Iterator<Item = (Direction, &'a ClassDistribution)>) -> (f64, f64, usize) {
    let mut abs = 0.0;
    let mut sq = 0.0;
    let mut components = 0;
    for (actual, dist) in pairs {
        for class in Direction::ALL {
            let target = if class == actual { 1.0 } else { 0.0 };
            let e = (dist.get(class) - target).abs();
            abs += e;
            sq += e * e;
            components += 1;
        }
    }
    (abs, sq, components)
}

/// `(MAE, RMSE)` over all records and classes.
pub fn probabilistic_errors(records: &[PredictionRecord]) -> Result<(f64, f64)> {
    if records.is_empty() {
        return Err(EvaluationError::EmptyRecords);
    }
    let (abs, sq, m) = error_sums(records.iter().map(|r| (r.actual, &r.distribution)));
    Ok((abs / m as f64, (sq / m as f64).sqrt()))
}

/// Reference predictions for relative errors: one class distribution per
/// fold, and the fold of every record.
#[derive(Debug, Clone, PartialEq)]
pub struct BaselineProfile {
    fold_distributions: Vec<ClassDistribution>,
    record_folds: Vec<usize>,
}

impl BaselineProfile {
    pub fn new(fold_distributions: Vec<ClassDistribution>, record_folds: Vec<usize>) -> Self {
        assert!(
            record_folds.iter().all(|&f| f < fold_distributions.len()),
            "record fold index out of range"
        );
        BaselineProfile {
            fold_distributions,
            record_folds,
        }
    }

    /// The same distribution for `n` records.
    pub fn constant(distribution: ClassDistribution, n: usize) -> Self {
        BaselineProfile::new(vec![distribution], vec![0; n])
    }

    /// `(count + 1) / (n + 2)` over the training partition's labels.
    pub fn smoothed_prior(training: &Dataset) -> ClassDistribution {
        let counts = training.class_counts();
        let n = training.len() as f64;
        let p_up = (counts[0] as f64 + 1.0) / (n + 2.0);
        ClassDistribution::new([p_up, 1.0 - p_up]).expect("smoothed prior is normalized")
    }

    pub fn len(&self) -> usize {
        self.record_folds.len()
    }

    pub fn is_empty(&self) -> bool {
        self.record_folds.is_empty()
    }

    pub fn prediction(&self, record: usize) -> &ClassDistribution {
        &self.fold_distributions[self.record_folds[record]]
    }

    pub fn fold_distributions(&self) -> &[ClassDistribution] {
        &self.fold_distributions
    }
}

/// `(RAE %, RRSE %)` relative to the baseline's errors on the same records.
pub fn relative_errors(records: &[PredictionRecord], baseline: &BaselineProfile) -> Result<(f64, f64)> {
    if records.is_empty() {
        return Err(EvaluationError::EmptyRecords);
    }
    if baseline.len() != records.len() {
        return Err(EvaluationError::BaselineLength {
            records: records.len(),
            baseline: baseline.len(),
        });
    }
    let (abs, sq, _) = error_sums(records.iter().map(|r| (r.actual, &r.distribution)));
    let (base_abs, base_sq, _) = error_sums(
        records
            .iter()
            .enumerate()
            .map(|(i, r)| (r.actual, baseline.prediction(i))),
    );
    if base_abs == 0.0 || base_sq == 0.0 {
        return Err(EvaluationError::ZeroBaselineError);
    }
    Ok((100.0 * abs / base_abs, 100.0 * (sq / base_sq).sqrt()))
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct ClassStats {
    pub tp_rate: f64,
    pub fp_rate: f64,
    pub precision: f64,
    pub recall: f64,
    pub f_measure: f64,
    pub roc_area: f64,
}

/// Area under the ROC curve for `class`, ranking records by their predicted
/// probability of that class (Mann-Whitney, ties count one half). `None` when
/// the class has no positive or no negative records.
pub fn roc_area(records: &[PredictionRecord], class: Direction) -> Option<f64> {
    let mut scored: Vec<(f64, bool)> = records
        .iter()
        .map(|r| (r.distribution.get(class), r.actual == class))
        .collect();
    let positives = scored.iter().filter(|(_, p)| *p).count();
    let negatives = scored.len() - positives;
    if positives == 0 || negatives == 0 {
        return None;
    }
    scored.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut rank_sum = 0.0;
    let mut i = 0;
    while i < scored.len() {
        let mut j = i;
        while j < scored.len() && scored[j].0 == scored[i].0 {
            j += 1;
        }
        // ranks i+1 ..= j share their mean
        let mid_rank = (i + 1 + j) as f64 / 2.0;
        let tied_positives = scored[i..j].iter().filter(|(_, p)| *p).count();
        rank_sum += mid_rank * tied_positives as f64;
        i = j;
    }
    let p = positives as f64;
    Some((rank_sum - p * (p + 1.0) / 2.0) / (p * negatives as f64))
}

fn ratio(num: usize, den: usize) -> Option<f64> {
    (den > 0).then(|| num as f64 / den as f64)
}

/// Per-class statistics plus any warnings about degenerate definitions.
pub fn per_class_stats(
    matrix: &ConfusionMatrix,
    records: &[PredictionRecord],
) -> Result<([ClassStats; 2], Vec<String>)> {
    if matrix.total() == 0 {
        return Err(EvaluationError::EmptyRecords);
    }
    let mut warnings = Vec::new();
    let mut stats = [ClassStats::default(); 2];
    for class in Direction::ALL {
        let other = class.other();
        let tp = matrix.get(class, class);
        let fp = matrix.get(other, class);
        let tp_rate = ratio(tp, matrix.actual_count(class)).unwrap_or_else(|| {
            warnings.push(format!("class {class} never occurs; recall set to 0"));
            0.0
        });
        let fp_rate = ratio(fp, matrix.actual_count(other)).unwrap_or(0.0);
        let precision = ratio(tp, matrix.predicted_count(class)).unwrap_or_else(|| {
            warnings.push(format!("class {class} never predicted; precision set to 0"));
            0.0
        });
        let f_measure = if precision + tp_rate > 0.0 {
            2.0 * precision * tp_rate / (precision + tp_rate)
        } else {
            0.0
        };
        let roc = if records.is_empty() {
            None
        } else {
            roc_area(records, class)
        };
        let roc_area = roc.unwrap_or_else(|| {
            warnings.push(format!("ROC area for {class} undefined; set to 0.5"));
            0.5
        });
        stats[class.index()] = ClassStats {
            tp_rate,
            fp_rate,
            precision,
            recall: tp_rate,
            f_measure,
            roc_area,
        };
    }
    Ok((stats, warnings))
}

#[derive(Debug, Clone, PartialEq)]
pub struct EvaluationReport {
    pub learner: String,
    pub n: usize,
    pub matrix: ConfusionMatrix,
    pub accuracy: f64,
    pub kappa: f64,
    pub mae: f64,
    pub rmse: f64,
    /// Percent.
    pub rae: f64,
    /// Percent.
    pub rrse: f64,
    pub per_class: [ClassStats; 2],
    /// Per-class statistics weighted by actual class counts.
    pub weighted: ClassStats,
    pub warnings: Vec<String>,
    pub folds: Option<usize>,
    pub seed: Option<u64>,
    pub fold_digest: Option<String>,
}

impl EvaluationReport {
    pub fn class(&self, class: Direction) -> &ClassStats {
        &self.per_class[class.index()]
    }

    pub fn incorrect(&self) -> usize {
        self.n - self.matrix.correct()
    }
}

/// Builds the full report from pooled records.
pub fn evaluate(learner: &str, records: &[PredictionRecord], baseline: &BaselineProfile) -> Result<EvaluationReport> {
    let matrix = confusion_matrix(records)?;
    let (mae, rmse) = probabilistic_errors(records)?;
    let (rae, rrse) = relative_errors(records, baseline)?;
    let (per_class, warnings) = per_class_stats(&matrix, records)?;
    let n = matrix.total() as f64;
    let weight = |c: Direction| matrix.actual_count(c) as f64 / n;
    let weighted_field = |f: fn(&ClassStats) -> f64| -> f64 {
        Direction::ALL
            .iter()
            .map(|&c| weight(c) * f(&per_class[c.index()]))
            .sum()
    };
    let weighted = ClassStats {
        tp_rate: weighted_field(|s| s.tp_rate),
        fp_rate: weighted_field(|s| s.fp_rate),
        precision: weighted_field(|s| s.precision),
        recall: weighted_field(|s| s.recall),
        f_measure: weighted_field(|s| s.f_measure),
        roc_area: weighted_field(|s| s.roc_area),
    };
    Ok(EvaluationReport {
        learner: learner.to_string(),
        n: matrix.total(),
        matrix,
        accuracy: accuracy(&matrix),
        kappa: kappa(&matrix),
        mae,
        rmse,
        rae,
        rrse,
        per_class,
        weighted,
        warnings,
        folds: None,
        seed: None,
        fold_digest: None,
    })
}

/// Pooled cross-validation output.
#[derive(Debug, Clone)]
pub struct CrossValidation {
    pub report: EvaluationReport,
    /// Ordered by (fold, position within fold).
    pub records: Vec<PredictionRecord>,
    /// Dataset index of each record.
    pub sample_indices: Vec<usize>,
    pub baseline: BaselineProfile,
    pub assignment: FoldAssignment,
}

struct FoldOutcome {
    indices: Vec<usize>,
    records: Vec<PredictionRecord>,
    baseline: ClassDistribution,
}

fn run_fold<L: Learner>(
    learner: &L,
    dataset: &Dataset,
    assignment: &FoldAssignment,
    fold: usize,
) -> Result<FoldOutcome> {
    let train = dataset.subset(&assignment.train_indices(fold));
    let test = assignment.test_indices(fold);
    let wrap = |source| EvaluationError::Training {
        fold,
        source: Box::new(source),
    };
    let model = learner.fit(&train).map_err(wrap)?;
    let mut records = Vec::with_capacity(test.len());
    for &i in &test {
        let sample = &dataset.samples()[i];
        let distribution = learner.predict(&model, &sample.features)?;
        records.push(PredictionRecord::new(sample.label, distribution));
    }
    Ok(FoldOutcome {
        indices: test,
        records,
        baseline: BaselineProfile::smoothed_prior(&train),
    })
}

/// Stratified k-fold cross-validation, single-threaded.
pub fn cross_validate<L: Learner>(learner: &L, dataset: &Dataset, k: usize, seed: u64) -> Result<CrossValidation> {
    let assignment = dataset::stratified_folds(dataset, k, seed)?;
    let mut cv = cross_validate_folds(learner, dataset, &assignment, 1)?;
    cv.report.seed = Some(seed);
    Ok(cv)
}

/// Cross-validation over a given assignment, training up to `jobs` folds at
/// once. Results are merged in fold order, so the output does not depend on
/// `jobs`.
pub fn cross_validate_folds<L: Learner>(
    learner: &L,
    dataset: &Dataset,
    assignment: &FoldAssignment,
    jobs: usize,
) -> Result<CrossValidation> {
    let k = assignment.k();
    let jobs = jobs.clamp(1, k);
    let outcomes: Vec<Result<FoldOutcome>> = if jobs == 1 {
        (0..k).map(|f| run_fold(learner, dataset, assignment, f)).collect()
    } else {
        let mut slots: Vec<Option<Result<FoldOutcome>>> = (0..k).map(|_| None).collect();
        thread::scope(|scope| {
            let handles: Vec<_> = (0..jobs)
                .map(|worker| {
                    scope.spawn(move || {
                        (worker..k)
                            .step_by(jobs)
                            .map(|f| (f, run_fold(learner, dataset, assignment, f)))
                            .collect::<Vec<_>>()
                    })
                })
                .collect();
            for handle in handles {
                for (f, outcome) in handle.join().expect("fold worker panicked") {
                    slots[f] = Some(outcome);
                }
            }
        });
        slots.into_iter().map(|s| s.expect("every fold ran")).collect()
    };

    let mut records = Vec::with_capacity(dataset.len());
    let mut sample_indices = Vec::with_capacity(dataset.len());
    let mut fold_distributions = Vec::with_capacity(k);
    let mut record_folds = Vec::with_capacity(dataset.len());
    for (fold, outcome) in outcomes.into_iter().enumerate() {
        let outcome = outcome?;
        record_folds.extend(std::iter::repeat_n(fold, outcome.records.len()));
        records.extend(outcome.records);
        sample_indices.extend(outcome.indices);
        fold_distributions.push(outcome.baseline);
    }
    let baseline = BaselineProfile::new(fold_distributions, record_folds);
    let mut report = evaluate(&learner.name(), &records, &baseline)?;
    report.folds = Some(k);
    report.fold_digest = Some(assignment.digest());
    Ok(CrossValidation {
        report,
        records,
        sample_indices,
        baseline,
        assignment: assignment.clone(),
    })
}

/// Two learners evaluated on one shared fold assignment.
#[derive(Debug, Clone)]
pub struct ComparisonReport {
    pub first: EvaluationReport,
    pub second: EvaluationReport,
}

pub fn compare<A: Learner, B: Learner>(
    first: &A,
    second: &B,
    dataset: &Dataset,
    k: usize,
    seed: u64,
    jobs: usize,
) -> Result<ComparisonReport> {
    dataset.require_all_classes()?;
    let assignment = dataset::stratified_folds(dataset, k, seed)?;
    let mut a = cross_validate_folds(first, dataset, &assignment, jobs)?.report;
    let mut b = cross_validate_folds(second, dataset, &assignment, jobs)?.report;
    a.seed = Some(seed);
    b.seed = Some(seed);
    Ok(ComparisonReport { first: a, second: b })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataset::Sample;
    use proptest::prelude::*;
    use Direction::{Down, Up};

    fn dist(p_up: f64) -> ClassDistribution {
        ClassDistribution::new([p_up, 1.0 - p_up]).unwrap()
    }

    const NB_MATRIX: [[usize; 2]; 2] = [[13, 3], [7, 7]];
    const SVM_MATRIX: [[usize; 2]; 2] = [[11, 5], [8, 6]];

    #[test]
    fn matrices_round_trip_through_records() {
        for counts in [NB_MATRIX, SVM_MATRIX] {
            let m = ConfusionMatrix::from_counts(counts);
            assert_eq!(confusion_matrix(&m.to_hard_records()).unwrap().counts(), counts);
        }
        let diag = vec![PredictionRecord::hard(Up, Up), PredictionRecord::hard(Down, Down)];
        assert_eq!(confusion_matrix(&diag).unwrap().counts(), [[1, 0], [0, 1]]);
        assert!(matches!(confusion_matrix(&[]), Err(EvaluationError::EmptyRecords)));
    }

    #[test]
    fn accuracy_and_kappa() {
        let nb = ConfusionMatrix::from_counts(NB_MATRIX);
        assert!((accuracy(&nb) - 20.0 / 30.0).abs() < 1e-15);
        // p_o = 20/30, p_e = (16*20 + 14*10) / 900
        let p_o = 20.0 / 30.0;
        let p_e = 460.0 / 900.0;
        assert!((kappa(&nb) - (p_o - p_e) / (1.0 - p_e)).abs() < 1e-15);
        assert!((kappa(&nb) - 0.3182).abs() < 1e-4);
        let svm = ConfusionMatrix::from_counts(SVM_MATRIX);
        assert!((accuracy(&svm) - 17.0 / 30.0).abs() < 1e-15);
        let perfect = ConfusionMatrix::from_counts([[4, 0], [0, 6]]);
        assert_eq!(accuracy(&perfect), 1.0);
        assert_eq!(kappa(&perfect), 1.0);
        // rows proportional to columns: observed agreement equals chance
        let chance = ConfusionMatrix::from_counts([[1, 1], [1, 1]]);
        assert_eq!(kappa(&chance), 0.0);
        let one_class = ConfusionMatrix::from_counts([[5, 0], [0, 0]]);
        assert_eq!(kappa(&one_class), 0.0);
    }

    #[test]
    fn probabilistic_error_examples() {
        let single = [PredictionRecord::new(Up, dist(0.75))];
        let (mae, rmse) = probabilistic_errors(&single).unwrap();
        assert!((mae - 0.25).abs() < 1e-15 && (rmse - 0.25).abs() < 1e-15);
        let svm = ConfusionMatrix::from_counts(SVM_MATRIX).to_hard_records();
        let (mae, rmse) = probabilistic_errors(&svm).unwrap();
        assert!((mae - 13.0 / 30.0).abs() < 1e-15);
        assert!((rmse - (13.0f64 / 30.0).sqrt()).abs() < 1e-15);
        assert!(probabilistic_errors(&[]).is_err());
    }

    #[test]
    fn relative_error_examples() {
        let records: Vec<_> = [(Up, 0.6), (Down, 0.6), (Up, 0.6)]
            .iter()
            .map(|&(a, p)| PredictionRecord::new(a, dist(p)))
            .collect();
        let same = BaselineProfile::constant(dist(0.6), 3);
        let (rae, rrse) = relative_errors(&records, &same).unwrap();
        assert!((rae - 100.0).abs() < 1e-12 && (rrse - 100.0).abs() < 1e-12);
        let perfect: Vec<_> = [Up, Down, Up].iter().map(|&a| PredictionRecord::hard(a, a)).collect();
        let (rae, rrse) = relative_errors(&perfect, &same).unwrap();
        assert_eq!((rae, rrse), (0.0, 0.0));
        // a baseline that is itself perfect has nothing to compare against
        let oracle = BaselineProfile::constant(ClassDistribution::one_hot(Up), 1);
        assert!(matches!(
            relative_errors(&[PredictionRecord::hard(Up, Down)], &oracle),
            Err(EvaluationError::ZeroBaselineError)
        ));
        assert!(relative_errors(&records, &BaselineProfile::constant(dist(0.5), 2)).is_err());
    }

    #[test]
    fn per_class_examples() {
        let m = ConfusionMatrix::from_counts(NB_MATRIX);
        let (stats, warnings) = per_class_stats(&m, &m.to_hard_records()).unwrap();
        let up = stats[Up.index()];
        assert!((up.precision - 0.65).abs() < 1e-15);
        assert!((up.recall - 13.0 / 16.0).abs() < 1e-15);
        assert_eq!(up.recall, up.tp_rate);
        assert!((up.fp_rate - 0.5).abs() < 1e-15);
        assert!((up.f_measure - 0.722).abs() < 5e-4);
        let down = stats[Down.index()];
        assert!((down.precision - 0.7).abs() < 1e-15);
        assert!((down.recall - 0.5).abs() < 1e-15);
        assert!((down.fp_rate - 3.0 / 16.0).abs() < 1e-15);
        assert!((down.f_measure - 0.583).abs() < 5e-4);
        assert!(warnings.is_empty());
    }

    #[test]
    fn never_predicted_class_has_zero_precision() {
        let records = vec![PredictionRecord::hard(Up, Up), PredictionRecord::hard(Down, Up)];
        let m = confusion_matrix(&records).unwrap();
        let (stats, warnings) = per_class_stats(&m, &records).unwrap();
        assert_eq!(stats[Down.index()].precision, 0.0);
        assert_eq!(stats[Down.index()].f_measure, 0.0);
        assert!(warnings.iter().any(|w| w.contains("never predicted")));
    }

    #[test]
    fn roc_examples() {
        let separated: Vec<_> = [(Up, 0.9), (Up, 0.8), (Down, 0.3), (Down, 0.1)]
            .iter()
            .map(|&(a, p)| PredictionRecord::new(a, dist(p)))
            .collect();
        assert_eq!(roc_area(&separated, Up), Some(1.0));
        assert_eq!(roc_area(&separated, Down), Some(1.0));
        let tied: Vec<_> = [Up, Down, Up, Down, Down]
            .iter()
            .map(|&a| PredictionRecord::new(a, dist(0.4)))
            .collect();
        assert_eq!(roc_area(&tied, Up), Some(0.5));
        assert_eq!(roc_area(&[PredictionRecord::hard(Up, Up)], Up), None);
    }

    /// Pairwise Mann-Whitney count, the definition the rank formula must match.
    fn roc_bruteforce(records: &[PredictionRecord], class: Direction) -> f64 {
        let (mut wins, mut pairs) = (0.0, 0.0);
        for p in records.iter().filter(|r| r.actual == class) {
            for q in records.iter().filter(|r| r.actual != class) {
                let (sp, sq) = (p.distribution.get(class), q.distribution.get(class));
                wins += if sp > sq {
                    1.0
                } else if sp == sq {
                    0.5
                } else {
                    0.0
                };
                pairs += 1.0;
            }
        }
        wins / pairs
    }

    fn records_strategy() -> impl Strategy<Value = Vec<PredictionRecord>> {
        proptest::collection::vec((any::<bool>(), 0u8..=10), 1..60).prop_map(|v| {
            v.into_iter()
                .map(|(up, p)| PredictionRecord::new(if up { Up } else { Down }, dist(p as f64 / 10.0)))
                .collect()
        })
    }

    fn hard_records_strategy() -> impl Strategy<Value = Vec<PredictionRecord>> {
        proptest::collection::vec((any::<bool>(), any::<bool>()), 1..80).prop_map(|v| {
            v.into_iter()
                .map(|(a, p)| {
                    let d = |b: bool| if b { Up } else { Down };
                    PredictionRecord::hard(d(a), d(p))
                })
                .collect()
        })
    }

    proptest! {
        #[test]
        fn roc_matches_pairwise_count(records in records_strategy()) {
            for class in Direction::ALL {
                if let Some(auc) = roc_area(&records, class) {
                    prop_assert!((auc - roc_bruteforce(&records, class)).abs() < 1e-12);
                }
            }
        }

        #[test]
        fn hard_predictor_identities(records in hard_records_strategy()) {
            let m = confusion_matrix(&records).unwrap();
            let (mae, rmse) = probabilistic_errors(&records).unwrap();
            let err = 1.0 - accuracy(&m);
            prop_assert!((mae - err).abs() < 1e-12);
            prop_assert!((rmse - err.sqrt()).abs() < 1e-12);
        }

        #[test]
        fn error_ordering(records in records_strategy()) {
            let (mae, rmse) = probabilistic_errors(&records).unwrap();
            prop_assert!(mae <= rmse + 1e-12);
            prop_assert!(rmse <= mae.sqrt() + 1e-12);
        }

        #[test]
        fn kappa_one_iff_diagonal(a in 1usize..20, b in 1usize..20, off1 in 0usize..5, off2 in 0usize..5) {
            let m = ConfusionMatrix::from_counts([[a, off1], [off2, b]]);
            prop_assert_eq!((kappa(&m) - 1.0).abs() < 1e-12, off1 == 0 && off2 == 0);
        }

        #[test]
        fn recall_is_row_fraction(records in records_strategy()) {
            let m = confusion_matrix(&records).unwrap();
            let (stats, _) = per_class_stats(&m, &records).unwrap();
            if m.actual_count(Up) > 0 {
                let want = m.get(Up, Up) as f64 / m.actual_count(Up) as f64;
                prop_assert_eq!(stats[0].recall, want);
                prop_assert_eq!(stats[0].tp_rate, want);
            }
        }
    }

    struct Memorizer;

    impl Learner for Memorizer {
        type Model = Vec<Sample>;

        fn name(&self) -> String {
            "memorizer".into()
        }

        fn fit(&self, train: &Dataset) -> Result<Vec<Sample>> {
            Ok(train.samples().to_vec())
        }

        /// Returns the true label when the sample was seen in training, a
        /// coin flip keyed on the features otherwise.
        fn predict(&self, model: &Vec<Sample>, features: &[f64]) -> Result<ClassDistribution> {
            if let Some(s) = model.iter().find(|s| s.features == features) {
                return Ok(ClassDistribution::one_hot(s.label));
            }
            let parity = features[0] as i64 % 2 == 0;
            Ok(ClassDistribution::one_hot(if parity { Up } else { Down }))
        }
    }

    #[test]
    fn no_test_sample_leaks_into_training() {
        // labels independent of the feature parity
        let samples: Vec<Sample> = (0..40)
            .map(|i| Sample::new(vec![i as f64], if (i / 2) % 2 == 0 { Up } else { Down }))
            .collect();
        let data = Dataset::from_samples(samples).unwrap();
        let cv = cross_validate(&Memorizer, &data, 40, 7).unwrap();
        assert_eq!(cv.report.n, 40);
        assert!((cv.report.accuracy - 0.5).abs() < 1e-12, "{}", cv.report.accuracy);
        let mut seen = cv.sample_indices.clone();
        seen.sort();
        assert_eq!(seen, (0..40).collect::<Vec<_>>());
    }

    #[test]
    fn parallel_folds_match_sequential() {
        let samples: Vec<Sample> = (0..25)
            .map(|i| Sample::new(vec![i as f64, (i * 7 % 5) as f64], if i % 3 == 0 { Up } else { Down }))
            .collect();
        let data = Dataset::from_samples(samples).unwrap();
        let learner = crate::learner::NaiveBayesLearner::default();
        let folds = dataset::stratified_folds(&data, 5, 11).unwrap();
        let one = cross_validate_folds(&learner, &data, &folds, 1).unwrap();
        let four = cross_validate_folds(&learner, &data, &folds, 4).unwrap();
        assert_eq!(one.report, four.report);
        assert_eq!(one.records, four.records);
    }

    #[test]
    fn training_failure_names_the_fold() {
        struct Failing;
        impl Learner for Failing {
            type Model = ();
            fn name(&self) -> String {
                "failing".into()
            }
            fn fit(&self, _: &Dataset) -> Result<()> {
                Err(EvaluationError::EmptyRecords)
            }
            fn predict(&self, _: &(), _: &[f64]) -> Result<ClassDistribution> {
                unreachable!()
            }
        }
        let data = Dataset::from_samples(vec![
            Sample::new(vec![0.0], Up),
            Sample::new(vec![1.0], Down),
            Sample::new(vec![2.0], Up),
            Sample::new(vec![3.0], Down),
        ])
        .unwrap();
        assert!(matches!(
            cross_validate(&Failing, &data, 2, 0),
            Err(EvaluationError::Training { fold: 0, .. })
        ));
    }
}
