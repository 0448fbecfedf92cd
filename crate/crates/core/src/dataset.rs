//! Labeled samples, raw price series and stratified fold assignment.
//!
//! Two CSV layouts are understood:
//!
//! * labeled samples: `NK,HS,SET,USDTHB,SP500,GOLD,SET_DIRECTION`, one row per
//!   trading day, features in percent;
//! * raw series: `DATE,NK,HS,SET_CLOSE,SET_OPEN,USDTHB,SP500,GOLD`, prices per
//!   calendar day, empty cell = missing.

use std::fmt;
use std::fs::File;
use std::io::{self, Read, Write};
use std::path::Path;
use std::str::FromStr;

use chrono::NaiveDate;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use sha2::{Digest, Sha256};

/// Name of the label column in labeled-sample files.
pub const LABEL_COLUMN: &str = "SET_DIRECTION";

/// Feature columns of the experiment, in file order.
pub const FEATURE_NAMES: [&str; 6] = ["NK", "HS", "SET", "USDTHB", "SP500", "GOLD"];

/// Tolerance used when validating that a probability vector is normalized.
pub const DISTRIBUTION_TOLERANCE: f64 = 1e-9;

#[derive(Debug, thiserror::Error)]
pub enum DatasetError {
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: io::Error,
    },
    #[error("line {line}: {message}")]
    Row { line: u64, message: String },
    #[error("invalid header: {0}")]
    Header(String),
    #[error("empty dataset")]
    Empty,
    #[error("price must be strictly positive, got {0}")]
    NonPositivePrice(f64),
    #[error("raw series needs at least 3 complete rows, got {0}")]
    TooFewRows(usize),
    #[error("fold count {k} out of range 2..={n}")]
    FoldCount { k: usize, n: usize },
    #[error("class {0} has no samples")]
    MissingClass(Direction),
    #[error("sample {index} has {found} features, expected {expected}")]
    Dimension {
        index: usize,
        expected: usize,
        found: usize,
    },
    #[error("sample {0} has a non-finite feature")]
    NonFinite(usize),
    #[error("invalid class distribution {0:?}")]
    Distribution([f64; 2]),
}

/// Daily direction of the SET index.
///
/// The declaration order (UP, DOWN) is the row/column order of every
/// confusion matrix and the tie-break order of every argmax.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Direction {
    Up,
    Down,
}

impl Direction {
    pub const ALL: [Direction; 2] = [Direction::Up, Direction::Down];

    pub fn index(self) -> usize {
        match self {
            Direction::Up => 0,
            Direction::Down => 1,
        }
    }

    pub fn from_index(index: usize) -> Direction {
        match index {
            0 => Direction::Up,
            1 => Direction::Down,
            _ => panic!("direction index {index} out of range"),
        }
    }

    /// SVM target: UP is +1, DOWN is -1.
    pub fn sign(self) -> f64 {
        match self {
            Direction::Up => 1.0,
            Direction::Down => -1.0,
        }
    }

    pub fn other(self) -> Direction {
        match self {
            Direction::Up => Direction::Down,
            Direction::Down => Direction::Up,
        }
    }
}

impl fmt::Display for Direction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Direction::Up => "UP",
            Direction::Down => "DOWN",
        })
    }
}

impl FromStr for Direction {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let token = s.trim();
        if token.eq_ignore_ascii_case("up") {
            Ok(Direction::Up)
        } else if token.eq_ignore_ascii_case("down") {
            Ok(Direction::Down)
        } else {
            Err(format!("unknown label {token:?}"))
        }
    }
}

/// Normalized probability vector over (UP, DOWN).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClassDistribution([f64; 2]);

impl ClassDistribution {
    pub fn new(probabilities: [f64; 2]) -> Result<Self, DatasetError> {
        let sum = probabilities[0] + probabilities[1];
        let valid =
            probabilities.iter().all(|p| p.is_finite() && *p >= 0.0) && (sum - 1.0).abs() <= DISTRIBUTION_TOLERANCE;
        if valid {
            Ok(ClassDistribution(probabilities))
        } else {
            Err(DatasetError::Distribution(probabilities))
        }
    }

    pub fn one_hot(direction: Direction) -> Self {
        let mut p = [0.0; 2];
        p[direction.index()] = 1.0;
        ClassDistribution(p)
    }

    pub fn uniform() -> Self {
        ClassDistribution([0.5, 0.5])
    }

    pub fn get(&self, direction: Direction) -> f64 {
        self.0[direction.index()]
    }

    pub fn probabilities(&self) -> [f64; 2] {
        self.0
    }

    /// Most probable class; an exact tie goes to UP.
    pub fn argmax(&self) -> Direction {
        if self.0[1] > self.0[0] {
            Direction::Down
        } else {
            Direction::Up
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Sample {
    pub features: Vec<f64>,
    pub label: Direction,
}

impl Sample {
    pub fn new(features: Vec<f64>, label: Direction) -> Self {
        Sample { features, label }
    }
}

/// Ordered collection of labeled samples sharing one feature schema.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    feature_names: Vec<String>,
    samples: Vec<Sample>,
}

impl Dataset {
    pub fn new(feature_names: Vec<String>, samples: Vec<Sample>) -> Result<Self, DatasetError> {
        let expected = feature_names.len();
        for (index, sample) in samples.iter().enumerate() {
            if sample.features.len() != expected {
                return Err(DatasetError::Dimension {
                    index,
                    expected,
                    found: sample.features.len(),
                });
            }
            if sample.features.iter().any(|v| !v.is_finite()) {
                return Err(DatasetError::NonFinite(index));
            }
        }
        Ok(Dataset { feature_names, samples })
    }

    /// Dataset with generated feature names `x0, x1, ...`.
    pub fn from_samples(samples: Vec<Sample>) -> Result<Self, DatasetError> {
        let dim = samples.first().map_or(0, |s| s.features.len());
        Dataset::new((0..dim).map(|i| format!("x{i}")).collect(), samples)
    }

    pub fn feature_names(&self) -> &[String] {
        &self.feature_names
    }

    pub fn samples(&self) -> &[Sample] {
        &self.samples
    }

    pub fn class_labels(&self) -> [Direction; 2] {
        Direction::ALL
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.feature_names.len()
    }

    pub fn class_counts(&self) -> [usize; 2] {
        let mut counts = [0; 2];
        for s in &self.samples {
            counts[s.label.index()] += 1;
        }
        counts
    }

    /// Fails with the first class (in UP, DOWN order) that has no samples.
    pub fn require_all_classes(&self) -> Result<(), DatasetError> {
        if self.samples.is_empty() {
            return Err(DatasetError::Empty);
        }
        let counts = self.class_counts();
        for class in Direction::ALL {
            if counts[class.index()] == 0 {
                return Err(DatasetError::MissingClass(class));
            }
        }
        Ok(())
    }

    /// Samples at `indices`, in the given order.
    pub fn subset(&self, indices: &[usize]) -> Dataset {
        Dataset {
            feature_names: self.feature_names.clone(),
            samples: indices.iter().map(|&i| self.samples[i].clone()).collect(),
        }
    }

    /// Values of one attribute, optionally restricted to one class.
    pub fn column(&self, attribute: usize, class: Option<Direction>) -> Vec<f64> {
        self.samples
            .iter()
            .filter(|s| class.is_none_or(|c| s.label == c))
            .map(|s| s.features[attribute])
            .collect()
    }
}

/// Feature rows whose label column may be absent (prediction input).
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureTable {
    pub feature_names: Vec<String>,
    pub rows: Vec<Vec<f64>>,
    pub labels: Option<Vec<Direction>>,
}

fn io_error(path: &Path, source: io::Error) -> DatasetError {
    DatasetError::Io {
        path: path.display().to_string(),
        source,
    }
}

fn csv_error(err: csv::Error) -> DatasetError {
    let line = err.position().map_or(0, |p| p.line());
    match err.into_kind() {
        csv::ErrorKind::Io(source) => DatasetError::Io {
            path: "<input>".into(),
            source,
        },
        kind => DatasetError::Row {
            line,
            message: format!("{kind:?}"),
        },
    }
}

fn csv_reader<R: Read>(reader: R) -> csv::Reader<R> {
    csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(reader)
}

/// Reads a feature table; the trailing `SET_DIRECTION` column is optional.
pub fn read_feature_table<R: Read>(reader: R) -> Result<FeatureTable, DatasetError> {
    let mut rdr = csv_reader(reader);
    let header = rdr.headers().map_err(csv_error)?.clone();
    let columns: Vec<String> = header.iter().map(str::to_string).collect();
    if columns.is_empty() || columns.iter().all(|c| c.is_empty()) {
        return Err(DatasetError::Header("missing header row".into()));
    }
    let labeled = columns.last().is_some_and(|c| c.eq_ignore_ascii_case(LABEL_COLUMN));
    let feature_count = columns.len() - usize::from(labeled);
    if feature_count == 0 {
        return Err(DatasetError::Header("no feature columns".into()));
    }
    if let Some(pos) = columns[..feature_count]
        .iter()
        .position(|c| c.eq_ignore_ascii_case(LABEL_COLUMN))
    {
        return Err(DatasetError::Header(format!(
            "{LABEL_COLUMN} must be the last column, found at position {}",
            pos + 1
        )));
    }

    let mut rows = Vec::new();
    let mut labels = Vec::new();
    for record in rdr.records() {
        let record = record.map_err(csv_error)?;
        let line = record.position().map_or(0, |p| p.line());
        if record.len() == 1 && record[0].is_empty() {
            continue;
        }
        if record.len() != columns.len() {
            return Err(DatasetError::Row {
                line,
                message: format!("expected {} columns, found {}", columns.len(), record.len()),
            });
        }
        let mut features = Vec::with_capacity(feature_count);
        for (col, field) in record.iter().take(feature_count).enumerate() {
            let value: f64 = field.parse().map_err(|_| DatasetError::Row {
                line,
                message: format!("non-numeric value {field:?} in column {}", columns[col]),
            })?;
            if !value.is_finite() {
                return Err(DatasetError::Row {
                    line,
                    message: format!("non-finite value in column {}", columns[col]),
                });
            }
            features.push(value);
        }
        if labeled {
            let token = &record[feature_count];
            let label = token
                .parse::<Direction>()
                .map_err(|message| DatasetError::Row { line, message })?;
            labels.push(label);
        }
        rows.push(features);
    }
    Ok(FeatureTable {
        feature_names: columns[..feature_count].to_vec(),
        rows,
        labels: labeled.then_some(labels),
    })
}

/// Parses a labeled-sample CSV; an empty body yields an empty dataset.
pub fn read_samples<R: Read>(reader: R) -> Result<Dataset, DatasetError> {
    let table = read_feature_table(reader)?;
    let Some(labels) = table.labels else {
        return Err(DatasetError::Header(format!("last column must be {LABEL_COLUMN}")));
    };
    let samples = table
        .rows
        .into_iter()
        .zip(labels)
        .map(|(features, label)| Sample { features, label })
        .collect();
    Dataset::new(table.feature_names, samples)
}

/// Loads a labeled-sample file, rejecting files without data rows.
pub fn load_samples(path: impl AsRef<Path>) -> Result<Dataset, DatasetError> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| io_error(path, e))?;
    let dataset = read_samples(file).map_err(|e| match e {
        DatasetError::Io { source, .. } => io_error(path, source),
        other => other,
    })?;
    if dataset.is_empty() {
        return Err(DatasetError::Empty);
    }
    Ok(dataset)
}

pub fn write_samples<W: Write>(dataset: &Dataset, writer: W) -> Result<(), DatasetError> {
    let mut wtr = csv::Writer::from_writer(writer);
    let mut header: Vec<&str> = dataset.feature_names().iter().map(String::as_str).collect();
    header.push(LABEL_COLUMN);
    wtr.write_record(&header).map_err(csv_error)?;
    for sample in dataset.samples() {
        let mut row: Vec<String> = sample.features.iter().map(|v| v.to_string()).collect();
        row.push(sample.label.to_string());
        wtr.write_record(&row).map_err(csv_error)?;
    }
    wtr.flush().map_err(|source| DatasetError::Io {
        path: "<output>".into(),
        source,
    })
}

/// `100 * (curr - prev) / prev`.
pub fn percent_change(prev: f64, curr: f64) -> Result<f64, DatasetError> {
    if !(prev > 0.0 && prev.is_finite()) {
        return Err(DatasetError::NonPositivePrice(prev));
    }
    Ok(100.0 * (curr - prev) / prev)
}

/// UP when the close is strictly above the open, DOWN otherwise (ties included).
pub fn label_direction(open: f64, close: f64) -> Result<Direction, DatasetError> {
    for price in [open, close] {
        if !(price > 0.0 && price.is_finite()) {
            return Err(DatasetError::NonPositivePrice(price));
        }
    }
    Ok(if close > open { Direction::Up } else { Direction::Down })
}

/// One calendar day of raw prices; `None` marks a missing quote.
#[derive(Debug, Clone, PartialEq)]
pub struct RawRow {
    pub date: NaiveDate,
    /// Closing prices in [`FEATURE_NAMES`] order (the SET entry is the SET close).
    pub closes: [Option<f64>; 6],
    pub set_open: Option<f64>,
}

impl RawRow {
    fn is_complete(&self) -> bool {
        self.set_open.is_some() && self.closes.iter().all(Option::is_some)
    }
}

/// Raw daily prices ordered by strictly increasing date.
#[derive(Debug, Clone, PartialEq)]
pub struct RawSeries {
    rows: Vec<RawRow>,
}

impl RawSeries {
    pub fn new(rows: Vec<RawRow>) -> Result<Self, DatasetError> {
        for (i, row) in rows.iter().enumerate() {
            if i > 0 && rows[i - 1].date >= row.date {
                return Err(DatasetError::Row {
                    line: i as u64 + 2,
                    message: format!("date {} does not increase", row.date),
                });
            }
            for price in row.closes.iter().chain([&row.set_open]).flatten() {
                if !(*price > 0.0 && price.is_finite()) {
                    return Err(DatasetError::Row {
                        line: i as u64 + 2,
                        message: format!("price must be strictly positive, got {price}"),
                    });
                }
            }
        }
        Ok(RawSeries { rows })
    }

    pub fn rows(&self) -> &[RawRow] {
        &self.rows
    }
}

const RAW_COLUMNS: [&str; 8] = ["DATE", "NK", "HS", "SET_CLOSE", "SET_OPEN", "USDTHB", "SP500", "GOLD"];

/// Parses `DATE,NK,HS,SET_CLOSE,SET_OPEN,USDTHB,SP500,GOLD` (columns in any order).
pub fn read_raw_series<R: Read>(reader: R) -> Result<RawSeries, DatasetError> {
    let mut rdr = csv_reader(reader);
    let header = rdr.headers().map_err(csv_error)?.clone();
    let mut position = [usize::MAX; 8];
    for (slot, name) in position.iter_mut().zip(RAW_COLUMNS) {
        *slot = header
            .iter()
            .position(|h| h.eq_ignore_ascii_case(name))
            .ok_or_else(|| DatasetError::Header(format!("missing column {name}")))?;
    }
    let mut rows = Vec::new();
    for record in rdr.records() {
        let record = record.map_err(csv_error)?;
        let line = record.position().map_or(0, |p| p.line());
        if record.len() == 1 && record[0].is_empty() {
            continue;
        }
        if record.len() != header.len() {
            return Err(DatasetError::Row {
                line,
                message: format!("expected {} columns, found {}", header.len(), record.len()),
            });
        }
        let date = NaiveDate::parse_from_str(&record[position[0]], "%Y-%m-%d").map_err(|e| DatasetError::Row {
            line,
            message: format!("bad date {:?}: {e}", &record[position[0]]),
        })?;
        let price = |col: usize| -> Result<Option<f64>, DatasetError> {
            let field = &record[position[col]];
            if field.is_empty() {
                return Ok(None);
            }
            field.parse().map(Some).map_err(|_| DatasetError::Row {
                line,
                message: format!("non-numeric value {field:?} in column {}", RAW_COLUMNS[col]),
            })
        };
        // NK, HS, SET_CLOSE, USDTHB, SP500, GOLD
        let closes = [price(1)?, price(2)?, price(3)?, price(5)?, price(6)?, price(7)?];
        rows.push(RawRow {
            date,
            closes,
            set_open: price(4)?,
        });
    }
    RawSeries::new(rows)
}

pub fn load_raw_series(path: impl AsRef<Path>) -> Result<RawSeries, DatasetError> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| io_error(path, e))?;
    read_raw_series(file)
}

/// Turns raw prices into labeled samples.
///
/// Days with any missing value are dropped. Each remaining day `t` (from the
/// third on) becomes one sample: the features are the percent changes of the
/// six closes between the two preceding complete days, the label compares
/// day `t`'s SET open and close.
pub fn build_training_table(series: &RawSeries) -> Result<Dataset, DatasetError> {
    let complete: Vec<&RawRow> = series.rows().iter().filter(|r| r.is_complete()).collect();
    if complete.len() < 3 {
        return Err(DatasetError::TooFewRows(complete.len()));
    }
    let mut samples = Vec::with_capacity(complete.len() - 2);
    for window in complete.windows(3) {
        let (before, prior, today) = (window[0], window[1], window[2]);
        let features = before
            .closes
            .iter()
            .zip(&prior.closes)
            .map(|(a, b)| percent_change(a.unwrap(), b.unwrap()))
            .collect::<Result<Vec<_>, _>>()?;
        let label = label_direction(today.set_open.unwrap(), today.closes[2].unwrap())?;
        samples.push(Sample { features, label });
    }
    Dataset::new(FEATURE_NAMES.iter().map(|s| s.to_string()).collect(), samples)
}

/// Per-sample fold index in `0..k`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FoldAssignment {
    k: usize,
    assignment: Vec<usize>,
}

impl FoldAssignment {
    pub fn k(&self) -> usize {
        self.k
    }

    pub fn assignment(&self) -> &[usize] {
        &self.assignment
    }

    pub fn test_indices(&self, fold: usize) -> Vec<usize> {
        (0..self.assignment.len())
            .filter(|&i| self.assignment[i] == fold)
            .collect()
    }

    pub fn train_indices(&self, fold: usize) -> Vec<usize> {
        (0..self.assignment.len())
            .filter(|&i| self.assignment[i] != fold)
            .collect()
    }

    pub fn fold_sizes(&self) -> Vec<usize> {
        let mut sizes = vec![0; self.k];
        for &f in &self.assignment {
            sizes[f] += 1;
        }
        sizes
    }

    /// Short SHA-256 digest of the assignment, used to show that two runs
    /// shared the same folds.
    pub fn digest(&self) -> String {
        let mut hasher = Sha256::new();
        hasher.update((self.k as u64).to_le_bytes());
        for &f in &self.assignment {
            hasher.update((f as u64).to_le_bytes());
        }
        let bytes = hasher.finalize();
        bytes[..8].iter().map(|b| format!("{b:02x}")).collect()
    }
}

/// Seeded stratified k-fold assignment.
///
/// Each class's indices are shuffled, then all classes are dealt round-robin
/// into the folds with a single running counter, so fold sizes and per-class
/// counts both differ by at most one across folds.
pub fn stratified_folds(dataset: &Dataset, k: usize, seed: u64) -> Result<FoldAssignment, DatasetError> {
    let n = dataset.len();
    if k < 2 || k > n {
        return Err(DatasetError::FoldCount { k, n });
    }
    dataset.require_all_classes()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut assignment = vec![0; n];
    let mut next = 0;
    for class in Direction::ALL {
        let mut members: Vec<usize> = (0..n).filter(|&i| dataset.samples()[i].label == class).collect();
        members.shuffle(&mut rng);
        for i in members {
            assignment[i] = next % k;
            next += 1;
        }
    }
    Ok(FoldAssignment { k, assignment })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fixture() -> Dataset {
        let path = concat!(env!("CARGO_MANIFEST_DIR"), "/../../data/appendix_b.csv");
        load_samples(path).unwrap()
    }

    #[test]
    fn first_fixture_row() {
        let ds = fixture();
        assert_eq!(
            ds.samples()[0].features,
            vec![0.6994, 0.2069, -0.3765, 0.1532, -1.1050, -0.4680]
        );
        assert_eq!(ds.samples()[0].label, Direction::Up);
        assert_eq!(ds.len(), 30);
        assert_eq!(ds.class_counts(), [16, 14]);
        assert_eq!(ds.feature_names(), FEATURE_NAMES);
    }

    #[test]
    fn header_only_is_empty_dataset() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("h.csv");
        std::fs::write(&path, "NK,HS,SET,USDTHB,SP500,GOLD,SET_DIRECTION\n").unwrap();
        assert!(matches!(load_samples(&path), Err(DatasetError::Empty)));
    }

    #[test]
    fn loader_errors_carry_line_numbers() {
        let header = "NK,HS,SET,USDTHB,SP500,GOLD,SET_DIRECTION\n";
        let cases = [
            ("1,2,3,4,5,6,UP\n1,2,3,4,5,UP\n", 3, "columns"),
            ("1,2,x,4,5,6,UP\n", 2, "non-numeric"),
            ("1,2,3,4,5,6,SIDEWAYS\n", 2, "unknown label"),
        ];
        for (body, want_line, fragment) in cases {
            let err = read_samples(format!("{header}{body}").as_bytes()).unwrap_err();
            match err {
                DatasetError::Row { line, message } => {
                    assert_eq!(line, want_line, "{message}");
                    assert!(message.contains(fragment), "{message}");
                }
                other => panic!("unexpected {other:?}"),
            }
        }
    }

    #[test]
    fn missing_file() {
        let err = load_samples("/definitely/not/here.csv").unwrap_err();
        assert!(matches!(err, DatasetError::Io { .. }));
    }

    #[test]
    fn labels_case_insensitive_and_crlf() {
        let text = "NK,HS,SET,USDTHB,SP500,GOLD,SET_DIRECTION\r\n1,2,3,4,5,6,up\r\n1,2,3,4,5,6,Down\r\n";
        let ds = read_samples(text.as_bytes()).unwrap();
        assert_eq!(ds.samples()[0].label, Direction::Up);
        assert_eq!(ds.samples()[1].label, Direction::Down);
    }

    #[test]
    fn write_then_read_is_row_equivalent() {
        let ds = fixture();
        let mut buf = Vec::new();
        write_samples(&ds, &mut buf).unwrap();
        let back = read_samples(buf.as_slice()).unwrap();
        assert_eq!(back, ds);
    }

    #[test]
    fn percent_change_examples() {
        assert_eq!(percent_change(100.0, 101.0).unwrap(), 1.0);
        assert_eq!(percent_change(200.0, 200.0).unwrap(), 0.0);
        assert!((percent_change(1000.0, 993.0).unwrap() + 0.7).abs() < 1e-12);
        assert!(percent_change(0.0, 1.0).is_err());
        assert!(percent_change(-3.0, 1.0).is_err());
    }

    #[test]
    fn label_direction_examples() {
        assert_eq!(label_direction(700.0, 705.0).unwrap(), Direction::Up);
        assert_eq!(label_direction(705.0, 700.0).unwrap(), Direction::Down);
        assert_eq!(label_direction(700.0, 700.0).unwrap(), Direction::Down);
        assert!(label_direction(0.0, 700.0).is_err());
    }

    fn raw(text: &str) -> RawSeries {
        read_raw_series(text.as_bytes()).unwrap()
    }

    const RAW_HEADER: &str = "DATE,NK,HS,SET_CLOSE,SET_OPEN,USDTHB,SP500,GOLD\n";

    #[test]
    fn doubling_series_gives_hundred_percent() {
        let series = raw(&format!(
            "{RAW_HEADER}2010-01-04,1,1,1,1,1,1,1\n2010-01-05,2,2,2,2,2,2,2\n2010-01-06,4,4,4,3,4,4,4\n"
        ));
        let ds = build_training_table(&series).unwrap();
        assert_eq!(ds.len(), 1);
        assert_eq!(ds.samples()[0].features, vec![100.0; 6]);
        assert_eq!(ds.samples()[0].label, Direction::Up);
    }

    #[test]
    fn gap_day_is_skipped() {
        let series = raw(&format!(
            "{RAW_HEADER}2010-01-04,1,1,1,1,1,1,1\n2010-01-05,2,2,2,2,2,2,2\n2010-01-06,,4,4,3,4,4,4\n2010-01-07,4,4,4,3,4,4,4\n"
        ));
        let ds = build_training_table(&series).unwrap();
        assert_eq!(ds.len(), 1);
        assert_eq!(ds.samples()[0].features, vec![100.0; 6]);
    }

    #[test]
    fn too_few_rows() {
        let series = raw(&format!(
            "{RAW_HEADER}2010-01-04,1,1,1,1,1,1,1\n2010-01-05,2,2,2,2,2,2,2\n"
        ));
        assert!(matches!(
            build_training_table(&series),
            Err(DatasetError::TooFewRows(2))
        ));
    }

    #[test]
    fn raw_series_rejects_bad_rows() {
        let decreasing = format!("{RAW_HEADER}2010-01-05,1,1,1,1,1,1,1\n2010-01-04,2,2,2,2,2,2,2\n");
        assert!(read_raw_series(decreasing.as_bytes()).is_err());
        let negative = format!("{RAW_HEADER}2010-01-05,1,-1,1,1,1,1,1\n");
        assert!(read_raw_series(negative.as_bytes()).is_err());
        let bad_date = format!("{RAW_HEADER}05/01/2010,1,1,1,1,1,1,1\n");
        assert!(read_raw_series(bad_date.as_bytes()).is_err());
    }

    #[test]
    fn folds_on_fixture() {
        let ds = fixture();
        for seed in 0..20 {
            let folds = stratified_folds(&ds, 10, seed).unwrap();
            assert_eq!(folds.fold_sizes(), vec![3; 10]);
            for f in 0..10 {
                let ups = folds
                    .test_indices(f)
                    .iter()
                    .filter(|&&i| ds.samples()[i].label == Direction::Up)
                    .count();
                assert!(ups == 1 || ups == 2, "fold {f} has {ups} UP samples");
            }
        }
    }

    #[test]
    fn leave_one_out_and_bad_k() {
        let ds = fixture();
        let loo = stratified_folds(&ds, 30, 3).unwrap();
        assert_eq!(loo.fold_sizes(), vec![1; 30]);
        assert!(matches!(
            stratified_folds(&ds, 1, 0),
            Err(DatasetError::FoldCount { k: 1, n: 30 })
        ));
        assert!(stratified_folds(&ds, 31, 0).is_err());
    }

    #[test]
    fn folds_need_both_classes() {
        let ds = Dataset::from_samples(vec![
            Sample::new(vec![1.0], Direction::Up),
            Sample::new(vec![2.0], Direction::Up),
        ])
        .unwrap();
        assert!(matches!(
            stratified_folds(&ds, 2, 0),
            Err(DatasetError::MissingClass(Direction::Down))
        ));
    }

    #[test]
    fn distribution_validation() {
        assert!(ClassDistribution::new([0.25, 0.75]).is_ok());
        assert!(ClassDistribution::new([0.5, 0.6]).is_err());
        assert!(ClassDistribution::new([-0.1, 1.1]).is_err());
        assert_eq!(ClassDistribution::uniform().argmax(), Direction::Up);
        assert_eq!(ClassDistribution::new([0.3, 0.7]).unwrap().argmax(), Direction::Down);
    }
}
