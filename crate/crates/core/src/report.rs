//! Text and `key = value` renderings of evaluation reports.

use std::fmt::Write;

use crate::dataset::Direction;
use crate::evaluation::{ClassStats, ComparisonReport, EvaluationReport};
use crate::kv::KvDocument;

/// Human-readable layout: summary, detailed accuracy by class, confusion matrix.
pub fn render_text(report: &EvaluationReport) -> String {
    let mut out = String::new();
    let heading = if report.folds.is_some() {
        "Stratified cross-validation"
    } else {
        "Evaluation"
    };
    let _ = writeln!(out, "=== {} : {} ===", report.learner, heading);
    if let (Some(k), Some(digest)) = (report.folds, &report.fold_digest) {
        let seed = report.seed.map_or(String::new(), |s| format!(", seed {s}"));
        let _ = writeln!(out, "({k} folds{seed}, assignment {digest})");
    }
    let _ = writeln!(out, "=== Summary ===\n");
    let pct = |count: usize| 100.0 * count as f64 / report.n as f64;
    let _ = writeln!(
        out,
        "{:<36}{:>6}{:>14.4} %",
        "Correctly Classified Instances",
        report.matrix.correct(),
        pct(report.matrix.correct())
    );
    let _ = writeln!(
        out,
        "{:<36}{:>6}{:>14.4} %",
        "Incorrectly Classified Instances",
        report.incorrect(),
        pct(report.incorrect())
    );
    let _ = writeln!(out, "{:<36}{:>12.4}", "Kappa statistic", report.kappa);
    let _ = writeln!(out, "{:<36}{:>12.4}", "Mean absolute error", report.mae);
    let _ = writeln!(out, "{:<36}{:>12.4}", "Root mean squared error", report.rmse);
    let _ = writeln!(out, "{:<36}{:>12.4} %", "Relative absolute error", report.rae);
    let _ = writeln!(out, "{:<36}{:>12.4} %", "Root relative squared error", report.rrse);
    let _ = writeln!(out, "{:<36}{:>6}", "Total Number of Instances", report.n);

    let _ = writeln!(out, "\n=== Detailed Accuracy By Class ===\n");
    let _ = writeln!(
        out,
        "{:<15}{:>9}{:>9}{:>11}{:>9}{:>11}{:>10}  Class",
        "", "TP Rate", "FP Rate", "Precision", "Recall", "F-Measure", "ROC Area"
    );
    let row = |out: &mut String, label: &str, s: &ClassStats, class: &str| {
        let _ = writeln!(
            out,
            "{:<15}{:>9.3}{:>9.3}{:>11.3}{:>9.3}{:>11.3}{:>10.3}  {}",
            label, s.tp_rate, s.fp_rate, s.precision, s.recall, s.f_measure, s.roc_area, class
        );
    };
    for class in Direction::ALL {
        row(&mut out, "", report.class(class), &class.to_string());
    }
    row(&mut out, "Weighted Avg.", &report.weighted, "");

    let _ = writeln!(out, "\n=== Confusion Matrix ===\n");
    let _ = writeln!(out, "{:>5}{:>5}   <-- classified as", "a", "b");
    for (actual, letter) in Direction::ALL.iter().zip(["a", "b"]) {
        let _ = writeln!(
            out,
            "{:>5}{:>5} |   {} = {}",
            report.matrix.get(*actual, Direction::Up),
            report.matrix.get(*actual, Direction::Down),
            letter,
            actual
        );
    }
    for warning in &report.warnings {
        let _ = writeln!(out, "\nwarning: {warning}");
    }
    out
}

fn push_report(doc: &mut KvDocument, prefix: &str, report: &EvaluationReport) {
    let key = |name: &str| format!("{prefix}{name}");
    doc.push(key("learner"), &report.learner);
    doc.push(key("n"), report.n);
    if let Some(k) = report.folds {
        doc.push(key("folds"), k);
    }
    if let Some(seed) = report.seed {
        doc.push(key("seed"), seed);
    }
    if let Some(digest) = &report.fold_digest {
        doc.push(key("fold_digest"), digest);
    }
    doc.push(key("correct"), report.matrix.correct());
    doc.push(key("incorrect"), report.incorrect());
    doc.push(key("accuracy"), report.accuracy);
    doc.push(key("kappa"), report.kappa);
    doc.push(key("mae"), report.mae);
    doc.push(key("rmse"), report.rmse);
    doc.push(key("rae_percent"), report.rae);
    doc.push(key("rrse_percent"), report.rrse);
    for actual in Direction::ALL {
        for predicted in Direction::ALL {
            doc.push(
                key(&format!("matrix.{actual}.{predicted}")),
                report.matrix.get(actual, predicted),
            );
        }
    }
    let stats = Direction::ALL
        .iter()
        .map(|c| (c.to_string(), report.class(*c)))
        .chain([("weighted".to_string(), &report.weighted)]);
    for (name, s) in stats {
        doc.push(key(&format!("class.{name}.tp_rate")), s.tp_rate);
        doc.push(key(&format!("class.{name}.fp_rate")), s.fp_rate);
        doc.push(key(&format!("class.{name}.precision")), s.precision);
        doc.push(key(&format!("class.{name}.recall")), s.recall);
        doc.push(key(&format!("class.{name}.f_measure")), s.f_measure);
        doc.push(key(&format!("class.{name}.roc_area")), s.roc_area);
    }
    doc.push(key("warnings"), report.warnings.join("; "));
}

/// Every report field at full precision, one `key = value` per line.
pub fn render_machine(report: &EvaluationReport) -> String {
    let mut doc = KvDocument::new();
    push_report(&mut doc, "", report);
    doc.render()
}

/// Side-by-side table of the headline statistics and both confusion matrices.
pub fn render_comparison_text(comparison: &ComparisonReport) -> String {
    let (a, b) = (&comparison.first, &comparison.second);
    let mut out = String::new();
    let _ = writeln!(out, "{:<34}{:>16}{:>16}", "", a.learner, b.learner);
    let _ = writeln!(
        out,
        "{:<34}{:>14.2} %{:>14.2} %",
        "Correctly classified instances",
        100.0 * a.accuracy,
        100.0 * b.accuracy
    );
    let _ = writeln!(out, "{:<34}{:>16.4}{:>16.4}", "Mean absolute error", a.mae, b.mae);
    let _ = writeln!(out, "{:<34}{:>16.4}{:>16.4}", "Root mean squared error", a.rmse, b.rmse);
    let _ = writeln!(
        out,
        "{:<34}{:>14.2} %{:>14.2} %",
        "Relative absolute error", a.rae, b.rae
    );
    let _ = writeln!(
        out,
        "{:<34}{:>14.2} %{:>14.2} %",
        "Root relative squared error", a.rrse, b.rrse
    );
    for report in [a, b] {
        let _ = writeln!(out, "\nConfusion matrix for {}:", report.learner);
        let _ = writeln!(out, "{:>5}{:>5}   <-- classified as", "a", "b");
        for (actual, letter) in Direction::ALL.iter().zip(["a", "b"]) {
            let _ = writeln!(
                out,
                "{:>5}{:>5} |   {} = {}",
                report.matrix.get(*actual, Direction::Up),
                report.matrix.get(*actual, Direction::Down),
                letter,
                actual
            );
        }
    }
    if let (Some(da), Some(db)) = (&a.fold_digest, &b.fold_digest) {
        let _ = writeln!(out, "\nfold assignment: {da} / {db}");
    }
    out
}

pub fn render_comparison_machine(comparison: &ComparisonReport) -> String {
    let mut doc = KvDocument::new();
    push_report(&mut doc, "first.", &comparison.first);
    push_report(&mut doc, "second.", &comparison.second);
    doc.render()
}
