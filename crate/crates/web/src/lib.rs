//! WebAssembly bindings for the browser demo in `www/`.
//!
//! Three operations: an SVM decision surface over user-placed points, naive
//! Bayes class densities for one fixture attribute, and a cross-validated
//! comparison on the bundled fixture.

use wasm_bindgen::prelude::*;

use setcast::dataset::read_samples;
use setcast::evaluation::compare;
use setcast::naive_bayes::{self, NaiveBayesConfig};
use setcast::report::render_comparison_text;
use setcast::svm::{self, train_smo};
use setcast::{Dataset, Direction, KernelSpec, NaiveBayesLearner, Sample, SvmLearner, TrainerConfig};

const FIXTURE: &str = include_str!("../../../data/appendix_b.csv");

fn fixture() -> Dataset {
    read_samples(FIXTURE.as_bytes()).expect("bundled fixture is valid")
}

fn js_error(e: impl std::fmt::Display) -> JsError {
    JsError::new(&e.to_string())
}

fn parse_kernel(kernel: &str) -> Result<KernelSpec, String> {
    let spec: KernelSpec = kernel.parse().map_err(|e| format!("{e}"))?;
    spec.validate().map_err(|e| e.to_string())?;
    Ok(spec)
}

/// SVM trained on 2-D points, evaluated on a square grid.
#[wasm_bindgen]
pub struct SvmSurface {
    decisions: Vec<f64>,
    support: Vec<u32>,
    converged: bool,
}

#[wasm_bindgen]
impl SvmSurface {
    /// Row-major decision values, `resolution` rows from y_min upwards.
    pub fn decisions(&self) -> Vec<f64> {
        self.decisions.clone()
    }

    /// Indices of the input points with nonzero multipliers.
    pub fn support(&self) -> Vec<u32> {
        self.support.clone()
    }

    pub fn converged(&self) -> bool {
        self.converged
    }
}

/// Shared by the binding and native tests.
pub fn fit_surface(
    points: &[f64],
    kernel: &str,
    cost: f64,
    bounds: [f64; 4],
    resolution: usize,
) -> Result<SvmSurface, String> {
    if !points.len().is_multiple_of(3) {
        return Err("points must be flat (x, y, label) triples".into());
    }
    let samples: Vec<Sample> = points
        .chunks_exact(3)
        .map(|p| {
            Sample::new(
                vec![p[0], p[1]],
                if p[2] > 0.0 { Direction::Up } else { Direction::Down },
            )
        })
        .collect();
    let data = Dataset::from_samples(samples).map_err(|e| e.to_string())?;
    let config = TrainerConfig {
        cost,
        ..TrainerConfig::default()
    };
    let fit = train_smo(&data, parse_kernel(kernel)?, &config).map_err(|e| e.to_string())?;
    let [x_min, x_max, y_min, y_max] = bounds;
    let steps = resolution.max(2);
    let step = |lo: f64, hi: f64, i: usize| lo + (hi - lo) * i as f64 / (steps - 1) as f64;
    let mut decisions = Vec::with_capacity(steps * steps);
    for row in 0..steps {
        for col in 0..steps {
            let x = [step(x_min, x_max, col), step(y_min, y_max, row)];
            decisions.push(svm::decision_value(&fit.model, &x).map_err(|e| e.to_string())?);
        }
    }
    let support = fit
        .alphas
        .iter()
        .enumerate()
        .filter(|(_, a)| **a > 0.0)
        .map(|(i, _)| i as u32)
        .collect();
    Ok(SvmSurface {
        decisions,
        support,
        converged: fit.model.converged,
    })
}

/// `points` holds (x, y, label) triples with label > 0 for UP. `kernel` uses
/// the CLI spelling: `linear`, `poly:<degree>`, `rbf:<delta_sq>`.
#[wasm_bindgen(js_name = svmSurface)]
#[allow(clippy::too_many_arguments)]
pub fn svm_surface(
    points: &[f64],
    kernel: &str,
    cost: f64,
    x_min: f64,
    x_max: f64,
    y_min: f64,
    y_max: f64,
    resolution: usize,
) -> Result<SvmSurface, JsError> {
    fit_surface(points, kernel, cost, [x_min, x_max, y_min, y_max], resolution).map_err(js_error)
}

#[wasm_bindgen(js_name = featureNames)]
pub fn feature_names() -> Vec<String> {
    fixture().feature_names().to_vec()
}

/// Fixture values of one attribute, as (value, label) pairs with label 1 for UP.
#[wasm_bindgen(js_name = attributeValues)]
pub fn attribute_values(attribute: usize) -> Vec<f64> {
    fixture()
        .samples()
        .iter()
        .filter_map(|s| {
            s.features
                .get(attribute)
                .map(|v| [*v, if s.label == Direction::Up { 1.0 } else { 0.0 }])
        })
        .flatten()
        .collect()
}

/// Densities of one attribute under the fixture-trained model, sampled at
/// `steps` points: flat (x, pdf_up, pdf_down, posterior_up) quadruples. The
/// posterior uses this attribute alone together with the class priors.
pub fn density_curves(attribute: usize, x_min: f64, x_max: f64, steps: usize) -> Result<Vec<f64>, String> {
    let data = fixture();
    if attribute >= data.dim() {
        return Err(format!("attribute {attribute} out of range 0..{}", data.dim()));
    }
    let model = naive_bayes::train_continuous(&data, &NaiveBayesConfig::default()).map_err(|e| e.to_string())?;
    let up = model.gaussian(attribute, Direction::Up).expect("continuous attribute");
    let down = model
        .gaussian(attribute, Direction::Down)
        .expect("continuous attribute");
    let priors = model.priors();
    let steps = steps.max(2);
    let mut out = Vec::with_capacity(4 * steps);
    for i in 0..steps {
        let x = x_min + (x_max - x_min) * i as f64 / (steps - 1) as f64;
        // Log-space so far tails do not underflow to 0/0.
        let lu = priors.get(Direction::Up).ln() + up.ln_pdf(x);
        let ld = priors.get(Direction::Down).ln() + down.ln_pdf(x);
        let posterior = 1.0 / (1.0 + (ld - lu).exp());
        out.extend([x, up.pdf(x), down.pdf(x), posterior]);
    }
    Ok(out)
}

#[wasm_bindgen(js_name = densityCurves)]
pub fn density_curves_js(attribute: usize, x_min: f64, x_max: f64, steps: usize) -> Result<Vec<f64>, JsError> {
    density_curves(attribute, x_min, x_max, steps).map_err(js_error)
}

/// Naive Bayes against an SVM on the fixture with one shared fold assignment.
pub fn compare_on_fixture(folds: usize, seed: u64, kernel: &str, cost: f64) -> Result<String, String> {
    let svm = SvmLearner {
        kernel: parse_kernel(kernel)?,
        config: TrainerConfig {
            cost,
            ..TrainerConfig::default()
        },
    };
    let report = compare(&NaiveBayesLearner::default(), &svm, &fixture(), folds, seed, 1).map_err(|e| e.to_string())?;
    Ok(render_comparison_text(&report))
}

#[wasm_bindgen(js_name = compareOnFixture)]
pub fn compare_on_fixture_js(folds: usize, seed: u32, kernel: &str, cost: f64) -> Result<String, JsError> {
    compare_on_fixture(folds, u64::from(seed), kernel, cost).map_err(js_error)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn linear_surface_separates_two_clusters() {
        let points = [-1.0, -1.0, 1.0, -1.5, -0.5, 1.0, 1.0, 1.0, 0.0, 1.5, 0.5, 0.0];
        let surface = fit_surface(&points, "linear", 10.0, [-2.0, 2.0, -2.0, 2.0], 5).unwrap();
        assert_eq!(surface.decisions.len(), 25);
        assert!(surface.converged);
        assert!(!surface.support.is_empty());
        // Bottom-left corner is on the UP side, top-right on the DOWN side.
        assert!(surface.decisions[0] > 0.0);
        assert!(surface.decisions[24] < 0.0);
    }

    #[test]
    fn surface_rejects_bad_input() {
        assert!(fit_surface(&[0.0, 0.0], "linear", 1.0, [0.0, 1.0, 0.0, 1.0], 4).is_err());
        assert!(fit_surface(&[0.0, 0.0, 1.0, 1.0, 1.0, 1.0], "linear", 1.0, [0.0, 1.0, 0.0, 1.0], 4).is_err());
        assert!(fit_surface(&[0.0, 0.0, 1.0, 1.0, 1.0, 0.0], "cubic", 1.0, [0.0, 1.0, 0.0, 1.0], 4).is_err());
    }

    #[test]
    fn density_curves_are_consistent() {
        let curves = density_curves(0, -4.0, 4.0, 41).unwrap();
        assert_eq!(curves.len(), 4 * 41);
        for q in curves.chunks_exact(4) {
            assert!(q[1] > 0.0 && q[2] > 0.0);
            assert!((0.0..=1.0).contains(&q[3]));
        }
        assert!(density_curves(6, 0.0, 1.0, 3).is_err());
    }

    #[test]
    fn fixture_helpers() {
        assert_eq!(feature_names().len(), 6);
        let values = attribute_values(0);
        assert_eq!(values.len(), 60);
        assert_eq!(values.iter().skip(1).step_by(2).filter(|l| **l == 1.0).count(), 16);
    }

    #[test]
    fn comparison_report_on_fixture() {
        let text = compare_on_fixture(10, 1, "linear", 1.0).unwrap();
        assert!(text.contains("Confusion matrix for naive Bayes:"));
        assert!(compare_on_fixture(1, 1, "linear", 1.0).is_err());
    }
}
