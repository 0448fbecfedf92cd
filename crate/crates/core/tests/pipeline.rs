use setcast::dataset::{build_training_table, load_samples, read_raw_series, Direction};
use setcast::evaluation::{confusion_matrix, cross_validate, PredictionRecord};
use setcast::{NaiveBayesLearner, NaiveBayesModel};

const FIXTURE: &str = concat!(env!("CARGO_MANIFEST_DIR"), "/../../data/appendix_b.csv");

const RAW: &str = "DATE,NK,HS,SET_CLOSE,SET_OPEN,USDTHB,SP500,GOLD
2010-01-04,100,200,700,690,31.25,1100,1000
2010-01-05,110,190,707,700,31.5,1111,1010
2010-01-06,99,209,700,710,31.5,1099.89,999.9
2010-01-07,99,200,714,700,31,1100,1020
2010-01-08,108.9,220,714,714,32,1155,969
";

#[test]
fn raw_series_to_training_table() {
    let table = build_training_table(&read_raw_series(RAW.as_bytes()).unwrap()).unwrap();
    let expected: [([f64; 6], Direction); 3] = [
        ([10.0, -5.0, 1.0, 0.8, 1.0, 1.0], Direction::Down),
        ([-10.0, 10.0, -0.9900990099009901, 0.0, -1.0, -1.0], Direction::Up),
        (
            [
                0.0,
                -4.30622009569378,
                2.0,
                -1.5873015873015872,
                0.010001000100010001,
                2.01020102010201,
            ],
            Direction::Down,
        ),
    ];
    assert_eq!(table.len(), 3);
    for (sample, (features, label)) in table.samples().iter().zip(expected) {
        assert_eq!(sample.label, label);
        for (got, want) in sample.features.iter().zip(features) {
            assert!((got - want).abs() < 1e-12, "{got} vs {want}");
        }
    }
}

#[test]
fn ingested_table_feeds_cross_validation() {
    let mut raw = String::from("DATE,NK,HS,SET_CLOSE,SET_OPEN,USDTHB,SP500,GOLD\n");
    // Deterministic wiggles so both directions appear.
    for day in 0..24 {
        let t = day as f64;
        raw.push_str(&format!(
            "2010-02-{:02},{},{},{},{},{},{},{}\n",
            day + 1,
            100.0 + (t * 1.3).sin() * 3.0,
            200.0 + (t * 0.7).cos() * 4.0,
            700.0 + (t * 0.9).sin() * 10.0,
            700.0 + (t * 1.7).cos() * 10.0,
            31.0 + (t * 0.5).sin(),
            1100.0 + (t * 1.1).cos() * 20.0,
            1000.0 + (t * 0.3).sin() * 15.0,
        ));
    }
    let table = build_training_table(&read_raw_series(raw.as_bytes()).unwrap()).unwrap();
    assert_eq!(table.len(), 22);
    let cv = cross_validate(&NaiveBayesLearner::default(), &table, 5, 0).unwrap();
    assert_eq!(cv.report.n, 22);
    assert_eq!(cv.report.matrix.total(), 22);
}

/// Model file holding the published Gaussian parameters and frequency priors.
fn published_model() -> NaiveBayesModel {
    let params: [(f64, f64, f64, f64); 6] = [
        (0.0956, 1.5406, 0.5773, 1.7603),
        (-0.1008, 0.5522, 0.1792, 1.1067),
        (-0.0551, 0.6573, 0.7708, 0.7328),
        (0.0000, 0.1972, 0.1993, 0.2779),
        (-0.0616, 0.5906, 0.5213, 1.2035),
        (-0.1306, 0.7586, -0.2653, 0.9391),
    ];
    let mut text = String::from(
        "format = setcast-naive-bayes/1\nclasses = UP,DOWN\npriors.mode = frequency\n\
         prior.UP = 0.5333333333333333\nprior.DOWN = 0.4666666666666667\n\
         features = NK,HS,SET,USDTHB,SP500,GOLD\n",
    );
    for (i, (mu_up, s_up, mu_down, s_down)) in params.iter().enumerate() {
        text.push_str(&format!(
            "attr.{i}.kind = gaussian\nattr.{i}.UP.mu = {mu_up}\nattr.{i}.UP.sigma = {s_up}\n\
             attr.{i}.DOWN.mu = {mu_down}\nattr.{i}.DOWN.sigma = {s_down}\n"
        ));
    }
    NaiveBayesModel::from_text(&text).unwrap()
}

#[test]
fn resubstitution_under_published_parameters() {
    // Independent log-posterior evaluation of all 30 rows gives this matrix.
    let data = load_samples(FIXTURE).unwrap();
    let model = published_model();
    let records: Vec<PredictionRecord> = data
        .samples()
        .iter()
        .map(|s| PredictionRecord::new(s.label, model.predict_distribution(&s.features).unwrap()))
        .collect();
    assert_eq!(confusion_matrix(&records).unwrap().counts(), [[16, 0], [6, 8]]);
}
