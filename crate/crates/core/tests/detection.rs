use std::fs;

use proptest::prelude::*;
use sensorval::detection::{
    apply_criterion, fit_discretizer, posterior_moments, predict_distribution, tail_mass, validate_sensor,
    DetectionCriterion, DetectionError, Discretizer, SensorBins, SensorReading, Status,
};
use sensorval::harness::{split_dataset, Dataset, BENCHMARK_SEED, DEFAULT_SPLIT};
use sensorval::inference::Distribution;
use sensorval::model::{load_network, BayesNet};

const FIXTURES: &str = concat!(env!("CARGO_MANIFEST_DIR"), "/fixtures");

fn fixture(name: &str) -> String {
    fs::read_to_string(format!("{FIXTURES}/{name}")).unwrap()
}

fn turbine() -> (BayesNet, Discretizer, Dataset) {
    let net = load_network(&fixture("turbine_network.json")).unwrap();
    let d = Discretizer::from_json(&fixture("turbine_discretizer.json")).unwrap();
    let test = Dataset::from_csv(fixture("turbine_test.csv").as_bytes()).unwrap();
    (net, d, test)
}

fn one_sensor(bins: usize) -> Discretizer {
    let mut d = Discretizer::default();
    d.sensors.insert("x".into(), SensorBins::new("x", 0.0, 10.0, bins).unwrap());
    d
}

fn dist(probabilities: Vec<f64>) -> Distribution {
    Distribution { variable: "x".into(), probabilities }
}

#[test]
fn fixture_bounds_are_training_extremes() {
    let data = Dataset::from_csv(fixture("turbine.csv").as_bytes()).unwrap();
    let (train, _) = split_dataset(&data, DEFAULT_SPLIT, BENCHMARK_SEED).unwrap();
    let (_, d, _) = turbine();
    for (j, s) in train.sensors().iter().enumerate() {
        let col = train.rows().iter().map(|r| r[j]);
        let lo = col.clone().fold(f64::INFINITY, f64::min);
        let hi = col.fold(f64::NEG_INFINITY, f64::max);
        let b = d.get(s).unwrap();
        assert_eq!((b.lower, b.upper, b.bins), (lo, hi, 10), "{s}");
    }
}

#[test]
fn fit_discretizer_examples() {
    let rows: Vec<SensorReading> = [0.0, 10.0]
        .iter()
        .map(|&v| {
            let mut r = SensorReading::new();
            r.set("x", v);
            r
        })
        .collect();
    let d = fit_discretizer(&rows, &["x".to_string()], 10).unwrap();
    let mids = d.get("x").unwrap().midpoints();
    assert_eq!(mids.first(), Some(&0.5));
    assert_eq!(mids.last(), Some(&9.5));

    let flat: Vec<SensorReading> = (0..3)
        .map(|_| {
            let mut r = SensorReading::new();
            r.set("x", 5.0);
            r
        })
        .collect();
    assert!(matches!(fit_discretizer(&flat, &["x".to_string()], 10), Err(DetectionError::ZeroRange(_))));
}

#[test]
fn moments_of_uniform_two_bins() {
    let d = one_sensor(2);
    let (mean, sd) = posterior_moments(&dist(vec![0.5, 0.5]), &d, "x").unwrap();
    assert_eq!((mean, sd), (5.0, 2.5));
}

#[test]
fn criterion_examples() {
    let d = one_sensor(10);
    // Half the mass on each of the intervals around 5: mean 5, sd 0.5.
    let mut q = vec![0.0; 10];
    q[4] = 0.5;
    q[5] = 0.5;
    let two = dist(q);
    let (mean, sd) = posterior_moments(&two, &d, "x").unwrap();
    assert_eq!((mean, sd), (5.0, 0.5));
    let sigma2 = DetectionCriterion::sigma(2.0).unwrap();
    assert_eq!(apply_criterion(mean + 3.0 * sd, &two, &d, "x", sigma2).unwrap().status, Status::Faulty);
    for c in [sigma2, DetectionCriterion::pvalue(0.01).unwrap(), DetectionCriterion::tau(0.1).unwrap()] {
        assert_eq!(apply_criterion(mean, &two, &d, "x", c).unwrap().status, Status::Correct, "{}", c.label());
    }
    let mut modal = vec![0.4 / 9.0; 10];
    modal[2] = 0.6;
    let tau = DetectionCriterion::tau(0.1).unwrap();
    assert_eq!(apply_criterion(2.5, &dist(modal), &d, "x", tau).unwrap().status, Status::Correct);
}

#[test]
fn clean_fixture_row_passes_and_own_fault_is_flagged() {
    let (net, d, test) = turbine();
    let sigma3 = DetectionCriterion::sigma(3.0).unwrap();
    let row = test.reading(0);
    assert_eq!(validate_sensor(&net, &d, &row, "m", sigma3).unwrap().status, Status::Correct);

    let b = d.get("m").unwrap();
    let x = row.get("m").unwrap();
    let mut faulted = row.clone();
    faulted.set("m", if b.upper - x >= x - b.lower { b.upper } else { b.lower });
    assert_eq!(validate_sensor(&net, &d, &faulted, "m", sigma3).unwrap().status, Status::Faulty);
}

#[test]
fn severe_fault_in_blanket_member_shows_as_apparent_fault() {
    let (net, d, test) = turbine();
    let sigma3 = DetectionCriterion::sigma(3.0).unwrap();
    let mut row = test.reading(0);
    let b = d.get("p").unwrap();
    let x = row.get("p").unwrap();
    row.set("p", if b.upper - x >= x - b.lower { b.upper } else { b.lower });
    assert_eq!(validate_sensor(&net, &d, &row, "m", sigma3).unwrap().status, Status::Faulty);
}

#[test]
fn fixture_prediction_for_m_sums_to_one() {
    let (net, d, test) = turbine();
    let dist = predict_distribution(&net, &d, &test.reading(0), "m").unwrap();
    assert_eq!(dist.probabilities.len(), 10);
    assert!((dist.probabilities.iter().sum::<f64>() - 1.0).abs() < 1e-9);
    // Independent recomputation of the moments from the emitted distribution.
    let b = d.get("m").unwrap();
    let w = (b.upper - b.lower) / 10.0;
    let mean: f64 = dist.probabilities.iter().enumerate().map(|(k, p)| p * (b.lower + w * (k as f64 + 0.5))).sum();
    let var: f64 = dist
        .probabilities
        .iter()
        .enumerate()
        .map(|(k, p)| p * (b.lower + w * (k as f64 + 0.5) - mean).powi(2))
        .sum();
    let (m, s) = posterior_moments(&dist, &d, "m").unwrap();
    assert!((m - mean).abs() < 1e-9 && (s - var.sqrt()).abs() < 1e-9);
}

#[test]
fn missing_blanket_reading_is_named() {
    let (net, d, test) = turbine();
    let mut row = SensorReading::new();
    for (s, v) in test.reading(0).iter().filter(|(s, _)| s.as_str() != "p") {
        row.set(s.clone(), *v);
    }
    match predict_distribution(&net, &d, &row, "m") {
        Err(DetectionError::MissingReading(s)) => assert_eq!(s, "p"),
        other => panic!("expected a missing reading, got {other:?}"),
    }
}

fn probabilities(n: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(0.001f64..1.0, n).prop_map(|v| {
        let z: f64 = v.iter().sum();
        v.into_iter().map(|x| x / z).collect()
    })
}

proptest! {
    #[test]
    fn sigma_flags_are_monotone_in_deviation(p in probabilities(10), a in -5.0f64..15.0, b in -5.0f64..15.0, k in 0.5f64..4.0) {
        let d = one_sensor(10);
        let dist = dist(p);
        let (mean, _) = posterior_moments(&dist, &d, "x").unwrap();
        let (near, far) = if (a - mean).abs() <= (b - mean).abs() { (a, b) } else { (b, a) };
        let c = DetectionCriterion::sigma(k).unwrap();
        if apply_criterion(near, &dist, &d, "x", c).unwrap().status == Status::Faulty {
            prop_assert_eq!(apply_criterion(far, &dist, &d, "x", c).unwrap().status, Status::Faulty);
        }
    }

    #[test]
    fn tail_mass_is_a_probability(p in probabilities(10), x in -5.0f64..15.0) {
        let d = one_sensor(10);
        let bins = d.get("x").unwrap();
        let dist = dist(p);
        let (mean, _) = posterior_moments(&dist, &d, "x").unwrap();
        let t = tail_mass(x, &dist, bins, mean);
        prop_assert!((0.0..=1.0 + 1e-12).contains(&t));
        let nearest = bins
            .midpoints()
            .into_iter()
            .min_by(|u, v| (u - mean).abs().total_cmp(&(v - mean).abs()))
            .unwrap();
        prop_assert!((tail_mass(nearest, &dist, bins, mean) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn own_reading_never_enters_the_prediction(row in 0usize..261, x in -1e4f64..1e4) {
        let (net, d, test) = turbine();
        let base = test.reading(row);
        for s in ["m", "t", "p", "g", "a"] {
            let mut moved = base.clone();
            moved.set(s, x);
            prop_assert_eq!(
                predict_distribution(&net, &d, &base, s).unwrap(),
                predict_distribution(&net, &d, &moved, s).unwrap()
            );
        }
    }
}
