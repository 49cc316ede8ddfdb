mod common;

use std::collections::BTreeMap;

use proptest::prelude::*;
use rand::Rng;
use sensorval::inference::{
    brute_force_posterior, expand_noisy_or, noisy_or_row, posterior_marginal, Evidence, InferenceError,
    NoisyOrParams,
};
use sensorval::model::{markov_blanket, reference_net};

#[test]
fn hand_computed_reference_posterior() {
    let net = reference_net();
    let ev = Evidence::new().with("t", "high");
    let post = posterior_marginal(&net, &ev, "m").unwrap();
    let want = 0.6 * 0.9 / (0.6 * 0.9 + 0.4 * 0.1);
    assert!((post.probability(1) - want).abs() < 1e-12);

    // g depends on m only through t, so observing t screens it off.
    let ev = ev.with("m", "low");
    let post = posterior_marginal(&net, &ev, "g").unwrap();
    assert!((post.probability(1) - 0.85).abs() < 1e-12);
}

#[test]
fn observed_target_and_bad_states_are_errors() {
    let net = reference_net();
    let ev = Evidence::new().with("t", "high");
    assert!(matches!(posterior_marginal(&net, &ev, "t"), Err(InferenceError::TargetObserved(_))));
    assert!(posterior_marginal(&net, &Evidence::new().with("t", "warm"), "m").is_err());
    assert!(posterior_marginal(&net, &Evidence::new().with("q", "high"), "m").is_err());
    assert!(posterior_marginal(&net, &Evidence::new(), "q").is_err());
}

#[test]
fn single_cause_gives_link_strength() {
    let mut p = NoisyOrParams::new();
    p.set("r", "a", 0.99).unwrap();
    let on: BTreeMap<String, bool> = [("r".to_string(), true)].into();
    let off: BTreeMap<String, bool> = [("r".to_string(), false)].into();
    assert_eq!(noisy_or_row(&p, "a", &on).unwrap(), 0.99);
    assert_eq!(noisy_or_row(&p, "a", &off).unwrap(), 0.0);
    assert!(p.set("r", "a", 1.5).is_err());
}

proptest! {
    #[test]
    fn elimination_matches_enumeration(seed in any::<u64>(), n in 1usize..=10, card in 2usize..=3) {
        let mut rng = common::rng(seed);
        let net = common::random_net(&mut rng, n, card, 0.4, 3);
        let target = net.variable(rng.random_range(0..n)).name.clone();
        let k = rng.random_range(0..=n);
        let ev = common::random_evidence(&mut rng, &net, k, &target);
        let ve = posterior_marginal(&net, &ev, &target).unwrap();
        let bf = brute_force_posterior(&net, &ev, &target).unwrap();
        prop_assert!(ve.max_abs_diff(&bf) <= 1e-9);
        prop_assert!((ve.probabilities.iter().sum::<f64>() - 1.0).abs() <= 1e-12);
    }

    #[test]
    fn observed_blanket_screens_off_the_rest(seed in any::<u64>(), n in 2usize..=9) {
        let mut rng = common::rng(seed);
        let net = common::random_net(&mut rng, n, 2, 0.45, 3);
        let target = net.variable(rng.random_range(0..n)).name.clone();
        let mut full = Evidence::new();
        for v in net.variables().iter().filter(|v| v.name != target) {
            full.insert(v.name.clone(), v.states[rng.random_range(0..v.cardinality())].clone());
        }
        let mb = markov_blanket(&net, &target).unwrap();
        let mut screened = Evidence::new();
        for (v, s) in full.iter().filter(|(v, _)| mb.contains(*v)) {
            screened.insert(v.clone(), s.clone());
        }
        let a = posterior_marginal(&net, &full, &target).unwrap();
        let b = posterior_marginal(&net, &screened, &target).unwrap();
        prop_assert!(a.max_abs_diff(&b) <= 1e-9);
    }

    #[test]
    fn noisy_or_table_matches_enumeration(strengths in prop::collection::vec(0.0f64..=1.0, 1..=8)) {
        let mut params = NoisyOrParams::new();
        for (i, c) in strengths.iter().enumerate() {
            params.set(&format!("c{i}"), "e", *c).unwrap();
        }
        let (causes, rows) = expand_noisy_or(&params, "e");
        let k = causes.len();
        prop_assert_eq!(rows.len(), 1 << k);
        for (idx, row) in rows.iter().enumerate() {
            let active: BTreeMap<String, bool> =
                causes.iter().enumerate().map(|(j, c)| (c.clone(), idx >> (k - 1 - j) & 1 == 1)).collect();
            let direct = 1.0 - causes
                .iter()
                .filter(|c| active[*c])
                .map(|c| 1.0 - params.strength(c, "e").unwrap())
                .product::<f64>();
            prop_assert!((row[1] - direct).abs() <= 1e-12);
            prop_assert!((row[1] - noisy_or_row(&params, "e", &active).unwrap()).abs() <= 1e-12);
            prop_assert!((row[0] + row[1] - 1.0).abs() <= 1e-12);
        }
    }

    #[test]
    fn activating_a_cause_never_lowers_the_effect(strengths in prop::collection::vec(0.0f64..=1.0, 1..=8), mask in any::<u8>()) {
        let mut params = NoisyOrParams::new();
        for (i, c) in strengths.iter().enumerate() {
            params.set(&format!("c{i}"), "e", *c).unwrap();
        }
        let causes = params.causes_of("e");
        let base: BTreeMap<String, bool> =
            causes.iter().enumerate().map(|(j, c)| (c.clone(), mask >> j & 1 == 1)).collect();
        let p0 = noisy_or_row(&params, "e", &base).unwrap();
        for c in &causes {
            let mut more = base.clone();
            more.insert(c.clone(), true);
            prop_assert!(noisy_or_row(&params, "e", &more).unwrap() >= p0);
        }
    }
}
