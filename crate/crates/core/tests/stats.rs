use orbitlab::stats::*;
use proptest::prelude::*;

fn measure(xs: &[f64], cats: &[u8]) -> EmpiricalMeasure {
    let schema = Schema::new(&["x"], &["c"]);
    let recs: Vec<FeatureRecord> = xs.iter().zip(cats).map(|(&x, &c)| FeatureRecord { real: vec![x], categorical: vec![format!("r{c}")] }).collect();
    empirical(&recs, &schema).unwrap()
}

fn cdf(xs: &[f64], t: f64) -> f64 {
    xs.iter().filter(|&&x| x <= t).count() as f64 / xs.len() as f64
}

/// `sup |F1 - F2|` evaluated at every atom.
fn ks_oracle(a: &[f64], b: &[f64]) -> f64 {
    a.iter().chain(b).map(|&t| (cdf(a, t) - cdf(b, t)).abs()).fold(0.0, f64::max)
}

/// `integral |F1 - F2|` over the sorted union of atoms.
fn w1_oracle(a: &[f64], b: &[f64]) -> f64 {
    let mut pts: Vec<f64> = a.iter().chain(b).copied().collect();
    pts.sort_by(f64::total_cmp);
    pts.windows(2).map(|w| (cdf(a, w[0]) - cdf(b, w[0])).abs() * (w[1] - w[0])).sum()
}

fn sample() -> impl Strategy<Value = (Vec<f64>, Vec<u8>)> {
    (1usize..40).prop_flat_map(|n| (prop::collection::vec(-50.0f64..50.0, n), prop::collection::vec(0u8..4, n)))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn distances_match_oracles((a, ca) in sample(), (b, cb) in sample()) {
        let (m1, m2) = (measure(&a, &ca), measure(&b, &cb));
        prop_assert!((ks_distance(&m1, &m2, "x").unwrap() - ks_oracle(&a, &b)).abs() < 1e-12);
        prop_assert!((wasserstein1(&m1, &m2, "x").unwrap() - w1_oracle(&a, &b)).abs() < 1e-9);
    }

    #[test]
    fn metric_axioms((a, ca) in sample(), (b, cb) in sample(), (c, cc) in sample()) {
        let (m1, m2, m3) = (measure(&a, &ca), measure(&b, &cb), measure(&c, &cc));
        for (metric, f) in [(Metric::Ks, "x"), (Metric::W1, "x"), (Metric::Tv, "c")] {
            let d12 = metric.distance(&m1, &m2, f).unwrap();
            let d21 = metric.distance(&m2, &m1, f).unwrap();
            let d13 = metric.distance(&m1, &m3, f).unwrap();
            let d32 = metric.distance(&m3, &m2, f).unwrap();
            prop_assert!((d12 - d21).abs() < 1e-12);
            prop_assert!(d12 <= d13 + d32 + 1e-9);
            prop_assert!(metric.distance(&m1, &m1, f).unwrap().abs() < 1e-12);
            prop_assert!(d12 >= 0.0);
        }
    }

    #[test]
    fn relabelling_atoms_changes_nothing((a, ca) in sample(), (b, cb) in sample(), rot in 0usize..40) {
        let (m1, m2) = (measure(&a, &ca), measure(&b, &cb));
        let k = rot % a.len();
        let mut ar = a.clone();
        let mut car = ca.clone();
        ar.rotate_left(k);
        car.rotate_left(k);
        ar.reverse();
        car.reverse();
        let m1r = measure(&ar, &car);
        for (metric, f) in [(Metric::Ks, "x"), (Metric::W1, "x"), (Metric::Tv, "c")] {
            prop_assert_eq!(metric.distance(&m1, &m2, f).unwrap(), metric.distance(&m1r, &m2, f).unwrap());
        }
    }

    #[test]
    fn csv_round_trip((a, ca) in sample()) {
        let m = measure(&a, &ca).with_meta(Metadata { run_id: "t".into(), seed: Some(4), n_index: Some(2) });
        let text = m.to_csv();
        let back = EmpiricalMeasure::from_csv(&text, &m.sidecar()).unwrap();
        prop_assert_eq!(back, m);
    }
}

#[test]
fn mismatched_sidecar_is_rejected() {
    let m = measure(&[1.0, 2.0], &[0, 1]);
    let mut side = m.sidecar();
    side.schema.real[0] = "y".into();
    assert!(EmpiricalMeasure::from_csv(&m.to_csv(), &side).is_err());
    let mut side = m.sidecar();
    side.atoms = 3;
    assert!(EmpiricalMeasure::from_csv(&m.to_csv(), &side).is_err());
}

#[test]
fn trend_verdicts() {
    let reference = measure(&(0..200).map(|i| i as f64 / 200.0).collect::<Vec<_>>(), &[0; 200]);
    let seq: Vec<EmpiricalMeasure> = [0.5, 0.25, 0.1, 0.02]
        .iter()
        .map(|&shift| measure(&(0..200).map(|i| i as f64 / 200.0 + shift).collect::<Vec<_>>(), &[0; 200]))
        .collect();
    let opts = TrendOptions { bootstrap_reps: 10, seed: 1, noise_band: None };
    let r = trend_report(&seq, &reference, &[FeatureMetric::new("x", Metric::W1)], &opts).unwrap();
    let d = &r.features[0].distances;
    assert!(d.windows(2).all(|w| w[1] < w[0]));
    assert!((d[0] - 0.5).abs() < 1e-9);
    assert!(r.features[0].verdict.passes());
    let again = trend_report(&seq, &reference, &[FeatureMetric::new("x", Metric::W1)], &opts).unwrap();
    assert_eq!(r, again);
    assert_eq!(classify(&[0.3, 0.2, 0.25, 0.1], 0.01).1, Verdict::NotDecreasing);
    assert_eq!(classify(&[0.3, 0.2, 0.205, 0.1], 0.01).1, Verdict::NonincreasingWithinNoise);
}
