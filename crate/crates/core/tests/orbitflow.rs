use orbitlab::lattice::{covolume, observables};
use orbitlab::numfield::{make_field, quadratic_field};
use orbitlab::orbitflow::*;
use orbitlab::Norm;
use proptest::prelude::*;

fn mean(xs: impl Iterator<Item = f64>) -> f64 {
    let v: Vec<f64> = xs.collect();
    v.iter().sum::<f64>() / v.len() as f64
}

fn sqrt2_orbit() -> orbitlab::OrbitMatrix {
    let f = quadratic_field(2).unwrap();
    orbit_for(&[f.int(1), f.generator()]).unwrap()
}

#[test]
fn haar_reference_has_siegel_mean() {
    // mean number of nonzero points in a set of area A is A
    let obs = haar_reference_d2(100_000, 1e-4, 1, &[1.0], Norm::Euclidean).unwrap();
    let count = mean(obs.iter().map(|o| o.counts[0] as f64));
    assert!((count / std::f64::consts::PI - 1.0).abs() < 0.03, "{count}");

    // a second height gives the same lambda_1 distribution up to sampling noise
    let other = haar_reference_d2(100_000, 1e-5, 2, &[1.0], Norm::Euclidean).unwrap();
    let (a, b) = (mean(obs.iter().map(|o| o.lambda[0])), mean(other.iter().map(|o| o.lambda[0])));
    assert!((a - b).abs() < 0.01 * a, "{a} {b}");
}

#[test]
fn box_average_approaches_period_average() {
    let g = sqrt2_orbit();
    let f = quadratic_field(2).unwrap();
    let radii = [1.0];
    let exact = exact_period_average(&[f.int(1), f.generator()], &radii, 10_000, Norm::Euclidean).unwrap();
    let box_err = |t_max: f64| {
        let plan = OrbitSamplePlan { t_max, samples: 20_000, seed: 7, radii: radii.to_vec(), ..Default::default() };
        let s = sample_orbit(&g, &plan).unwrap();
        (mean(s.iter().map(|x| x.obs.lambda[0])) - exact[0]).abs()
    };
    let (short, long) = (box_err(10.0), box_err(40.0));
    assert!(long <= short, "{long} > {short}");
    assert!(long < 0.02 * exact[0]);
}

#[test]
fn sampling_ignores_worker_count() {
    let f = make_field(&[-1, -2, 1, 1]).unwrap();
    let g = f.generator();
    let orbit = orbit_for(&[f.int(1), g.clone(), &g * &g]).unwrap();
    let plan = OrbitSamplePlan { samples: 500, seed: 11, ..Default::default() };
    let run = |threads| rayon::ThreadPoolBuilder::new().num_threads(threads).build().unwrap().install(|| sample_orbit(&orbit, &plan).unwrap());
    let (one, four) = (run(1), run(4));
    assert_eq!(one.len(), 500);
    for (a, b) in one.iter().zip(&four) {
        assert_eq!(a.index, b.index);
        assert_eq!(a.t, b.t);
        assert_eq!(a.obs, b.obs);
    }
}

#[test]
fn diagonal_parameter_needs_zero_sum() {
    assert!(DiagonalParameter::new(vec![1.0, -0.5, -0.5]).is_ok());
    assert!(DiagonalParameter::new(vec![1.0, 0.5]).is_err());
    assert!(DiagonalParameter::new(vec![f64::NAN, 0.0]).is_err());
    assert_eq!(DiagonalParameter::from_free(&[0.25, 1.0]).t(), &[0.25, 1.0, -1.25]);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn flow_preserves_covolume(t1 in -6.0f64..6.0, t2 in -6.0f64..6.0) {
        let f = make_field(&[-1, -2, 1, 1]).unwrap();
        let g = f.generator();
        let orbit = orbit_for(&[f.int(1), g.clone(), &g * &g]).unwrap();
        let lat = apply_flow(&orbit, &DiagonalParameter::from_free(&[t1, t2])).unwrap();
        prop_assert!((covolume(&lat) - 1.0).abs() < 1e-9);
    }

    #[test]
    fn flow_is_periodic_in_dimension_two(t in -5.0f64..5.0, shift in -3i32..4) {
        let g = sqrt2_orbit();
        let period = orbit_period(&g).unwrap().unwrap();
        prop_assert!((period - 2.0 * (1.0 + 2f64.sqrt()).ln()).abs() < 1e-12);
        let radii = [0.8, 1.0, 1.5];
        let a = apply_flow(&g, &DiagonalParameter::from_free(&[t])).unwrap();
        let b = apply_flow(&g, &DiagonalParameter::from_free(&[t + shift as f64 * period])).unwrap();
        let (oa, ob) = (observables(&a, &radii, Norm::Euclidean).unwrap(), observables(&b, &radii, Norm::Euclidean).unwrap());
        prop_assert!((oa.lambda[0] - ob.lambda[0]).abs() < 1e-9);
    }

    #[test]
    fn flow_composes(t in -4.0f64..4.0, u in -4.0f64..4.0) {
        let g = sqrt2_orbit();
        let direct = apply_flow(&g, &DiagonalParameter::from_free(&[t + u])).unwrap();
        let split = DiagonalParameter::from_free(&[t]).add(&DiagonalParameter::from_free(&[u]));
        let composed = apply_flow(&g, &split).unwrap();
        let (a, b) = (observables(&direct, &[1.0], Norm::Sup).unwrap(), observables(&composed, &[1.0], Norm::Sup).unwrap());
        prop_assert!((a.lambda[0] - b.lambda[0]).abs() < 1e-9);
    }
}
