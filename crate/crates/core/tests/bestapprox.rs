use std::cmp::Ordering;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, ToPrimitive};
use orbitlab::bestapprox::{best_approximations, best_approximations_with, build_target_from_field, residues, BestApproxRecord, Limit, Strategy as Search, TargetVector};
use orbitlab::lattice::hnf_equal;
use orbitlab::numfield::{make_field, quadratic_field};
use orbitlab::rng::sample_rng;
use orbitlab::{ExactLattice, Norm, Rational};
use proptest::prelude::*;

/// Convergent denominators of `(P + sqrt(d)) / Q` by the integer
/// continued-fraction recurrence for quadratic surds; needs `Q | d - P^2`.
fn convergent_denominators(d: i64, mut p: i64, mut q: i64, max_q: i64) -> Vec<i64> {
    let root = (d as f64).sqrt().floor() as i64;
    let (mut h_prev, mut h) = (0i64, 1i64);
    let mut out = Vec::new();
    let mut first = true;
    loop {
        let a = Integer::div_floor(&(p + root), &q);
        if !first {
            let next = a * h + h_prev;
            h_prev = h;
            h = next;
        }
        first = false;
        if h > max_q {
            break;
        }
        if out.last() != Some(&h) {
            out.push(h);
        }
        p = a * q - p;
        q = (d - p * p) / q;
    }
    out
}

/// `||q x||` records by exhaustive scan in f64, with every comparison
/// separated by far more than the rounding error.
fn brute_force(x: f64, max_q: i64) -> Vec<i64> {
    let mut best = f64::INFINITY;
    let mut out = Vec::new();
    for q in 1..=max_q {
        let y = q as f64 * x;
        let e = (y - y.round()).abs();
        assert!((e - best).abs() > 1e-9, "near tie at q = {q}");
        if e < best {
            best = e;
            out.push(q);
        }
    }
    out
}

#[test]
fn quadratic_targets_match_continued_fractions() {
    let phi = quadratic_field(5).unwrap();
    let s2 = quadratic_field(2).unwrap();
    let s3 = quadratic_field(3).unwrap();
    // (target, (a + sqrt d) / b, float value)
    let cases = [
        (&s2.generator() - &s2.int(1), (2, -1, 1), 2f64.sqrt() - 1.0),
        ((&phi.generator() - &phi.int(1)).scale(&Rational::new(1.into(), 2.into())), (5, -1, 2), (5f64.sqrt() - 1.0) / 2.0),
        (&s3.generator() - &s3.int(1), (3, -1, 1), 3f64.sqrt() - 1.0),
    ];
    for (x, (d, a, b), xf) in cases {
        let field = x.field().clone();
        for norm in [Norm::Sup, Norm::Euclidean] {
            let v = build_target_from_field(&field, std::slice::from_ref(&x), true, norm).unwrap();
            let recs = best_approximations(&v, &Limit::MaxQ(BigInt::from(10_000))).unwrap();
            let qs: Vec<i64> = recs.iter().map(|r| r.q.to_i64().unwrap()).collect();
            assert_eq!(qs, convergent_denominators(d, a, b, 10_000), "d = {d}");
            assert_eq!(qs, brute_force(xf, 10_000));
        }
    }
}

#[test]
fn golden_ratio_first_record() {
    let f = quadratic_field(5).unwrap();
    let x = (&f.generator() - &f.int(1)).scale(&Rational::new(1.into(), 2.into()));
    let v = build_target_from_field(&f, &[x], false, Norm::Sup).unwrap();
    let recs = best_approximations(&v, &Limit::MaxK(3)).unwrap();
    assert_eq!(recs[1].q, BigInt::from(2));
    assert_eq!(recs[1].p, vec![BigInt::one()]);
    // w = 2 (2 phi' - 1) with phi' = (sqrt 5 - 1)/2
    assert!((recs[1].w[0] - (2.0 * (5f64.sqrt() - 2.0))).abs() < 1e-12);
}

/// Exhaustive sup-norm scan for a two-dimensional float target.
fn brute_force_2d(x: [f64; 2], max_q: i64) -> Vec<i64> {
    let mut best = f64::INFINITY;
    let mut out = Vec::new();
    for q in 1..=max_q {
        let e = x.iter().map(|c| (q as f64 * c - (q as f64 * c).round()).abs()).fold(0.0, f64::max);
        assert!((e - best).abs() > 1e-9);
        if e < best {
            best = e;
            out.push(q);
        }
    }
    out
}

#[test]
fn cubic_target_matches_brute_force() {
    let f = make_field(&[-1, -2, 1, 1]).unwrap();
    let b = f.generator();
    let b2 = &b * &b;
    let v = build_target_from_field(&f, &[b.clone(), b2.clone()], true, Norm::Sup).unwrap();
    let recs = best_approximations(&v, &Limit::MaxQ(BigInt::from(20_000))).unwrap();
    let qs: Vec<i64> = recs.iter().map(|r| r.q.to_i64().unwrap()).collect();
    assert_eq!(qs, brute_force_2d([b.to_f64(), b2.to_f64()], 20_000));
}

fn check_invariants(recs: &[BestApproxRecord], dim: usize) {
    for r in recs {
        let mut g = r.q.clone();
        for p in &r.p {
            g = g.gcd(p);
        }
        assert!(g.is_one(), "record {} is not primitive", r.k);
        assert_eq!(r.lambda.covolume_exact(), Rational::one());
        if dim == 1 {
            let z = ExactLattice::new(vec![vec![Rational::one()]]).unwrap();
            assert!(hnf_equal(&r.lambda.exact_basis().unwrap(), &z).unwrap());
        }
    }
    for w in recs.windows(2) {
        assert!(w[0].q < w[1].q);
        assert_eq!(w[1].err.cmp_certified(&w[0].err), Some(Ordering::Less));
    }
}

#[test]
fn residue_examples() {
    let r = residues(&[BigInt::from(2)], &BigInt::from(5), &[3]);
    assert_eq!(r[&3], (vec![2], 2));
    let r = residues(&[BigInt::from(3), BigInt::from(4)], &BigInt::from(7), &[4]);
    assert_eq!(r[&4], (vec![3, 0], 3));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn generic_targets_satisfy_invariants(seed in any::<u64>(), dim in 1usize..4, sup in any::<bool>()) {
        let norm = if sup { Norm::Sup } else { Norm::Euclidean };
        let mut rng = sample_rng(seed, 0);
        let v = TargetVector::random_generic(dim, 512, norm, &mut rng);
        let recs = best_approximations(&v, &Limit::MaxK(60)).unwrap();
        check_invariants(&recs, dim);
        for r in &recs {
            for m in [2u64, 3, 5] {
                let (ps, q) = &residues(&r.p, &r.q, &[m])[&m];
                prop_assert!(*q != 0 || ps.iter().any(|x| *x != 0));
            }
        }
    }

    #[test]
    fn lattice_strategy_agrees_with_scan(seed in any::<u64>(), sup in any::<bool>()) {
        let norm = if sup { Norm::Sup } else { Norm::Euclidean };
        let mut rng = sample_rng(seed, 1);
        let v = TargetVector::random_generic(2, 256, norm, &mut rng);
        let a = best_approximations_with(&v, &Limit::MaxQ(BigInt::from(3000)), Search::Lattice).unwrap();
        let b = best_approximations_with(&v, &Limit::MaxQ(BigInt::from(3000)), Search::Scan).unwrap();
        let qa: Vec<_> = a.iter().map(|r| r.q.clone()).collect();
        let qb: Vec<_> = b.iter().map(|r| r.q.clone()).collect();
        prop_assert_eq!(qa, qb);
    }
}

#[test]
fn norms_agree_in_one_dimension() {
    let f = quadratic_field(7).unwrap();
    let g = f.generator();
    let a = best_approximations(&build_target_from_field(&f, std::slice::from_ref(&g), false, Norm::Sup).unwrap(), &Limit::MaxK(40)).unwrap();
    let b = best_approximations(&build_target_from_field(&f, &[g], false, Norm::Euclidean).unwrap(), &Limit::MaxK(40)).unwrap();
    assert_eq!(a.iter().map(|r| &r.q).collect::<Vec<_>>(), b.iter().map(|r| &r.q).collect::<Vec<_>>());
    check_invariants(&a, 1);
}

#[test]
fn w_alternates_in_sign_for_sqrt2() {
    let f = quadratic_field(2).unwrap();
    let v = build_target_from_field(&f, &[f.generator()], false, Norm::Sup).unwrap();
    let recs = best_approximations(&v, &Limit::MaxK(30)).unwrap();
    for w in recs.windows(2) {
        assert!(w[0].w[0] * w[1].w[0] < 0.0);
    }
}
