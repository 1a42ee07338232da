use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use orbitlab::padic::*;
use orbitlab::Rational;
use proptest::prelude::*;

fn pw(p: u64, e: u32) -> BigInt {
    num_traits::pow(BigInt::from(p), e as usize)
}

fn val(x: &BigInt, p: u64) -> u32 {
    let mut v = 0;
    let mut x = x.clone();
    let pb = BigInt::from(p);
    while !x.is_zero() && x.is_multiple_of(&pb) {
        x /= &pb;
        v += 1;
    }
    v
}

/// Rational with p-integral value reduced mod p^n.
fn reduce(r: &Rational, p: u64, n: u32) -> u128 {
    let m = pw(p, n);
    assert!(!r.denom().is_multiple_of(&BigInt::from(p)), "not p-integral");
    let (num, den) = (r.numer().mod_floor(&m), r.denom().mod_floor(&m));
    let ext = den.extended_gcd(&m);
    (num * ext.x).mod_floor(&m).to_u128().unwrap()
}

/// `sum x^m / m!` over exact rationals, stopping once every further term
/// has valuation at least `n`.
fn exp_oracle(x: &BigInt, p: u64, n: u32) -> u128 {
    if x.is_zero() {
        return 1;
    }
    let a = val(x, p) as f64;
    let last = ((n as f64 + 2.0) / (a - 1.0 / (p as f64 - 1.0))).ceil() as u64 + 2;
    let mut sum = Rational::zero();
    let mut term = Rational::one();
    for m in 0..=last {
        if m > 0 {
            term = term * Rational::from_integer(x.clone()) / Rational::from_integer(m.into());
        }
        sum += &term;
    }
    reduce(&sum, p, n)
}

/// `sum (-1)^(m+1) y^m / m`.
fn log_oracle(y: &BigInt, p: u64, n: u32) -> u128 {
    if y.is_zero() {
        return 0;
    }
    let b = val(y, p) as f64;
    let mut sum = Rational::zero();
    let mut pow = Rational::one();
    let mut m = 1u64;
    loop {
        pow *= Rational::from_integer(y.clone());
        let t = &pow / Rational::from_integer(m.into());
        if m % 2 == 1 {
            sum += t;
        } else {
            sum -= t;
        }
        if m as f64 * b - (m as f64).log(p as f64) > n as f64 + 2.0 {
            break;
        }
        m += 1;
    }
    reduce(&sum, p, n)
}

fn prime() -> impl Strategy<Value = u64> {
    prop::sample::select(vec![2u64, 3, 5, 7, 11])
}

#[test]
fn exp_matches_series_oracle_at_five() {
    let x = PadicInt::new(5, 4, 5).unwrap();
    assert_eq!(padic_exp(&x).unwrap().value(), exp_oracle(&BigInt::from(5), 5, 4));
    let e = padic_exp(&PadicInt::new(5, 6, 5).unwrap()).unwrap();
    assert_eq!(e.sub(&e.one_like()).abs(), PadicAbs::Exact(1));
}

#[test]
fn log_of_one_and_homomorphism() {
    assert!(padic_log(&PadicInt::new(7, 5, 1).unwrap()).unwrap().is_zero());
    let l4 = padic_log(&PadicInt::new(3, 10, 4).unwrap()).unwrap();
    let l16 = padic_log(&PadicInt::new(3, 10, 16).unwrap()).unwrap();
    assert_eq!(l4.add(&l4), l16);
}

#[test]
fn log_exp_roundtrip_hundred_inputs() {
    let mut s = 12345u64;
    for _ in 0..100 {
        s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
        let y = PadicInt::new(5, 8, 5 * ((s >> 20) % 78125) as i128).unwrap();
        let back = padic_log(&padic_exp(&y).unwrap()).unwrap();
        assert_eq!(back.truncate(6), y.truncate(6));
        assert_eq!(back, y);
    }
}

#[test]
fn eval_matches_direct_series() {
    // f(s) = 3 s e^{5s} - (2/5) e^{10 s} + (2/5) e^{5s}, p = 5
    let spec = GoodFunctionSpec {
        p: 5,
        precision: 6,
        terms: vec![
            TermSpec { c_num: 3, c_den_valuation: 0, i: 1, l: 1 },
            TermSpec { c_num: -2, c_den_valuation: 1, i: 2, l: 0 },
            TermSpec { c_num: 2, c_den_valuation: 1, i: 1, l: 0 },
        ],
        lambdas: vec![LambdaSpec { unit: 1, valuation: 1 }, LambdaSpec { unit: 2, valuation: 1 }],
    };
    for s in 0..50i64 {
        let s_big = BigInt::from(s * 37 + 11);
        let v = eval_good_function(&spec, &PadicInt::new(5, 6, (s * 37 + 11) as i128).unwrap()).unwrap();
        // oracle on F = 5 f at full precision
        let m = pw(5, 6);
        let e1 = BigInt::from(exp_oracle(&(BigInt::from(5) * &s_big), 5, 6));
        let e2 = BigInt::from(exp_oracle(&(BigInt::from(10) * &s_big), 5, 6));
        let f = (BigInt::from(15) * &s_big * &e1 - BigInt::from(2) * e2 + BigInt::from(2) * &e1).mod_floor(&m);
        assert_eq!(BigInt::from(v.scaled.value()), f);
        assert_eq!(v.shift, 1);
    }
}

#[test]
fn exp_of_p_times_unit_has_norm_one_over_p() {
    // f(s) = exp(p s) - 1 at s = 1
    for p in [3u64, 5, 7] {
        let spec = GoodFunctionSpec {
            p,
            precision: 5,
            terms: vec![TermSpec { c_num: 1, c_den_valuation: 0, i: 1, l: 0 }, TermSpec { c_num: -1, c_den_valuation: 0, i: 2, l: 0 }],
            lambdas: vec![LambdaSpec { unit: 1, valuation: 1 }, LambdaSpec { unit: 0, valuation: 1 }],
        };
        let v = eval_good_function(&spec, &PadicInt::new(p, 5, 1).unwrap()).unwrap();
        assert_eq!(v.abs().unwrap(), Rational::new(1.into(), p.into()));
    }
}

#[test]
fn vanishing_value_is_below_resolution() {
    let spec = GoodFunctionSpec::monomial(5, 4, 1);
    let v = eval_good_function(&spec, &PadicInt::new(5, 4, 0).unwrap()).unwrap();
    assert!(matches!(v.abs(), Err(orbitlab::Error::PrecisionBelowResolution { .. })));
    assert_eq!(v.abs_bound(), Rational::new(1.into(), 625.into()));
}

#[test]
fn checks_do_not_depend_on_worker_count() {
    let spec = GoodFunctionSpec {
        p: 3,
        precision: 6,
        terms: vec![TermSpec { c_num: 1, c_den_valuation: 0, i: 1, l: 1 }, TermSpec { c_num: 4, c_den_valuation: 0, i: 2, l: 1 }],
        lambdas: vec![LambdaSpec { unit: 1, valuation: 1 }, LambdaSpec { unit: 2, valuation: 2 }],
    };
    let run = |threads| {
        rayon::ThreadPoolBuilder::new().num_threads(threads).build().unwrap().install(|| {
            let balls = default_balls(&spec);
            let a = check_good(&spec, &Rational::one(), &Rational::new(1.into(), 2.into()), &balls, &EpsGrid::Auto).unwrap();
            let b = weak_ivt_check(&spec, 3, None).unwrap();
            (serde_json::to_string(&a).unwrap(), serde_json::to_string(&b).unwrap())
        })
    };
    assert_eq!(run(1), run(4));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(2000))]

    #[test]
    fn ultrametric(p in prime(), a in any::<i64>(), b in any::<i64>()) {
        let x = PadicInt::new(p, 12, a as i128).unwrap();
        let y = PadicInt::new(p, 12, b as i128).unwrap();
        if let (Some(vx), Some(vy), Some(vs)) = (x.valuation(), y.valuation(), x.add(&y).valuation()) {
            prop_assert!(vs >= vx.min(vy));
            if vx != vy {
                prop_assert_eq!(vs, vx.min(vy));
            }
        }
        if let (Some(vx), Some(vy)) = (x.valuation(), y.valuation()) {
            if vx + vy < 12 {
                prop_assert_eq!(x.mul(&y).valuation(), Some(vx + vy));
            }
        }
    }

    #[test]
    fn exp_isometry_and_oracle(p in prime(), u in any::<u32>(), extra in 0u32..3, n in 3u32..9) {
        let a = exp_domain(p) + extra;
        let raw = BigInt::from(u) * pw(p, a);
        let x = PadicInt::new(p, n, raw.to_i128().unwrap()).unwrap();
        let e = padic_exp(&x).unwrap();
        prop_assert_eq!(e.value(), exp_oracle(&raw, p, n));
        if let Some(v) = x.valuation() {
            prop_assert_eq!(e.sub(&e.one_like()).valuation(), Some(v));
        }
    }

    #[test]
    fn log_matches_oracle_and_inverts_exp(p in prime(), u in any::<u32>(), n in 3u32..9) {
        let raw = BigInt::from(u) * pw(p, exp_domain(p));
        let y = PadicInt::new(p, n, raw.to_i128().unwrap()).unwrap();
        let x = padic_exp(&y).unwrap();
        let l = padic_log(&x).unwrap();
        prop_assert_eq!(l, y);
        let z = BigInt::from(x.value()) - 1;
        prop_assert_eq!(l.value(), log_oracle(&z, p, n));
    }

}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn sublevel_monotone_in_eps(k1 in 0i64..8, k2 in 0i64..8, c in 1i64..20) {
        let spec = GoodFunctionSpec {
            p: 3, precision: 6,
            terms: vec![TermSpec { c_num: c, c_den_valuation: 0, i: 1, l: 1 }, TermSpec { c_num: 1, c_den_valuation: 0, i: 2, l: 2 }],
            lambdas: vec![LambdaSpec { unit: 1, valuation: 1 }, LambdaSpec { unit: 1, valuation: 2 }, LambdaSpec { unit: 0, valuation: 1 }],
        };
        let (lo, hi) = (k1.min(k2), k1.max(k2));
        let e_small = Rational::new(1.into(), num_traits::pow(BigInt::from(3), hi as usize)) * Rational::new(5.into(), 4.into());
        let e_big = Rational::new(1.into(), num_traits::pow(BigInt::from(3), lo as usize)) * Rational::new(5.into(), 4.into());
        let a = sublevel_measure(&spec, Ball::whole(), &e_small);
        let b = sublevel_measure(&spec, Ball::whole(), &e_big);
        if let (Ok(a), Ok(b)) = (a, b) {
            prop_assert!(a.measure <= b.measure);
            prop_assert!(a.measure >= Rational::zero() && b.measure <= Rational::one());
        }
        let ivt = weak_ivt_check(&spec, 2, None).unwrap();
        for l in &ivt.levels {
            prop_assert!(l.next_sup_valuation >= l.sup_valuation);
        }
    }
}

#[test]
fn value_at_zero_is_exact() {
    let spec = GoodFunctionSpec {
        p: 5,
        precision: 4,
        terms: vec![TermSpec { c_num: 1, c_den_valuation: 2, i: 1, l: 0 }, TermSpec { c_num: -1, c_den_valuation: 2, i: 2, l: 0 }],
        lambdas: vec![LambdaSpec { unit: 1, valuation: 1 }, LambdaSpec { unit: 2, valuation: 1 }],
    };
    assert!(spec.value_at_zero().is_zero());
    assert!(PadicFunction::vanishes_at_zero(&spec).unwrap());
    assert!(spec.value_at_zero().abs() < Rational::one());
}
