use std::sync::Arc;

use num_traits::{ToPrimitive, Zero};
use orbitlab::numfield::{make_field, orbit_det_squared, orbit_matrix, quadratic_field, rescale_basis};
use orbitlab::{AlgebraicNumber, Interval, Rational, TotallyRealField};
use proptest::prelude::*;

fn fields() -> Vec<Arc<TotallyRealField>> {
    vec![
        quadratic_field(2).unwrap(),
        quadratic_field(13).unwrap(),
        make_field(&[-1, -2, 1, 1]).unwrap(),
        make_field(&[1, -4, 0, 1]).unwrap(),
        make_field(&[1, 0, -4, 0, 1]).unwrap(),
    ]
}

fn element(field: &Arc<TotallyRealField>, c: &[i64]) -> AlgebraicNumber {
    let d = field.degree();
    AlgebraicNumber::from_ints(field, &c[..d])
}

fn overlaps(a: &Interval, b: &Interval) -> bool {
    a.lo() <= b.hi() && b.lo() <= a.hi()
}

fn product(xs: &[Interval], bits: u32) -> Interval {
    xs.iter().skip(1).fold(xs[0].clone(), |acc, x| acc.mul(x, bits))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(60))]

    #[test]
    fn embeddings_are_ring_maps(fi in 0usize..5, a in prop::collection::vec(-20i64..20, 4), b in prop::collection::vec(-20i64..20, 4)) {
        let f = &fields()[fi];
        let (x, y) = (element(f, &a), element(f, &b));
        let bits = 200;
        let (ex, ey) = (x.embed(bits).unwrap(), y.embed(bits).unwrap());
        let prod = (&x * &y).embed(bits).unwrap();
        let sum = (&x + &y).embed(bits).unwrap();
        for j in 0..f.degree() {
            prop_assert!(overlaps(&prod[j], &ex[j].mul(&ey[j], bits + 20)));
            prop_assert!(overlaps(&sum[j], &ex[j].add(&ey[j], bits + 20)));
            prop_assert!(prod[j].radius_le_pow2(bits as i64));
        }
    }

    #[test]
    fn norm_and_trace_agree_with_embeddings(fi in 0usize..5, a in prop::collection::vec(-20i64..20, 4)) {
        let f = &fields()[fi];
        let x = element(f, &a);
        let e = x.embed(300).unwrap();
        let norm = Interval::from_rational(&x.norm(), 320);
        prop_assert!(overlaps(&norm, &product(&e, 320)));
        let tr = e.iter().skip(1).fold(e[0].clone(), |acc, v| acc.add(v, 320));
        prop_assert!(overlaps(&Interval::from_rational(&x.trace(), 320), &tr));
        if !x.is_zero() {
            let inv = x.inverse().unwrap();
            prop_assert!((&x * &inv).rational_value() == Some(Rational::from_integer(1.into())));
        }
    }

    #[test]
    fn rescaling_multiplies_by_powers(m in prop::sample::select(vec![-3i64, 2, 5, 7]), e in prop::collection::vec(-3i64..4, 3)) {
        let f = make_field(&[-1, -2, 1, 1]).unwrap();
        let g = f.generator();
        let basis = vec![f.int(1), g.clone(), &g * &g];
        let scaled = rescale_basis(&basis, m, &e).unwrap();
        for ((a, b), &k) in basis.iter().zip(&scaled).zip(&e) {
            let ratio = (b * &a.inverse().unwrap()).rational_value().unwrap();
            let want = Rational::from_integer(m.into()).pow(k as i32);
            prop_assert_eq!(ratio, want);
        }
        // det^2 picks up m^(2 sum e)
        let s: i64 = e.iter().sum();
        let want = orbit_det_squared(&basis) * Rational::from_integer(m.into()).pow(2 * s as i32);
        prop_assert_eq!(orbit_det_squared(&scaled), want);
    }
}

#[test]
fn root_enclosures_nest() {
    for f in fields() {
        for j in 0..f.degree() {
            let coarse = f.root_enclosure(j, 64).unwrap();
            let fine = f.root_enclosure(j, 512).unwrap();
            assert!(fine.within(&coarse));
            assert!(fine.radius_le_pow2(512));
            assert!((fine.to_f64() - f.roots_f64()[j]).abs() < 1e-12);
        }
    }
}

#[test]
fn orbit_determinant_matches_exact_square() {
    for f in fields() {
        let g = f.generator();
        let basis: Vec<AlgebraicNumber> = (0..f.degree()).map(|i| g.pow(i as u64)).collect();
        let m = orbit_matrix(&basis, 256).unwrap();
        let det = m.det_enclosure();
        let sq = det.mul(&det, 300);
        let exact = orbit_det_squared(&basis);
        assert!(overlaps(&sq, &Interval::from_rational(&exact, 300)));
        // power basis: det^2 is the polynomial discriminant
        assert_eq!(exact, f.discriminant());
        assert!(exact.to_f64().unwrap() > 0.0);
    }
}

#[test]
fn embedded_zero_is_exact() {
    let f = quadratic_field(5).unwrap();
    let z = &f.generator() - &f.generator();
    assert!(z.is_zero());
    assert!(z.embed(64).unwrap().iter().all(|i| i.contains(&orbitlab::Dyadic::zero())));
    assert!(z.norm().is_zero());
}
