use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use orbitlab::lattice::{count_points_in_ball, covolume, hnf_int, lll_big, lll_rational, lll_reduce, mat_mul, DEFAULT_DELTA};
use orbitlab::linalg::det;
use orbitlab::{ExactLattice, Norm, Rational};
use proptest::prelude::*;

fn big(m: &[Vec<i64>]) -> Vec<Vec<BigInt>> {
    m.iter().map(|r| r.iter().map(|&x| BigInt::from(x)).collect()).collect()
}

fn rat(m: &[Vec<BigInt>]) -> Vec<Vec<Rational>> {
    m.iter().map(|r| r.iter().map(|x| Rational::from_integer(x.clone())).collect()).collect()
}

fn dot(a: &[Rational], b: &[Rational]) -> Rational {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Size reduction and the Lovasz condition checked with exact Gram-Schmidt.
fn assert_lll_reduced(rows: &[Vec<BigInt>], delta: f64) {
    let b = rat(rows);
    let k = b.len();
    let mut star: Vec<Vec<Rational>> = Vec::new();
    let mut mu = vec![vec![Rational::zero(); k]; k];
    for i in 0..k {
        let mut v = b[i].clone();
        for j in 0..i {
            mu[i][j] = dot(&b[i], &star[j]) / dot(&star[j], &star[j]);
            for (c, s) in v.iter_mut().zip(&star[j]) {
                *c -= &mu[i][j] * s;
            }
        }
        star.push(v);
    }
    let half = Rational::new(1.into(), 2.into());
    let delta = Rational::from_float(delta).unwrap();
    for i in 1..k {
        for j in 0..i {
            assert!(mu[i][j].abs() <= half, "not size reduced at ({i}, {j})");
        }
        let lhs = dot(&star[i], &star[i]);
        let rhs = (&delta - &mu[i][i - 1] * &mu[i][i - 1]) * dot(&star[i - 1], &star[i - 1]);
        assert!(lhs >= rhs, "Lovasz condition fails at {i}");
    }
}

fn matrix(k: usize) -> impl Strategy<Value = Vec<Vec<i64>>> {
    prop::collection::vec(prop::collection::vec(-1000i64..1000, k), k).prop_filter("singular", |m| !det(&rat(&big(m))).is_zero())
}

/// Product of elementary row operations.
fn unimodular(k: usize, ops: &[(usize, usize, i64)]) -> Vec<Vec<BigInt>> {
    let mut u: Vec<Vec<BigInt>> = (0..k).map(|i| (0..k).map(|j| BigInt::from((i == j) as i64)).collect()).collect();
    for &(a, b, c) in ops {
        let (a, b) = (a % k, b % k);
        if a == b {
            u.swap(a, (a + 1) % k);
            continue;
        }
        let row = u[b].clone();
        for (x, y) in u[a].iter_mut().zip(&row) {
            *x += y * c;
        }
    }
    u
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn float_lll_agrees_with_rational_oracle(m in (2usize..6).prop_flat_map(matrix)) {
        let rows = big(&m);
        let fast = lll_big(rows.clone(), DEFAULT_DELTA);
        let exact = lll_rational(rows.clone(), DEFAULT_DELTA);
        assert_lll_reduced(&fast.rows, DEFAULT_DELTA);
        assert_lll_reduced(&exact.rows, DEFAULT_DELTA);
        prop_assert_eq!(mat_mul(&fast.transform, &rows), fast.rows.clone());
        prop_assert!(det(&rat(&fast.transform)).abs().is_one());
        prop_assert_eq!(hnf_int(&fast.rows), hnf_int(&exact.rows));
        prop_assert_eq!(hnf_int(&fast.rows), hnf_int(&rows));
    }

    #[test]
    fn covolume_is_invariant(m in (2usize..5).prop_flat_map(matrix), ops in prop::collection::vec((0usize..5, 0usize..5, -5i64..6), 0..12)) {
        let b = ExactLattice::new(rat(&big(&m))).unwrap();
        let u = unimodular(b.dim(), &ops);
        let t = b.transformed(&u);
        prop_assert_eq!(t.det_exact().abs(), b.det_exact().abs());
        let (red, _) = lll_reduce(&t, DEFAULT_DELTA);
        prop_assert_eq!(red.det_exact().abs(), b.det_exact().abs());
        prop_assert_eq!(covolume(&red), covolume(&b));
    }

    #[test]
    fn ball_counts_match_brute_force(m in prop::collection::vec(prop::collection::vec(-3i64..4, 2), 2)
        .prop_filter("singular", |m| m[0][0] * m[1][1] != m[0][1] * m[1][0]), r in 0.5f64..6.0, sup in any::<bool>()) {
        let norm = if sup { Norm::Sup } else { Norm::Euclidean };
        let rows: Vec<Vec<f64>> = m.iter().map(|r| r.iter().map(|&x| x as f64).collect()).collect();
        let b = orbitlab::Lattice::new(rows).unwrap().assume_exact();
        let got = count_points_in_ball(&b, r, norm).unwrap();
        // points of Z^2 B lie among integer vectors; test membership exactly
        let d = m[0][0] * m[1][1] - m[0][1] * m[1][0];
        let mut want = 0;
        let reach = 8;
        for x in -reach..=reach {
            for y in -reach..=reach {
                if (x, y) == (0, 0) {
                    continue;
                }
                // v = (x, y) is in the lattice iff v B^-1 is integral
                let a = x * m[1][1] - y * m[1][0];
                let c = -x * m[0][1] + y * m[0][0];
                if a % d != 0 || c % d != 0 {
                    continue;
                }
                let len = norm.of(&[x as f64, y as f64]);
                if len <= r {
                    want += 1;
                }
            }
        }
        prop_assert_eq!(got, want);
    }
}

#[test]
fn knapsack_style_lattice_reduces() {
    let rows = big(&[vec![1, 0, 0, 1_000_003], vec![0, 1, 0, 2_000_011], vec![0, 0, 1, 3_000_017], vec![0, 0, 0, 5_000_021]]);
    let fast = lll_big(rows.clone(), DEFAULT_DELTA);
    assert_lll_reduced(&fast.rows, DEFAULT_DELTA);
    assert_eq!(hnf_int(&fast.rows), hnf_int(&rows));
    assert_eq!(det(&rat(&fast.rows)).abs(), Rational::from_integer(5_000_021.into()));
}
