use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::scalar::{Rational, Scalar};

use super::LatticeBasis;

/// Row-style Hermite normal form of the lattice generated by integer rows:
/// upper triangular, positive pivots, entries above each pivot reduced into
/// `[0, pivot)`. Zero rows are dropped.
pub fn hnf_int(rows: &[Vec<BigInt>]) -> Vec<Vec<BigInt>> {
    let mut a: Vec<Vec<BigInt>> = rows.iter().filter(|r| r.iter().any(|x| !x.is_zero())).cloned().collect();
    let cols = rows.first().map_or(0, |r| r.len());
    let mut pivot_row = 0;
    let mut pivots = Vec::new();
    for c in 0..cols {
        if pivot_row == a.len() {
            break;
        }
        // gcd-combine every row below into the pivot row
        for r in pivot_row + 1..a.len() {
            if a[r][c].is_zero() {
                continue;
            }
            let (x, y) = (a[pivot_row][c].clone(), a[r][c].clone());
            let e = x.extended_gcd(&y);
            let (g, s, t) = (e.gcd, e.x, e.y);
            let (xg, yg) = (&x / &g, &y / &g);
            let (top, bot) = (a[pivot_row].clone(), a[r].clone());
            a[pivot_row] = top.iter().zip(&bot).map(|(u, v)| &s * u + &t * v).collect();
            a[r] = top.iter().zip(&bot).map(|(u, v)| &xg * v - &yg * u).collect();
        }
        if a[pivot_row][c].is_zero() {
            continue;
        }
        if a[pivot_row][c].is_negative() {
            a[pivot_row].iter_mut().for_each(|v| *v = -v.clone());
        }
        let p = a[pivot_row][c].clone();
        for r in 0..pivot_row {
            let q = a[r][c].div_floor(&p);
            if !q.is_zero() {
                let pr = a[pivot_row].clone();
                for (v, w) in a[r].iter_mut().zip(&pr) {
                    *v -= &q * w;
                }
            }
        }
        pivots.push(c);
        pivot_row += 1;
    }
    a.truncate(pivot_row);
    a
}

/// HNF of a rational generating set: `(hnf of L * rows) / L` with `L` the
/// common denominator, entries as rationals.
pub fn hnf_rational(rows: &[Vec<Rational>]) -> Vec<Vec<Rational>> {
    let l = rows.iter().flatten().fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
    let lq = Rational::from_integer(l.clone());
    let ints: Vec<Vec<BigInt>> = rows.iter().map(|r| r.iter().map(|x| (x * &lq).to_integer()).collect()).collect();
    hnf_int(&ints).into_iter().map(|r| r.into_iter().map(|x| Rational::new(x, l.clone())).collect()).collect()
}

/// Equality of the lattices generated by two rational generating sets.
pub fn hnf_equal_generators(a: &[Vec<Rational>], b: &[Vec<Rational>]) -> bool {
    hnf_rational(a) == hnf_rational(b)
}

/// Equality of the lattices spanned by two exact bases.
pub fn hnf_equal<T: Scalar>(a: &LatticeBasis<T>, b: &LatticeBasis<T>) -> Result<bool> {
    if !a.is_exact() || !b.is_exact() {
        return Err(Error::NotExact);
    }
    Ok(hnf_equal_generators(&a.to_rational_rows(), &b.to_rational_rows()))
}
