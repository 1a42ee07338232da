//! Small dense exact linear algebra over Q.

use num_traits::{One, Zero};

use crate::scalar::Rational;

pub type RatMatrix = Vec<Vec<Rational>>;

/// Row-echelon form by fraction-field Gaussian elimination; returns (rank, sign of permutation, pivots product).
fn eliminate(m: &mut RatMatrix) -> (usize, bool, Rational) {
    let rows = m.len();
    let cols = if rows == 0 { 0 } else { m[0].len() };
    let mut rank = 0;
    let mut odd = false;
    let mut prod = Rational::one();
    for c in 0..cols {
        if rank == rows {
            break;
        }
        let Some(p) = (rank..rows).find(|&r| !m[r][c].is_zero()) else {
            prod = Rational::zero();
            continue;
        };
        if p != rank {
            m.swap(p, rank);
            odd = !odd;
        }
        let piv = m[rank][c].clone();
        prod *= &piv;
        for r in rank + 1..rows {
            if m[r][c].is_zero() {
                continue;
            }
            let f = &m[r][c] / &piv;
            for cc in c..cols {
                let v = &f * &m[rank][cc];
                m[r][cc] -= v;
            }
        }
        rank += 1;
    }
    (rank, odd, prod)
}

pub fn det(m: &RatMatrix) -> Rational {
    let n = m.len();
    assert!(m.iter().all(|r| r.len() == n), "det of non-square matrix");
    if n == 0 {
        return Rational::one();
    }
    let mut a = m.clone();
    let (rank, odd, prod) = eliminate(&mut a);
    if rank < n {
        return Rational::zero();
    }
    if odd {
        -prod
    } else {
        prod
    }
}

pub fn rank(m: &RatMatrix) -> usize {
    let mut a = m.clone();
    eliminate(&mut a).0
}

/// Solve `a x = b` for square nonsingular `a`.
pub fn solve(a: &RatMatrix, b: &[Rational]) -> Option<Vec<Rational>> {
    let n = a.len();
    let mut m: RatMatrix = a.iter().zip(b).map(|(row, bi)| {
        let mut r = row.clone();
        r.push(bi.clone());
        r
    }).collect();
    for c in 0..n {
        let p = (c..n).find(|&r| !m[r][c].is_zero())?;
        m.swap(p, c);
        let piv = m[c][c].clone();
        for cc in c..=n {
            m[c][cc] = &m[c][cc] / &piv;
        }
        for r in 0..n {
            if r != c && !m[r][c].is_zero() {
                let f = m[r][c].clone();
                for cc in c..=n {
                    let v = &f * &m[c][cc];
                    m[r][cc] -= v;
                }
            }
        }
    }
    Some(m.into_iter().map(|r| r[n].clone()).collect())
}
