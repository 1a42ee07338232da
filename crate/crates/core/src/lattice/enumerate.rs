use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::{Rational, Scalar};

use super::{lll_reduce, LatticeBasis, Norm, DEFAULT_DELTA};

/// Largest dimension for certified enumeration.
pub const MAX_ENUM_DIM: usize = 6;

/// Cap on enumerated candidates before giving up.
const ENUM_CAP: usize = 50_000_000;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LatticeObservables {
    /// `lambda[0]` is certified; the rest are estimates from the reduced basis.
    pub lambda: Vec<f64>,
    pub counts: Vec<u64>,
    pub norm: Norm,
}

fn gso(rows: &[Vec<f64>]) -> (Vec<Vec<f64>>, Vec<f64>) {
    let k = rows.len();
    let mut star: Vec<Vec<f64>> = Vec::with_capacity(k);
    let mut norms = Vec::with_capacity(k);
    let mut mu = vec![vec![0.0; k]; k];
    for i in 0..k {
        let mut v = rows[i].clone();
        for j in 0..i {
            let d: f64 = rows[i].iter().zip(&star[j]).map(|(a, b)| a * b).sum();
            mu[i][j] = d / norms[j];
            for (c, s) in v.iter_mut().zip(&star[j]) {
                *c -= mu[i][j] * s;
            }
        }
        norms.push(v.iter().map(|x| x * x).sum::<f64>());
        star.push(v);
    }
    (mu, norms)
}

/// Visits every nonzero coefficient vector `x` with `|x B|_2^2 <= r2`
/// (up to floating slack; callers filter exactly). Returns false if the cap
/// was hit.
pub fn enumerate_short(rows: &[Vec<f64>], r2: f64, visit: &mut dyn FnMut(&[i64])) -> bool {
    let k = rows.len();
    let (mu, norms) = gso(rows);
    let bound = r2 * (1.0 + 1e-9) + 1e-300;
    let mut x = vec![0i64; k];
    let mut count = 0usize;
    fn rec(level: usize, partial: f64, x: &mut Vec<i64>, mu: &[Vec<f64>], norms: &[f64], bound: f64, count: &mut usize, visit: &mut dyn FnMut(&[i64])) -> bool {
        let k = x.len();
        let c: f64 = -(level + 1..k).map(|j| mu[j][level] * x[j] as f64).sum::<f64>();
        let rem = bound - partial;
        if rem < 0.0 {
            return true;
        }
        let w = (rem / norms[level]).sqrt();
        let lo = (c - w).ceil() as i64;
        let hi = (c + w).floor() as i64;
        for v in lo..=hi {
            x[level] = v;
            let d = v as f64 - c;
            let p = partial + d * d * norms[level];
            if p > bound {
                continue;
            }
            if level == 0 {
                if x.iter().any(|&t| t != 0) {
                    *count += 1;
                    if *count > ENUM_CAP {
                        return false;
                    }
                    visit(x);
                }
            } else if !rec(level - 1, p, x, mu, norms, bound, count, visit) {
                return false;
            }
        }
        x[level] = 0;
        true
    }
    rec(k - 1, 0.0, &mut x, &mu, &norms, bound, &mut count, visit)
}

fn combine_f64(rows: &[Vec<f64>], x: &[i64]) -> Vec<f64> {
    let k = rows[0].len();
    (0..k).map(|j| x.iter().zip(rows).map(|(&c, r)| c as f64 * r[j]).sum()).collect()
}

fn combine_exact<T: Scalar>(rows: &[Vec<T>], x: &[i64]) -> Vec<Rational> {
    let k = rows[0].len();
    (0..k).map(|j| x.iter().zip(rows).map(|(&c, r)| Rational::from_integer(c.into()) * r[j].to_rational()).sum()).collect()
}

fn reduced<T: Scalar>(b: &LatticeBasis<T>) -> LatticeBasis<T> {
    if b.is_reduced() {
        b.clone()
    } else {
        lll_reduce(b, DEFAULT_DELTA).0
    }
}

/// Shortest nonzero vector in the chosen norm, with its length.
pub fn shortest_vector<T: Scalar>(b: &LatticeBasis<T>, norm: Norm) -> Result<(Vec<T>, f64)> {
    let k = b.dim();
    if k > MAX_ENUM_DIM {
        return Err(Error::DimensionTooLarge(k));
    }
    let red = reduced(b);
    let rows = red.to_f64_rows();
    // first basis vector bounds the minimum in either norm
    let first = norm.of(&rows[0]);
    let r2 = match norm {
        Norm::Euclidean => first * first,
        Norm::Sup => first * first * k as f64,
    };
    let mut best: Option<(Vec<i64>, Rational, f64)> = None;
    let mut cands: Vec<(Vec<i64>, f64)> = Vec::new();
    let complete = enumerate_short(&rows, r2, &mut |x| {
        let v = combine_f64(&rows, x);
        cands.push((x.to_vec(), norm.of(&v)));
    });
    if !complete {
        return Err(Error::Precondition("enumeration cap reached".into()));
    }
    let fmin = cands.iter().map(|c| c.1).fold(f64::INFINITY, f64::min);
    for (x, f) in cands {
        if f > fmin * (1.0 + 1e-9) + 1e-300 {
            continue;
        }
        let e = norm.squared_exact(&combine_exact(red.rows(), &x));
        let better = match &best {
            None => true,
            Some((bx, be, _)) => e < *be || (e == *be && x < *bx),
        };
        if better {
            best = Some((x, e, f));
        }
    }
    let (x, _, len) = best.expect("lattice has nonzero vectors");
    let kdim = red.rows()[0].len();
    let v = (0..kdim).map(|j| x.iter().zip(red.rows()).fold(T::zero(), |acc, (&c, r)| acc + T::from_f64(c as f64) * r[j].clone())).collect();
    Ok((v, len))
}

/// Number of nonzero lattice vectors with norm at most `r` (closed ball).
pub fn count_points_in_ball<T: Scalar>(b: &LatticeBasis<T>, r: f64, norm: Norm) -> Result<u64> {
    let k = b.dim();
    if k > MAX_ENUM_DIM {
        return Err(Error::DimensionTooLarge(k));
    }
    if r <= 0.0 {
        return Ok(0);
    }
    let red = reduced(b);
    let rows = red.to_f64_rows();
    let r2 = match norm {
        Norm::Euclidean => r * r,
        Norm::Sup => r * r * k as f64,
    };
    let r_exact = Rational::from_float(r).expect("finite radius");
    let r2_exact = &r_exact * &r_exact;
    let radius = red.radius();
    let mut count = 0u64;
    let mut err: Option<Error> = None;
    let complete = enumerate_short(&rows, r2, &mut |x| {
        if err.is_some() {
            return;
        }
        let f = norm.of(&combine_f64(&rows, x));
        let l1: f64 = x.iter().map(|c| c.unsigned_abs() as f64).sum();
        let slack = radius * l1 * (k as f64).sqrt();
        if slack > 0.0 && (f - r).abs() <= slack {
            err = Some(Error::BoundaryUndecidable { radius: r });
            return;
        }
        if (f - r).abs() > 1e-9 * r {
            if f < r {
                count += 1;
            }
            return;
        }
        if norm.squared_exact(&combine_exact(red.rows(), x)) <= r2_exact {
            count += 1;
        }
    });
    if let Some(e) = err {
        return Err(e);
    }
    if !complete {
        return Err(Error::Precondition("enumeration cap reached".into()));
    }
    Ok(count)
}

/// Successive-minima estimates and ball counts for a radius grid.
pub fn observables<T: Scalar>(b: &LatticeBasis<T>, radii: &[f64], norm: Norm) -> Result<LatticeObservables> {
    let red = reduced(b);
    let (_, l1) = shortest_vector(&red, norm)?;
    let mut lens: Vec<f64> = red.to_f64_rows().iter().map(|r| norm.of(r)).collect();
    lens.sort_by(|a, b| a.total_cmp(b));
    let mut lambda = vec![l1];
    for (i, &l) in lens.iter().enumerate().skip(1) {
        lambda.push(l.max(lambda[i - 1]));
    }
    let counts = radii.iter().map(|&r| count_points_in_ball(&red, r, norm)).collect::<Result<Vec<_>>>()?;
    Ok(LatticeObservables { lambda, counts, norm })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn basis(rows: &[&[f64]]) -> LatticeBasis<f64> {
        LatticeBasis::new(rows.iter().map(|r| r.to_vec()).collect()).unwrap().assume_exact()
    }

    #[test]
    fn integer_lattice_counts() {
        let z2 = basis(&[&[1.0, 0.0], &[0.0, 1.0]]);
        assert_eq!(count_points_in_ball(&z2, 1.0, Norm::Euclidean).unwrap(), 4);
        assert_eq!(count_points_in_ball(&z2, 1.5, Norm::Euclidean).unwrap(), 8);
        assert_eq!(count_points_in_ball(&z2, 0.9, Norm::Euclidean).unwrap(), 0);
        assert_eq!(count_points_in_ball(&z2, 1.0, Norm::Sup).unwrap(), 8);
    }

    #[test]
    fn shortest_vectors() {
        let z3 = basis(&[&[1.0, 0.0, 0.0], &[0.0, 1.0, 0.0], &[0.0, 0.0, 1.0]]);
        assert_eq!(shortest_vector(&z3, Norm::Euclidean).unwrap().1, 1.0);
        let b = basis(&[&[2.0, 0.0], &[1.0, 1.0]]);
        let (v, l) = shortest_vector(&b, Norm::Euclidean).unwrap();
        assert!((l - 2f64.sqrt()).abs() < 1e-15);
        assert_eq!(v[0].abs(), 1.0);
        assert_eq!(v[1].abs(), 1.0);
        let hex = LatticeBasis::new(vec![vec![1.0, 0.0], vec![0.5, 3f64.sqrt() / 2.0]]).unwrap();
        assert!((shortest_vector(&hex, Norm::Euclidean).unwrap().1 - 1.0).abs() < 1e-15);
    }

    #[test]
    fn uncertain_boundary_raises() {
        let b = basis(&[&[1.0, 0.0], &[0.0, 1.0]]).with_radius(1e-6);
        assert!(matches!(count_points_in_ball(&b, 1.0, Norm::Euclidean), Err(Error::BoundaryUndecidable { .. })));
        assert_eq!(count_points_in_ball(&b, 1.2, Norm::Euclidean).unwrap(), 4);
    }

    #[test]
    fn too_large_dimension() {
        let rows: Vec<Vec<f64>> = (0..7).map(|i| (0..7).map(|j| if i == j { 1.0 } else { 0.0 }).collect()).collect();
        let b = LatticeBasis::new(rows).unwrap();
        assert!(matches!(shortest_vector(&b, Norm::Sup), Err(Error::DimensionTooLarge(7))));
    }
}
