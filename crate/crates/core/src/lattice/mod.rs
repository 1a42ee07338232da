//! Full-rank lattices in R^k: reduction, short vectors, point counts and
//! exact equality via Hermite normal forms.

mod enumerate;
mod hnf;
mod lll;

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg;
use crate::scalar::{Rational, RealScalar, Scalar};

pub use enumerate::{count_points_in_ball, enumerate_short, observables, shortest_vector, LatticeObservables};
pub use hnf::{hnf_equal, hnf_equal_generators, hnf_int, hnf_rational};
pub use lll::{lll_big, lll_integral, lll_rational, mat_mul, max_bits, Reduction, DEFAULT_DELTA};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum Norm {
    Euclidean,
    #[default]
    Sup,
}

impl Norm {
    pub fn of(&self, v: &[f64]) -> f64 {
        match self {
            Norm::Euclidean => v.iter().map(|x| x * x).sum::<f64>().sqrt(),
            Norm::Sup => v.iter().fold(0.0, |m, x| m.max(x.abs())),
        }
    }

    /// Exact squared norm.
    pub fn squared_exact(&self, v: &[Rational]) -> Rational {
        match self {
            Norm::Euclidean => v.iter().map(|x| x * x).sum(),
            Norm::Sup => v.iter().map(|x| x * x).max().unwrap_or_else(Rational::zero),
        }
    }
}

impl fmt::Display for Norm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Norm::Euclidean => "euclidean",
            Norm::Sup => "sup",
        })
    }
}

impl FromStr for Norm {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "euclidean" | "l2" => Ok(Norm::Euclidean),
            "sup" | "max" | "linf" => Ok(Norm::Sup),
            _ => Err(Error::Config(format!("unknown norm {s:?}"))),
        }
    }
}

/// Lattice spanned by the rows of a square matrix.
///
/// `radius` bounds the absolute error of every entry with respect to the
/// lattice the basis stands for (0 for exact data).
#[derive(Debug, Clone, PartialEq)]
pub struct LatticeBasis<T: Scalar> {
    rows: Vec<Vec<T>>,
    exact: bool,
    radius: f64,
    reduced: bool,
}

impl<T: Scalar> LatticeBasis<T> {
    pub fn new(rows: Vec<Vec<T>>) -> Result<Self> {
        let k = rows.len();
        if k == 0 || rows.iter().any(|r| r.len() != k) {
            return Err(Error::DegenerateInput("basis must be a non-empty square matrix".into()));
        }
        let b = LatticeBasis { rows, exact: T::EXACT, radius: 0.0, reduced: false };
        if b.det_exact().is_zero() {
            return Err(Error::DegenerateInput("basis is singular".into()));
        }
        Ok(b)
    }

    /// Marks entries as approximations with absolute error at most `radius`.
    pub fn with_radius(mut self, radius: f64) -> Self {
        self.radius = radius;
        self.exact = self.exact && radius == 0.0;
        self
    }

    /// Declares float entries to be the exact lattice (e.g. small integers).
    pub fn assume_exact(mut self) -> Self {
        self.exact = true;
        self.radius = 0.0;
        self
    }

    pub(crate) fn from_parts(rows: Vec<Vec<T>>, exact: bool, radius: f64, reduced: bool) -> Self {
        LatticeBasis { rows, exact, radius, reduced }
    }

    pub fn dim(&self) -> usize {
        self.rows.len()
    }

    pub fn rows(&self) -> &[Vec<T>] {
        &self.rows
    }

    pub fn is_exact(&self) -> bool {
        self.exact
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    pub fn is_reduced(&self) -> bool {
        self.reduced
    }

    pub fn to_f64_rows(&self) -> Vec<Vec<f64>> {
        self.rows.iter().map(|r| r.iter().map(|x| x.to_f64()).collect()).collect()
    }

    pub fn to_rational_rows(&self) -> Vec<Vec<Rational>> {
        self.rows.iter().map(|r| r.iter().map(|x| x.to_rational()).collect()).collect()
    }

    /// Determinant of the stored entries, exactly.
    pub fn det_exact(&self) -> Rational {
        linalg::det(&self.to_rational_rows())
    }

    /// Integer matrix `L * rows` with `L` the common denominator.
    fn integer_rows(&self) -> (Vec<Vec<BigInt>>, BigInt) {
        let q = self.to_rational_rows();
        let l = q.iter().flatten().fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
        let ints = q.iter().map(|r| r.iter().map(|x| (x * Rational::from_integer(l.clone())).to_integer()).collect()).collect();
        (ints, l)
    }

    /// Apply an integer transform to the rows: `U * rows`.
    pub fn transformed(&self, u: &[Vec<BigInt>]) -> Self {
        let rows = u
            .iter()
            .map(|urow| {
                (0..self.dim())
                    .map(|j| urow.iter().zip(&self.rows).fold(T::zero(), |acc, (c, r)| acc + T::from_bigint(c) * r[j].clone()))
                    .collect()
            })
            .collect();
        let growth = u.iter().map(|r| r.iter().map(|c| c.abs().to_f64().unwrap_or(f64::INFINITY)).sum::<f64>()).fold(0.0, f64::max);
        LatticeBasis { rows, exact: self.exact, radius: self.radius * growth, reduced: false }
    }
}

/// `|det|` of the basis.
pub fn covolume<T: Scalar>(b: &LatticeBasis<T>) -> f64 {
    ToPrimitive::to_f64(&b.det_exact().abs()).unwrap_or(f64::NAN)
}

/// Scales the basis to covolume 1.
pub fn normalize_covolume<T: RealScalar>(b: &LatticeBasis<T>) -> LatticeBasis<T> {
    let k = b.dim() as f64;
    let c = covolume(b);
    let s = c.powf(-1.0 / k);
    let rows = b.rows.iter().map(|r| r.iter().map(|x| *x * T::from_f64(s)).collect()).collect();
    LatticeBasis { rows, exact: false, radius: b.radius * s + f64::EPSILON, reduced: b.reduced }
}

/// LLL reduction with parameter `delta`; returns the reduced basis and the
/// unimodular transform `U` (reduced = U * input).
pub fn lll_reduce<T: Scalar>(b: &LatticeBasis<T>, delta: f64) -> (LatticeBasis<T>, Vec<Vec<BigInt>>) {
    let (ints, _) = b.integer_rows();
    let red = lll_big(ints, delta);
    let mut out = b.transformed(&red.transform);
    out.reduced = true;
    (out, red.transform)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::rational;

    #[test]
    fn covolumes() {
        let z2 = LatticeBasis::new(vec![vec![1.0, 0.0], vec![0.0, 1.0]]).unwrap();
        assert_eq!(covolume(&z2), 1.0);
        let b = LatticeBasis::new(vec![vec![2.0, 0.0], vec![0.0, 3.0]]).unwrap();
        assert_eq!(covolume(&b), 6.0);
    }

    #[test]
    fn normalization() {
        let b = LatticeBasis::new(vec![vec![1.0, 0.0], vec![0.0, 4.0]]).unwrap();
        let n = normalize_covolume(&b);
        assert_eq!(n.to_f64_rows(), vec![vec![0.5, 0.0], vec![0.0, 2.0]]);
        let b = LatticeBasis::new(vec![vec![2.0f32, 0.0], vec![0.0, 2.0]]).unwrap();
        assert_eq!(normalize_covolume(&b).to_f64_rows(), vec![vec![1.0, 0.0], vec![0.0, 1.0]]);
    }

    #[test]
    fn lll_on_shear_preserves_det() {
        let b = LatticeBasis::new(vec![vec![rational(1, 1), rational(0, 1)], vec![rational(1000, 1), rational(1, 1)]]).unwrap();
        let (r, u) = lll_reduce(&b, DEFAULT_DELTA);
        assert_eq!(r.det_exact().abs(), rational(1, 1));
        assert!(r.rows().iter().flatten().all(|x| x.abs() <= rational(1, 1)));
        assert_eq!(linalg::det(&u.iter().map(|r| r.iter().map(|x| Rational::from_integer(x.clone())).collect()).collect()).abs(), rational(1, 1));
        assert!(hnf_equal(&b, &r).unwrap());
    }

    #[test]
    fn singular_rejected() {
        assert!(LatticeBasis::new(vec![vec![1.0, 2.0], vec![2.0, 4.0]]).is_err());
    }
}
