use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::interval::{precision_ladder, start_precision, Interval, MAX_PRECISION_BITS};
use crate::linalg;
use crate::poly;
use crate::scalar::Rational;

use super::TotallyRealField;

/// Element of a totally real field, stored as a rational polynomial in the
/// generator of degree below `d`.
#[derive(Clone)]
pub struct AlgebraicNumber {
    field: Arc<TotallyRealField>,
    coeffs: Vec<Rational>,
}

impl fmt::Debug for AlgebraicNumber {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.coeffs.iter().map(|c| c.to_string()).collect();
        write!(f, "AlgebraicNumber[{}]", parts.join(", "))
    }
}

impl PartialEq for AlgebraicNumber {
    fn eq(&self, other: &Self) -> bool {
        self.same_field(other) && self.coeffs == other.coeffs
    }
}

impl Eq for AlgebraicNumber {}

impl AlgebraicNumber {
    /// Reduces `coeffs` (any length) modulo the minimal polynomial.
    pub fn from_coeffs(field: &Arc<TotallyRealField>, coeffs: Vec<Rational>) -> Self {
        let d = field.degree();
        let mut c = if coeffs.len() > d { poly::rem(&coeffs, field.rat_poly()) } else { coeffs };
        c.resize(d, Rational::zero());
        AlgebraicNumber { field: field.clone(), coeffs: c }
    }

    pub fn from_ints(field: &Arc<TotallyRealField>, coeffs: &[i64]) -> Self {
        Self::from_coeffs(field, coeffs.iter().map(|&c| Rational::from_integer(c.into())).collect())
    }

    pub fn field(&self) -> &Arc<TotallyRealField> {
        &self.field
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_zero())
    }

    pub fn is_rational(&self) -> bool {
        self.coeffs[1..].iter().all(|c| c.is_zero())
    }

    pub fn rational_value(&self) -> Option<Rational> {
        self.is_rational().then(|| self.coeffs[0].clone())
    }

    fn same_field(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.field, &other.field) || *self.field == *other.field
    }

    fn check_field(&self, other: &Self) {
        assert!(self.same_field(other), "elements of different fields");
    }

    pub fn scale(&self, r: &Rational) -> Self {
        AlgebraicNumber { field: self.field.clone(), coeffs: self.coeffs.iter().map(|c| c * r).collect() }
    }

    pub fn scale_int(&self, n: &BigInt) -> Self {
        self.scale(&Rational::from_integer(n.clone()))
    }

    /// Matrix of multiplication by `self` on the power basis (column j = self * x^j).
    pub fn multiplication_matrix(&self) -> linalg::RatMatrix {
        let d = self.field.degree();
        let mut cols = Vec::with_capacity(d);
        let mut basis = vec![Rational::zero(); d];
        for j in 0..d {
            basis.iter_mut().for_each(|c| *c = Rational::zero());
            basis[j] = Rational::one();
            let e = AlgebraicNumber { field: self.field.clone(), coeffs: basis.clone() };
            cols.push((self * &e).coeffs);
        }
        (0..d).map(|i| (0..d).map(|j| cols[j][i].clone()).collect()).collect()
    }

    pub fn inverse(&self) -> Result<Self> {
        if self.is_zero() {
            return Err(Error::DegenerateInput("inverse of zero".into()));
        }
        let d = self.field.degree();
        let mut e0 = vec![Rational::zero(); d];
        e0[0] = Rational::one();
        let sol = linalg::solve(&self.multiplication_matrix(), &e0).expect("nonzero element of a field is invertible");
        Ok(AlgebraicNumber { field: self.field.clone(), coeffs: sol })
    }

    pub fn pow(&self, mut e: u64) -> Self {
        let mut base = self.clone();
        let mut acc = self.field.int(1);
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            base = &base * &base;
            e >>= 1;
        }
        acc
    }

    /// Integer power, negative exponents through the inverse.
    pub fn powi(&self, e: i64) -> Result<Self> {
        if e >= 0 {
            Ok(self.pow(e as u64))
        } else {
            Ok(self.inverse()?.pow(e.unsigned_abs()))
        }
    }

    /// Exact norm `Res(f, a) / lc(f)^deg(a)`.
    pub fn norm(&self) -> Rational {
        if self.is_zero() {
            return Rational::zero();
        }
        let d = self.field.degree();
        let Some(da) = poly::degree(&self.coeffs) else { return Rational::zero() };
        if da == 0 {
            return num_traits::pow(self.coeffs[0].clone(), d);
        }
        let res = poly::resultant(self.field.rat_poly(), &self.coeffs[..=da]);
        let lead = Rational::from_integer(self.field.min_poly()[d].clone());
        res / num_traits::pow(lead, da)
    }

    /// Exact trace of the multiplication map.
    pub fn trace(&self) -> Rational {
        let m = self.multiplication_matrix();
        (0..m.len()).map(|i| m[i][i].clone()).sum()
    }

    /// Enclosure of the `j`-th embedding with radius at most `2^-bits`.
    pub fn embed_at(&self, j: usize, bits: u32) -> Result<Interval> {
        if let Some(r) = self.rational_value() {
            let iv = Interval::from_rational(&r, bits + 2);
            return Ok(iv);
        }
        let coeff_bits = self.coeffs.iter().map(|c| c.numer().bits() as i64 - c.denom().bits() as i64).max().unwrap_or(0).max(0) as u32;
        let d = self.field.degree() as u32;
        let mut prec = start_precision().max(bits + coeff_bits + 4 * d + 16);
        loop {
            if prec > MAX_PRECISION_BITS + bits {
                return Err(Error::exhausted(prec, "embedding refinement"));
            }
            let root = self.field.root_enclosure(j, prec.min(MAX_PRECISION_BITS))?;
            let v = poly::eval_interval(&self.coeffs, &root, prec + 32);
            if v.radius_le_pow2(bits as i64) {
                return Ok(v);
            }
            if prec >= MAX_PRECISION_BITS {
                return Err(Error::exhausted(prec, "embedding refinement"));
            }
            prec = (prec * 2).min(MAX_PRECISION_BITS);
        }
    }

    /// Enclosures of all `d` embeddings, ascending root order.
    pub fn embed(&self, bits: u32) -> Result<Vec<Interval>> {
        (0..self.field.degree()).map(|j| self.embed_at(j, bits)).collect()
    }

    /// The real value under the identity embedding.
    pub fn real(&self, bits: u32) -> Result<Interval> {
        self.embed_at(self.field.identity_index(), bits)
    }

    pub fn to_f64(&self) -> f64 {
        self.real(64).map(|i| i.to_f64()).unwrap_or(f64::NAN)
    }

    /// Certified sign under embedding `j`.
    pub fn sign_at(&self, j: usize) -> Result<Ordering> {
        if self.is_zero() {
            return Ok(Ordering::Equal);
        }
        for prec in precision_ladder(start_precision()) {
            let v = self.embed_at(j, prec)?;
            if let Some(s) = v.sign() {
                return Ok(s);
            }
        }
        Err(Error::exhausted(MAX_PRECISION_BITS, "sign of algebraic number"))
    }

    /// Certified sign under the identity embedding.
    pub fn signum(&self) -> Result<Ordering> {
        self.sign_at(self.field.identity_index())
    }

    /// Exact floor under the identity embedding (irrational or rational).
    pub fn floor(&self) -> Result<BigInt> {
        if let Some(r) = self.rational_value() {
            return Ok(r.floor().to_integer());
        }
        for prec in precision_ladder(start_precision().min(64)) {
            let v = self.real(prec)?;
            let (a, b) = (v.lo().floor(), v.hi().floor());
            if a == b {
                return Ok(a);
            }
        }
        Err(Error::exhausted(MAX_PRECISION_BITS, "floor of algebraic number"))
    }

    pub fn is_totally_positive(&self) -> Result<bool> {
        for j in 0..self.field.degree() {
            if self.sign_at(j)? != Ordering::Greater {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// Absolute value under the identity embedding.
    pub fn abs(&self) -> Result<Self> {
        Ok(if self.signum()? == Ordering::Less { -self } else { self.clone() })
    }
}

impl Add for &AlgebraicNumber {
    type Output = AlgebraicNumber;
    fn add(self, o: &AlgebraicNumber) -> AlgebraicNumber {
        self.check_field(o);
        AlgebraicNumber { field: self.field.clone(), coeffs: self.coeffs.iter().zip(&o.coeffs).map(|(a, b)| a + b).collect() }
    }
}

impl Sub for &AlgebraicNumber {
    type Output = AlgebraicNumber;
    fn sub(self, o: &AlgebraicNumber) -> AlgebraicNumber {
        self.check_field(o);
        AlgebraicNumber { field: self.field.clone(), coeffs: self.coeffs.iter().zip(&o.coeffs).map(|(a, b)| a - b).collect() }
    }
}

impl Mul for &AlgebraicNumber {
    type Output = AlgebraicNumber;
    fn mul(self, o: &AlgebraicNumber) -> AlgebraicNumber {
        self.check_field(o);
        AlgebraicNumber::from_coeffs(&self.field, poly::mul_rat(&self.coeffs, &o.coeffs))
    }
}

impl Neg for &AlgebraicNumber {
    type Output = AlgebraicNumber;
    fn neg(self) -> AlgebraicNumber {
        AlgebraicNumber { field: self.field.clone(), coeffs: self.coeffs.iter().map(|c| -c).collect() }
    }
}

impl Add for AlgebraicNumber {
    type Output = AlgebraicNumber;
    fn add(self, o: AlgebraicNumber) -> AlgebraicNumber {
        &self + &o
    }
}

impl Sub for AlgebraicNumber {
    type Output = AlgebraicNumber;
    fn sub(self, o: AlgebraicNumber) -> AlgebraicNumber {
        &self - &o
    }
}

impl Mul for AlgebraicNumber {
    type Output = AlgebraicNumber;
    fn mul(self, o: AlgebraicNumber) -> AlgebraicNumber {
        &self * &o
    }
}

impl Neg for AlgebraicNumber {
    type Output = AlgebraicNumber;
    fn neg(self) -> AlgebraicNumber {
        -&self
    }
}

/// Exact norm of an element.
pub fn field_norm(x: &AlgebraicNumber) -> Rational {
    x.norm()
}

/// Embedding enclosures of an element.
pub fn embed(x: &AlgebraicNumber, bits: u32) -> Result<Vec<Interval>> {
    x.embed(bits)
}
