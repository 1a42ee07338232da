//! Truncated p-adic integers, the exponential and logarithm series, and
//! exhaustive verifiers for (C, alpha)-good functions on `Z_p`.
//!
//! Every element is a residue modulo `p^N`. Statements about measures and
//! suprema are exact for the partition of `Z_p` into cylinders mod `p^N`.

mod good;

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use good::{
    check_good, default_balls, eval_good_function, find_controlled_value, sublevel_measure, sublevel_measure_closed, tight_constant, weak_ivt_check, weak_ivt_constant, Ball, CheckReport, CheckRow,
    EpsGrid, GoodFunctionSpec, Histogram, IvtBound, IvtLevel, IvtReport, LambdaSpec, PadicFunction, PadicValue, ResidueTable, SublevelResult, TermSpec, Witness, ENUMERATION_CAP,
};

/// Default number of p-adic digits.
pub const DEFAULT_PRECISION: u32 = 8;

pub fn is_prime(p: u64) -> bool {
    if p < 2 {
        return false;
    }
    let mut i = 2;
    while i * i <= p {
        if p.is_multiple_of(i) {
            return false;
        }
        i += 1;
    }
    true
}

/// `p^n`, or an error if it does not fit below `2^62`.
pub fn modulus(p: u64, n: u32) -> Result<u128> {
    let mut m: u128 = 1;
    for _ in 0..n {
        m *= p as u128;
        if m >= 1 << 62 {
            return Err(Error::Precondition(format!("{p}^{n} is too large")));
        }
    }
    Ok(m)
}

/// Element of `Z_p / p^N`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PadicInt {
    p: u64,
    prec: u32,
    value: u128,
}

impl fmt::Debug for PadicInt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} mod {}^{}", self.value, self.p, self.prec)
    }
}

/// `|x|_p`, exact (`Exact(v)` means `p^-v`) or known only to be at most
/// `p^-v` when the residue vanishes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum PadicAbs {
    Exact(i64),
    AtMost(i64),
}

impl PadicInt {
    pub fn new(p: u64, prec: u32, value: i128) -> Result<Self> {
        if !is_prime(p) {
            return Err(Error::Precondition(format!("{p} is not prime")));
        }
        if prec == 0 {
            return Err(Error::Precondition("precision must be positive".into()));
        }
        let m = modulus(p, prec)?;
        Ok(PadicInt { p, prec, value: value.rem_euclid(m as i128) as u128 })
    }

    pub(crate) fn raw(p: u64, prec: u32, value: u128) -> Self {
        PadicInt { p, prec, value }
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn precision(&self) -> u32 {
        self.prec
    }

    pub fn value(&self) -> u128 {
        self.value
    }

    pub fn modulus(&self) -> u128 {
        modulus(self.p, self.prec).expect("checked at construction")
    }

    pub fn zero_like(&self) -> Self {
        PadicInt { value: 0, ..*self }
    }

    pub fn one_like(&self) -> Self {
        PadicInt { value: 1 % self.modulus(), ..*self }
    }

    pub fn from_like(&self, v: i128) -> Self {
        PadicInt { value: v.rem_euclid(self.modulus() as i128) as u128, ..*self }
    }

    pub fn is_zero(&self) -> bool {
        self.value == 0
    }

    /// Valuation, `None` when the residue is 0 (valuation at least `N`).
    pub fn valuation(&self) -> Option<u32> {
        if self.value == 0 {
            return None;
        }
        let mut v = 0;
        let mut x = self.value;
        while x.is_multiple_of(self.p as u128) {
            x /= self.p as u128;
            v += 1;
        }
        Some(v)
    }

    pub fn abs(&self) -> PadicAbs {
        match self.valuation() {
            Some(v) => PadicAbs::Exact(v as i64),
            None => PadicAbs::AtMost(self.prec as i64),
        }
    }

    fn check(&self, o: &Self) {
        assert!(self.p == o.p && self.prec == o.prec, "mixed p-adic rings");
    }

    pub fn add(&self, o: &Self) -> Self {
        self.check(o);
        PadicInt { value: (self.value + o.value) % self.modulus(), ..*self }
    }

    pub fn sub(&self, o: &Self) -> Self {
        self.check(o);
        let m = self.modulus();
        PadicInt { value: (self.value + m - o.value) % m, ..*self }
    }

    pub fn neg(&self) -> Self {
        let m = self.modulus();
        PadicInt { value: (m - self.value) % m, ..*self }
    }

    pub fn mul(&self, o: &Self) -> Self {
        self.check(o);
        PadicInt { value: (self.value * o.value) % self.modulus(), ..*self }
    }

    pub fn pow(&self, mut e: u64) -> Self {
        let mut acc = self.one_like();
        let mut b = *self;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&b);
            }
            b = b.mul(&b);
            e >>= 1;
        }
        acc
    }

    /// Inverse of a unit.
    pub fn inverse(&self) -> Result<Self> {
        if self.value.is_multiple_of(self.p as u128) {
            return Err(Error::DegenerateInput("not a p-adic unit".into()));
        }
        let m = self.modulus() as i128;
        let (mut a, mut b, mut x0, mut x1) = (self.value as i128, m, 1i128, 0i128);
        while b != 0 {
            let q = a / b;
            (a, b) = (b, a - q * b);
            (x0, x1) = (x1, x0 - q * x1);
        }
        Ok(self.from_like(x0))
    }

    /// Same residue read at a lower precision.
    pub fn truncate(&self, prec: u32) -> Self {
        let prec = prec.min(self.prec).max(1);
        let m = modulus(self.p, prec).expect("smaller modulus");
        PadicInt { p: self.p, prec, value: self.value % m }
    }
}

/// `v_p(m!)` by Legendre's formula.
pub fn factorial_valuation(m: u64, p: u64) -> u64 {
    let mut v = 0;
    let mut q = m;
    while q > 0 {
        q /= p;
        v += q;
    }
    v
}

pub fn valuation_u64(mut m: u64, p: u64) -> u64 {
    if m == 0 {
        return u64::MAX;
    }
    let mut v = 0;
    while m.is_multiple_of(p) {
        m /= p;
        v += 1;
    }
    v
}

/// Smallest valuation for which the exponential series converges.
pub fn exp_domain(p: u64) -> u32 {
    if p == 2 {
        2
    } else {
        1
    }
}

/// Digits lost by the exponential and logarithm series on their domain.
///
/// Term `m` of exp has valuation `m a - v(m!)` and is formed as
/// `p^(m a - v(m!)) u^m / (m! / p^v(m!))`, dividing only by a unit; the
/// worst drop below the precision of `x` is `max_m (v(m!) - (m - 1) a)`,
/// which Legendre's bound `v(m!) <= (m - 1) / (p - 1)` makes `<= 0` when
/// `a >= exp_domain(p)`. The logarithm has `v(m) <= (m - 1) a` likewise.
pub fn series_buffer(p: u64, a: u32, terms: u64) -> u32 {
    (1..=terms).map(|m| factorial_valuation(m, p) as i64 - (m as i64 - 1) * a as i64).max().unwrap_or(0).max(0) as u32
}

/// Number of terms after which every term of exp at valuation `a` is 0 mod `p^N`.
fn exp_terms(p: u64, a: u32, prec: u32) -> u64 {
    let mut m = 1u64;
    let mut last_nonzero = 0;
    // m a - v(m!) >= m (a - 1/(p-1)) grows linearly; scan until well past prec
    while (m as f64) * (a as f64 - 1.0 / (p as f64 - 1.0)) <= prec as f64 + 2.0 {
        if (m * a as u64) < prec as u64 + factorial_valuation(m, p) {
            last_nonzero = m;
        }
        m += 1;
    }
    last_nonzero.max(1)
}

/// Unit part of `m` modulo `p^N` and its valuation.
fn split(m: u64, p: u64) -> (u64, u64) {
    let v = valuation_u64(m, p);
    (m / p.pow(v as u32), v)
}

/// `exp(x)` modulo `p^N`, for `v(x) >= 1` (`>= 2` when `p = 2`).
pub fn padic_exp(x: &PadicInt) -> Result<PadicInt> {
    let p = x.p;
    let a = match x.valuation() {
        None => return Ok(x.one_like()),
        Some(a) => a,
    };
    if a < exp_domain(p) {
        return Err(Error::OutsideConvergenceDomain { valuation: a });
    }
    let unit = PadicInt { value: x.value / (p.pow(a) as u128), ..*x };
    let terms = exp_terms(p, a, x.prec);
    debug_assert_eq!(series_buffer(p, a, terms), 0);
    let mut acc = x.one_like();
    // running unit part of m! and its valuation
    let mut fact_unit = x.one_like();
    let mut fact_val = 0u64;
    let mut upow = x.one_like();
    for m in 1..=terms {
        let (mu, mv) = split(m, p);
        fact_unit = fact_unit.mul(&x.from_like(mu as i128));
        fact_val += mv;
        upow = upow.mul(&unit);
        let e = m * a as u64 - fact_val;
        if e >= x.prec as u64 {
            continue;
        }
        let term = x.from_like(p.pow(e as u32) as i128).mul(&upow).mul(&fact_unit.inverse()?);
        acc = acc.add(&term);
    }
    Ok(acc)
}

/// `log(x)` modulo `p^N`, for `v(x - 1) >= 1` (`>= 2` when `p = 2`).
pub fn padic_log(x: &PadicInt) -> Result<PadicInt> {
    let p = x.p;
    let y = x.sub(&x.one_like());
    let b = match y.valuation() {
        None => return Ok(x.zero_like()),
        Some(b) => b,
    };
    if b < exp_domain(p) {
        return Err(Error::OutsideConvergenceDomain { valuation: b });
    }
    let unit = PadicInt { value: y.value / (p.pow(b) as u128), ..y };
    let mut acc = x.zero_like();
    let mut upow = x.one_like();
    let mut m = 1u64;
    loop {
        upow = upow.mul(&unit);
        let (mu, mv) = split(m, p);
        let e = m as i64 * b as i64 - mv as i64;
        if e < x.prec as i64 {
            let mut term = x.from_like(p.pow(e as u32) as i128).mul(&upow).mul(&x.from_like(mu as i128).inverse()?);
            if m.is_multiple_of(2) {
                term = term.neg();
            }
            acc = acc.add(&term);
        }
        // m b - v(m) >= m b - log_p(m) eventually exceeds the precision
        if m as f64 * b as f64 - (m as f64).ln() / (p as f64).ln() > x.prec as f64 + 1.0 {
            break;
        }
        m += 1;
    }
    Ok(acc)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ring_ops() {
        let a = PadicInt::new(5, 4, 7).unwrap();
        let b = PadicInt::new(5, 4, -3).unwrap();
        assert_eq!(a.add(&b).value(), 4);
        assert_eq!(a.mul(&b).value(), (625 - 21) as u128);
        assert_eq!(a.mul(&a.inverse().unwrap()).value(), 1);
        assert_eq!(PadicInt::new(5, 4, 50).unwrap().valuation(), Some(2));
        assert_eq!(PadicInt::new(5, 4, 625).unwrap().abs(), PadicAbs::AtMost(4));
    }

    #[test]
    fn exp_log_basics() {
        let z = PadicInt::new(5, 6, 0).unwrap();
        assert_eq!(padic_exp(&z).unwrap().value(), 1);
        let e = padic_exp(&PadicInt::new(5, 6, 5).unwrap()).unwrap();
        assert_eq!(e.sub(&e.one_like()).valuation(), Some(1));
        assert!(matches!(padic_exp(&PadicInt::new(5, 6, 1).unwrap()), Err(Error::OutsideConvergenceDomain { valuation: 0 })));
        assert!(matches!(padic_exp(&PadicInt::new(2, 6, 2).unwrap()), Err(Error::OutsideConvergenceDomain { valuation: 1 })));
        let one = PadicInt::new(3, 8, 1).unwrap();
        assert!(padic_log(&one).unwrap().is_zero());
        let l4 = padic_log(&PadicInt::new(3, 8, 4).unwrap()).unwrap();
        let l16 = padic_log(&PadicInt::new(3, 8, 16).unwrap()).unwrap();
        assert_eq!(l4.add(&l4), l16);
    }

    #[test]
    fn buffers_vanish_on_domain() {
        for p in [2u64, 3, 5, 7] {
            for a in exp_domain(p)..4 {
                assert_eq!(series_buffer(p, a, 200), 0);
            }
        }
        assert!(series_buffer(3, 0, 10) > 0);
    }
}
