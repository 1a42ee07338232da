//! Univariate polynomials over Z and Q: Sturm sequences, real root
//! isolation, resultants. Coefficients are stored lowest degree first.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::interval::{Dyadic, Interval};
use crate::linalg;
use crate::scalar::Rational;

pub type IntPoly = Vec<BigInt>;
pub type RatPoly = Vec<Rational>;

pub fn trim<T: Zero>(p: &mut Vec<T>) {
    while p.len() > 1 && p.last().is_some_and(|c| c.is_zero()) {
        p.pop();
    }
}

pub fn degree<T: Zero>(p: &[T]) -> Option<usize> {
    p.iter().rposition(|c| !c.is_zero())
}

pub fn to_rat(p: &[BigInt]) -> RatPoly {
    p.iter().map(|c| Rational::from_integer(c.clone())).collect()
}

pub fn content(p: &[BigInt]) -> BigInt {
    p.iter().fold(BigInt::zero(), |g, c| g.gcd(c))
}

pub fn derivative_int(p: &[BigInt]) -> IntPoly {
    let mut d: IntPoly = p.iter().enumerate().skip(1).map(|(i, c)| c * BigInt::from(i)).collect();
    if d.is_empty() {
        d.push(BigInt::zero());
    }
    d
}

/// Remainder of `a` modulo `b` over Q.
pub fn rem(a: &[Rational], b: &[Rational]) -> RatPoly {
    let db = degree(b).expect("division by zero polynomial");
    let mut r: RatPoly = a.to_vec();
    trim(&mut r);
    let lead = b[db].clone();
    while let Some(dr) = degree(&r) {
        if dr < db {
            break;
        }
        let f = &r[dr] / &lead;
        let shift = dr - db;
        for (i, c) in b.iter().enumerate().take(db + 1) {
            let v = &f * c;
            r[i + shift] -= v;
        }
        r[dr] = Rational::zero();
        trim(&mut r);
    }
    if degree(&r).is_none() {
        return vec![Rational::zero()];
    }
    r
}

pub fn gcd_rat(a: &[Rational], b: &[Rational]) -> RatPoly {
    let mut x: RatPoly = a.to_vec();
    let mut y: RatPoly = b.to_vec();
    trim(&mut x);
    trim(&mut y);
    while degree(&y).is_some() {
        let r = rem(&x, &y);
        x = y;
        y = r;
    }
    let d = degree(&x).unwrap_or(0);
    let lead = x[d].clone();
    if lead.is_zero() {
        return x;
    }
    x.iter().map(|c| c / &lead).collect()
}

pub fn mul_rat(a: &[Rational], b: &[Rational]) -> RatPoly {
    let mut out = vec![Rational::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        if x.is_zero() {
            continue;
        }
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}

/// Exact sign of an integer polynomial at a dyadic point.
pub fn sign_at(p: &[BigInt], x: &Dyadic) -> i32 {
    // p(m 2^e) * 2^(-e n) evaluated by Horner on integers when e < 0.
    let n = p.len() - 1;
    if x.exp() >= 0 {
        let xv = x.floor();
        let mut acc = BigInt::zero();
        for c in p.iter().rev() {
            acc = acc * &xv + c;
        }
        return sign_of(&acc);
    }
    // Horner with scaling: acc_i = acc_{i+1} * m + c_i * 2^{s (n - i)}
    let s = (-x.exp()) as usize;
    let m = x.mant();
    let mut acc = BigInt::zero();
    for (i, c) in p.iter().enumerate().rev() {
        acc = acc * m + (c << (s * (n - i)));
    }
    sign_of(&acc)
}

fn sign_of(x: &BigInt) -> i32 {
    if x.is_positive() {
        1
    } else if x.is_negative() {
        -1
    } else {
        0
    }
}

/// Interval Horner evaluation of a rational polynomial.
pub fn eval_interval(p: &[Rational], x: &Interval, prec: u32) -> Interval {
    let mut acc = Interval::from_int(0);
    for c in p.iter().rev() {
        acc = acc.mul(x, prec).add(&Interval::from_rational(c, prec), prec);
    }
    acc
}

/// Sturm sequence of a squarefree polynomial.
pub fn sturm_sequence(p: &[BigInt]) -> Vec<RatPoly> {
    let mut seq = vec![to_rat(p), to_rat(&derivative_int(p))];
    loop {
        let n = seq.len();
        if degree(&seq[n - 1]).unwrap_or(0) == 0 {
            break;
        }
        let r = rem(&seq[n - 2], &seq[n - 1]);
        if degree(&r).is_none() {
            break;
        }
        seq.push(r.into_iter().map(|c| -c).collect());
    }
    seq
}

fn sign_rat_at(p: &[Rational], x: &Rational) -> i32 {
    let mut acc = Rational::zero();
    for c in p.iter().rev() {
        acc = acc * x + c;
    }
    if acc.is_positive() {
        1
    } else if acc.is_negative() {
        -1
    } else {
        0
    }
}

pub fn sign_changes(seq: &[RatPoly], x: &Rational) -> usize {
    let signs: Vec<i32> = seq.iter().map(|p| sign_rat_at(p, x)).filter(|&s| s != 0).collect();
    signs.windows(2).filter(|w| w[0] != w[1]).count()
}

/// Number of distinct real roots in `(a, b]`.
pub fn count_roots(seq: &[RatPoly], a: &Rational, b: &Rational) -> usize {
    sign_changes(seq, a) - sign_changes(seq, b)
}

/// Power of two strictly above every root modulus (Cauchy bound).
pub fn root_bound_pow2(p: &[BigInt]) -> i64 {
    let d = degree(p).expect("zero polynomial");
    let lead = p[d].abs();
    let mut m = Rational::zero();
    for c in &p[..d] {
        let r = Rational::new(c.abs(), lead.clone());
        if r > m {
            m = r;
        }
    }
    let bound = m + Rational::one();
    let mut k = 0i64;
    while Rational::from_integer(BigInt::one() << k as usize) <= bound {
        k += 1;
    }
    k
}

/// Outcome of real root isolation.
#[derive(Debug)]
pub enum Isolation {
    /// Disjoint brackets `(lo, hi)` with a sign change, ascending.
    Brackets(Vec<(Dyadic, Dyadic)>),
    /// A bisection point hit an exact rational root.
    RationalRoot(Dyadic),
}

/// Isolate the real roots of a squarefree integer polynomial.
pub fn isolate_real_roots(p: &[BigInt]) -> Isolation {
    let seq = sturm_sequence(p);
    let k = root_bound_pow2(p);
    let a = Dyadic::new(-(BigInt::one() << k as usize), 0);
    let b = Dyadic::new(BigInt::one() << k as usize, 0);
    let mut out = Vec::new();
    let mut stack = vec![(a, b)];
    while let Some((lo, hi)) = stack.pop() {
        let n = count_roots(&seq, &lo.to_rational(), &hi.to_rational());
        if n == 0 {
            continue;
        }
        if n == 1 && sign_at(p, &lo) != 0 && sign_at(p, &hi) != 0 {
            out.push((lo, hi));
            continue;
        }
        let mid = lo.add(&hi).shl(-1);
        if sign_at(p, &mid) == 0 {
            return Isolation::RationalRoot(mid);
        }
        stack.push((lo, mid.clone()));
        stack.push((mid, hi));
    }
    out.sort_by(|x, y| x.0.cmp(&y.0));
    Isolation::Brackets(out)
}

/// Resultant via the Sylvester determinant.
pub fn resultant(f: &[Rational], g: &[Rational]) -> Rational {
    let m = degree(f).expect("zero polynomial");
    let n = degree(g).unwrap_or(0);
    if n == 0 {
        return num_traits::pow(g[0].clone(), m);
    }
    let size = m + n;
    let mut s = vec![vec![Rational::zero(); size]; size];
    for r in 0..n {
        for i in 0..=m {
            s[r][r + i] = f[m - i].clone();
        }
    }
    for r in 0..m {
        for i in 0..=n {
            s[n + r][r + i] = g[n - i].clone();
        }
    }
    linalg::det(&s)
}

/// Exact divisibility test over Q.
pub fn divides(g: &[BigInt], f: &[BigInt]) -> bool {
    degree(&rem(&to_rat(f), &to_rat(g))).is_none()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::rational;

    fn ip(c: &[i64]) -> IntPoly {
        c.iter().map(|&x| BigInt::from(x)).collect()
    }

    #[test]
    fn sturm_counts_real_roots() {
        let seq = sturm_sequence(&ip(&[-1, -2, 1, 1]));
        assert_eq!(count_roots(&seq, &rational(-2, 1), &rational(2, 1)), 3);
        let seq = sturm_sequence(&ip(&[1, 0, 1]));
        assert_eq!(count_roots(&seq, &rational(-10, 1), &rational(10, 1)), 0);
    }

    #[test]
    fn isolation_of_sqrt2() {
        let Isolation::Brackets(b) = isolate_real_roots(&ip(&[-2, 0, 1])) else { panic!() };
        assert_eq!(b.len(), 2);
        assert!(b[0].1.to_f64() <= 0.0 && b[1].0.to_f64() >= 0.0);
    }

    #[test]
    fn isolation_reports_rational_root() {
        assert!(matches!(isolate_real_roots(&ip(&[0, -1, 0, 1])), Isolation::RationalRoot(_)));
    }

    #[test]
    fn sign_at_dyadics() {
        let p = ip(&[-2, 0, 1]);
        assert_eq!(sign_at(&p, &Dyadic::new(BigInt::from(3), -1)), 1);
        assert_eq!(sign_at(&p, &Dyadic::new(BigInt::from(5), -2)), -1);
        assert_eq!(sign_at(&p, &Dyadic::from_int(2)), 1);
    }

    #[test]
    fn resultant_matches_norm() {
        // Res(x^2 - 2, x - 1) = 1 - 2 = -1 = N(1 + sqrt 2) up to sign convention.
        let f = to_rat(&ip(&[-2, 0, 1]));
        let g = to_rat(&ip(&[-1, 1]));
        assert_eq!(resultant(&f, &g), rational(-1, 1));
    }
}
