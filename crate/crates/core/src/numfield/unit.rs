use std::cmp::Ordering;
use std::collections::HashMap;
use std::sync::Arc;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::scalar::Rational;

use super::{AlgebraicNumber, TotallyRealField};

/// The field `Q(sqrt D)` with the generator embedded as `+sqrt D`.
pub fn quadratic_field(d: i64) -> Result<Arc<TotallyRealField>> {
    if d <= 1 {
        return Err(Error::DegenerateInput(format!("D = {d} must exceed 1")));
    }
    if !is_squarefree(d as u64) {
        return Err(Error::NotSquarefree(d));
    }
    TotallyRealField::new(vec![BigInt::from(-d), BigInt::zero(), BigInt::one()], Some(1))
}

fn is_squarefree(n: u64) -> bool {
    let mut k = 2u64;
    while k * k <= n {
        if n.is_multiple_of(k * k) {
            return false;
        }
        k += 1;
    }
    true
}

/// Fundamental unit `p + q sqrt D > 1` of `Z[sqrt D]`, from the period of the
/// continued fraction of `sqrt D`.
pub fn fundamental_unit_quadratic(d: i64) -> Result<AlgebraicNumber> {
    let field = quadratic_field(d)?;
    let a0 = BigInt::from(d).sqrt();
    let dd = BigInt::from(d);
    let (mut m, mut den, mut a) = (BigInt::zero(), BigInt::one(), a0.clone());
    // convergents p_{-1}/q_{-1} = 1/0, p_0/q_0 = a0/1
    let (mut p_prev, mut p) = (BigInt::one(), a0.clone());
    let (mut q_prev, mut q) = (BigInt::zero(), BigInt::one());
    loop {
        m = &den * &a - &m;
        den = (&dd - &m * &m) / &den;
        a = (&a0 + &m) / &den;
        if a == &a0 * 2 {
            break;
        }
        let p_next = &a * &p + &p_prev;
        let q_next = &a * &q + &q_prev;
        p_prev = std::mem::replace(&mut p, p_next);
        q_prev = std::mem::replace(&mut q, q_next);
    }
    let unit = AlgebraicNumber::from_coeffs(&field, vec![Rational::from_integer(p), Rational::from_integer(q)]);
    let n = unit.norm();
    if n.abs() != Rational::one() {
        return Err(Error::Precondition(format!("continued fraction produced norm {n}")));
    }
    Ok(unit)
}

/// Generator of the units of the multiplier ring of the module `Z a1 + Z a2`
/// in a real quadratic field, normalized to be greater than 1 under the
/// identity embedding. Read off the period of the continued fraction of
/// `a2 / a1`.
pub fn module_unit_d2(a1: &AlgebraicNumber, a2: &AlgebraicNumber) -> Result<AlgebraicNumber> {
    let field = a1.field().clone();
    if field.degree() != 2 {
        return Err(Error::Precondition("module unit requires a quadratic field".into()));
    }
    let xi = a2 * &a1.inverse()?;
    if xi.is_rational() {
        return Err(Error::NotABasis);
    }
    let mut seen: HashMap<Vec<Rational>, usize> = HashMap::new();
    let mut states: Vec<AlgebraicNumber> = Vec::new();
    let mut partials: Vec<BigInt> = Vec::new();
    let mut x = xi;
    loop {
        if let Some(&i) = seen.get(x.coeffs()) {
            // x_i = M x_j with M = prod_{t in i..j} [[a_t, 1], [1, 0]]
            let (mut ma, mut mb, mut mc, mut md) = (BigInt::one(), BigInt::zero(), BigInt::zero(), BigInt::one());
            for a in &partials[i..] {
                let (na, nc) = (&ma * a + &mb, &mc * a + &md);
                mb = ma;
                md = mc;
                ma = na;
                mc = nc;
            }
            let eta = &states[i];
            let lambda = &eta.scale_int(&mc) + &field.rational(Rational::from_integer(md));
            let lambda = lambda.abs()?;
            let one = field.int(1);
            return if (&lambda - &one).signum()? == Ordering::Less { lambda.inverse() } else { Ok(lambda) };
        }
        if partials.len() > 100_000 {
            return Err(Error::Precondition("continued fraction period not found".into()));
        }
        seen.insert(x.coeffs().to_vec(), states.len());
        let a = x.floor()?;
        let frac = &x - &field.rational(Rational::from_integer(a.clone()));
        states.push(x);
        partials.push(a);
        x = frac.inverse()?;
    }
}

/// Totally positive generator of the module's unit group acting on the orbit,
/// and the orbit period `|log sigma(u)|` in the flow parameter.
pub fn orbit_period_d2(a1: &AlgebraicNumber, a2: &AlgebraicNumber) -> Result<(AlgebraicNumber, f64)> {
    let mut u = module_unit_d2(a1, a2)?;
    if !u.is_totally_positive()? {
        u = &u * &u;
    }
    let v = u.real(64)?.to_f64();
    let period = v.ln().abs();
    debug_assert!(period.is_finite() && period > 0.0);
    Ok((u, period))
}

/// Regulator `log eps0` of `Z[sqrt D]`.
pub fn regulator(d: i64) -> Result<f64> {
    let u = fundamental_unit_quadratic(d)?;
    Ok(u.real(64)?.to_f64().ln())
}
