use std::fmt;
use std::sync::{Arc, RwLock};

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::interval::{precision_ladder, start_precision, Dyadic, Interval, MAX_PRECISION_BITS};
use crate::poly::{self, IntPoly, Isolation, RatPoly};
use crate::scalar::Rational;

use super::AlgebraicNumber;

/// Largest degree accepted; irreducibility is decided over root subsets.
pub const MAX_DEGREE: usize = 16;

/// A totally real number field `Q[x]/(f)` with certified real root brackets.
///
/// Roots are ordered ascending; `identity` designates the embedding under
/// which elements are read as real numbers.
pub struct TotallyRealField {
    min_poly: IntPoly,
    rat_poly: RatPoly,
    identity: usize,
    // (lo, hi) with f(lo) and f(hi) of opposite signs; refined in place.
    roots: RwLock<Vec<(Dyadic, Dyadic)>>,
}

impl fmt::Debug for TotallyRealField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("TotallyRealField").field("min_poly", &self.min_poly).field("identity", &self.identity).finish()
    }
}

impl PartialEq for TotallyRealField {
    fn eq(&self, other: &Self) -> bool {
        self.min_poly == other.min_poly && self.identity == other.identity
    }
}

/// Build a field from integer coefficients `[c0, c1, ..., cd]`, identity
/// embedding at the largest root.
pub fn make_field(coeffs: &[i64]) -> Result<Arc<TotallyRealField>> {
    let c: IntPoly = coeffs.iter().map(|&x| BigInt::from(x)).collect();
    TotallyRealField::new(c, None)
}

impl TotallyRealField {
    /// `identity`: index into the ascending root list; `None` picks the largest root.
    pub fn new(coeffs: IntPoly, identity: Option<usize>) -> Result<Arc<Self>> {
        if coeffs.len() < 3 {
            return Err(Error::DegenerateInput(format!("degree {} < 2", coeffs.len().saturating_sub(1))));
        }
        if coeffs.last().unwrap().is_zero() {
            return Err(Error::DegenerateInput("leading coefficient is zero".into()));
        }
        let d = coeffs.len() - 1;
        if d > MAX_DEGREE {
            return Err(Error::DegenerateInput(format!("degree {d} above supported maximum {MAX_DEGREE}")));
        }
        let g = poly::content(&coeffs);
        let mut f: IntPoly = coeffs.iter().map(|c| c / &g).collect();
        if f[d].is_negative() {
            f.iter_mut().for_each(|c| *c = -c.clone());
        }
        let fr = poly::to_rat(&f);
        let df = poly::to_rat(&poly::derivative_int(&f));
        if poly::degree(&poly::gcd_rat(&fr, &df)) != Some(0) {
            return Err(Error::NotIrreducible("repeated factor".into()));
        }
        let brackets = match poly::isolate_real_roots(&f) {
            Isolation::RationalRoot(r) => return Err(Error::NotIrreducible(format!("rational root {r}"))),
            Isolation::Brackets(b) => b,
        };
        if brackets.len() != d {
            return Err(Error::NotTotallyReal { degree: d, real: brackets.len() });
        }
        let identity = identity.unwrap_or(d - 1);
        if identity >= d {
            return Err(Error::DegenerateInput(format!("identity root index {identity} out of range")));
        }
        let field = TotallyRealField { min_poly: f, rat_poly: fr, identity, roots: RwLock::new(brackets) };
        field.check_irreducible()?;
        Ok(Arc::new(field))
    }

    pub fn degree(&self) -> usize {
        self.min_poly.len() - 1
    }

    pub fn min_poly(&self) -> &[BigInt] {
        &self.min_poly
    }

    pub(crate) fn rat_poly(&self) -> &[Rational] {
        &self.rat_poly
    }

    pub fn identity_index(&self) -> usize {
        self.identity
    }

    /// Enclosure of root `j` (ascending order) with radius at most `2^-bits`.
    pub fn root_enclosure(&self, j: usize, bits: u32) -> Result<Interval> {
        if bits > MAX_PRECISION_BITS {
            return Err(Error::exhausted(bits, "root refinement"));
        }
        {
            let r = self.roots.read().unwrap();
            let iv = Interval::new(r[j].0.clone(), r[j].1.clone());
            if iv.radius_le_pow2(bits as i64) {
                return Ok(iv);
            }
        }
        let mut w = self.roots.write().unwrap();
        let (mut lo, mut hi) = w[j].clone();
        let s_lo = poly::sign_at(&self.min_poly, &lo);
        loop {
            let iv = Interval::new(lo.clone(), hi.clone());
            if iv.radius_le_pow2(bits as i64) {
                break;
            }
            let mid = lo.add(&hi).shl(-1);
            let s = poly::sign_at(&self.min_poly, &mid);
            if s == 0 {
                // only reachable for reducible input during the factor search
                lo = mid.clone();
                hi = mid;
                break;
            }
            if s == s_lo {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        w[j] = (lo.clone(), hi.clone());
        Ok(Interval::new(lo, hi))
    }

    /// Float approximations of the roots, ascending.
    pub fn roots_f64(&self) -> Vec<f64> {
        (0..self.degree()).map(|j| self.root_enclosure(j, 60).map(|i| i.to_f64()).unwrap_or(f64::NAN)).collect()
    }

    pub fn generator(self: &Arc<Self>) -> AlgebraicNumber {
        let mut c = vec![Rational::zero(); self.degree()];
        c[1] = Rational::one();
        AlgebraicNumber::from_coeffs(self, c)
    }

    pub fn rational(self: &Arc<Self>, r: Rational) -> AlgebraicNumber {
        let mut c = vec![Rational::zero(); self.degree()];
        c[0] = r;
        AlgebraicNumber::from_coeffs(self, c)
    }

    pub fn int(self: &Arc<Self>, n: i64) -> AlgebraicNumber {
        self.rational(Rational::from_integer(n.into()))
    }

    /// Exact discriminant of the minimal polynomial.
    pub fn discriminant(&self) -> Rational {
        let d = self.degree();
        let df = poly::to_rat(&poly::derivative_int(&self.min_poly));
        let res = poly::resultant(&self.rat_poly, &df);
        let lead = Rational::from_integer(self.min_poly[d].clone());
        let sign = if (d * (d - 1) / 2) % 2 == 1 { -Rational::one() } else { Rational::one() };
        sign * res / lead
    }

    fn check_irreducible(&self) -> Result<()> {
        let d = self.degree();
        let lead = self.min_poly[d].abs();
        let divisors = positive_divisors(&lead)?;
        for size in 1..=d / 2 {
            for mask in 0u32..(1 << d) {
                if mask.count_ones() as usize != size {
                    continue;
                }
                if let Some(g) = self.subset_factor(mask, &divisors)? {
                    return Err(Error::NotIrreducible(format!("factor with coefficients {g:?}")));
                }
            }
        }
        Ok(())
    }

    /// Integer factor of `f` whose roots are exactly the subset `mask`, if any.
    fn subset_factor(&self, mask: u32, divisors: &[BigInt]) -> Result<Option<IntPoly>> {
        let d = self.degree();
        for prec in precision_ladder(start_precision()) {
            let roots: Vec<Interval> = (0..d)
                .filter(|j| mask & (1 << j) != 0)
                .map(|j| self.root_enclosure(j, prec))
                .collect::<Result<_>>()?;
            // prod (x - r_i), coefficients lowest first
            let mut prod = vec![Interval::from_int(1)];
            for r in &roots {
                let mut next = vec![Interval::from_int(0); prod.len() + 1];
                for (i, c) in prod.iter().enumerate() {
                    next[i + 1] = next[i + 1].add(c, prec + 64);
                    next[i] = next[i].sub(&c.mul(r, prec + 64), prec + 64);
                }
                prod = next;
            }
            let mut ambiguous = false;
            for a in divisors {
                let mut cand = Vec::with_capacity(prod.len());
                let mut possible = true;
                for c in &prod {
                    let iv = c.mul_int(a, prec + 64);
                    let lo = iv.lo().ceil();
                    let hi = iv.hi().floor();
                    if lo > hi {
                        possible = false;
                        break;
                    }
                    if lo != hi {
                        ambiguous = true;
                        possible = false;
                        break;
                    }
                    cand.push(lo);
                }
                if possible && poly::divides(&cand, &self.min_poly) {
                    return Ok(Some(cand));
                }
            }
            if !ambiguous {
                return Ok(None);
            }
        }
        Err(Error::exhausted(MAX_PRECISION_BITS, "irreducibility check"))
    }
}

fn positive_divisors(n: &BigInt) -> Result<Vec<BigInt>> {
    let v = n.to_u64().filter(|&v| v <= 1_000_000_000_000).ok_or_else(|| Error::DegenerateInput("leading coefficient too large".into()))?;
    let mut out = Vec::new();
    let mut i = 1u64;
    while i * i <= v {
        if v % i == 0 {
            out.push(BigInt::from(i));
            if i * i != v {
                out.push(BigInt::from(v / i));
            }
        }
        i += 1;
    }
    out.sort();
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sqrt2_field_roots() {
        let k = make_field(&[-2, 0, 1]).unwrap();
        assert_eq!(k.degree(), 2);
        let r = k.roots_f64();
        assert!((r[0] + 2f64.sqrt()).abs() < 1e-15);
        assert!((r[1] - 2f64.sqrt()).abs() < 1e-15);
        assert_eq!(k.identity_index(), 1);
    }

    #[test]
    fn rejects_bad_inputs() {
        assert!(matches!(make_field(&[1, 0, 1]), Err(Error::NotTotallyReal { .. })));
        assert!(matches!(make_field(&[1, 1]), Err(Error::DegenerateInput(_))));
        assert!(matches!(make_field(&[-1, 0, 0, 1, 0]), Err(Error::DegenerateInput(_))));
        // (x^2 - 2)(x^2 - 3): no rational roots, reducible
        assert!(matches!(make_field(&[6, 0, -5, 0, 1]), Err(Error::NotIrreducible(_))));
        // (x - 1)(x^2 - 2): rational root found during isolation or subset search
        assert!(matches!(make_field(&[2, -2, -1, 1]), Err(Error::NotIrreducible(_))));
        assert!(matches!(make_field(&[1, -2, 1]), Err(Error::NotIrreducible(_))));
    }

    #[test]
    fn non_monic_reducible_detected() {
        // (2x - 1)(3x^2 - 5) = 6x^3 - 3x^2 - 10x + 5
        assert!(matches!(make_field(&[5, -10, -3, 6]), Err(Error::NotIrreducible(_))));
        // 2x^2 - 3 is irreducible
        assert!(make_field(&[-3, 0, 2]).is_ok());
    }

    #[test]
    fn refinement_nests() {
        let k = make_field(&[-1, -2, 1, 1]).unwrap();
        let coarse = k.root_enclosure(0, 20).unwrap();
        let fine = k.root_enclosure(0, 300).unwrap();
        assert!(fine.within(&coarse));
        assert!(fine.radius_le_pow2(300));
    }

    #[test]
    fn discriminants() {
        assert_eq!(make_field(&[-2, 0, 1]).unwrap().discriminant(), Rational::from_integer(8.into()));
        assert_eq!(make_field(&[-1, -2, 1, 1]).unwrap().discriminant(), Rational::from_integer(49.into()));
    }
}
