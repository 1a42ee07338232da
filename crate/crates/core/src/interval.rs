//! Dyadic numbers and outward-rounded interval arithmetic.
//!
//! A [`Dyadic`] is an exact value `mant * 2^exp`. An [`Interval`] is a pair of
//! dyadic endpoints; every operation takes a working precision in bits and
//! rounds the lower endpoint down and the upper endpoint up, so the true
//! result is always enclosed.

use std::cmp::Ordering;
use std::fmt;
use std::sync::OnceLock;

use num_bigint::{BigInt, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// Default starting precision for adaptive computations.
pub const DEFAULT_PRECISION_BITS: u32 = 256;
/// Hard cap for adaptive precision doubling.
pub const MAX_PRECISION_BITS: u32 = 8192;

/// Starting precision, overridable with `ORBITLAB_PRECISION_BITS`.
pub fn start_precision() -> u32 {
    static START: OnceLock<u32> = OnceLock::new();
    *START.get_or_init(|| {
        std::env::var("ORBITLAB_PRECISION_BITS")
            .ok()
            .and_then(|s| s.trim().parse::<u32>().ok())
            .filter(|&b| (53..=MAX_PRECISION_BITS).contains(&b))
            .unwrap_or(DEFAULT_PRECISION_BITS)
    })
}

/// Precision ladder: `start, 2*start, ...` up to [`MAX_PRECISION_BITS`].
pub fn precision_ladder(start: u32) -> impl Iterator<Item = u32> {
    let mut next = Some(start.clamp(53, MAX_PRECISION_BITS));
    std::iter::from_fn(move || {
        let cur = next?;
        next = if cur >= MAX_PRECISION_BITS { None } else { Some((cur * 2).min(MAX_PRECISION_BITS)) };
        Some(cur)
    })
}

/// Multiply `x` by `2^k` without intermediate overflow.
pub fn ldexp(mut x: f64, mut k: i64) -> f64 {
    while k > 1000 {
        x *= 2f64.powi(1000);
        k -= 1000;
        if x.is_infinite() {
            return x;
        }
    }
    while k < -1000 {
        x *= 2f64.powi(-1000);
        k += 1000;
        if x == 0.0 {
            return x;
        }
    }
    x * 2f64.powi(k as i32)
}

/// Exact binary fraction `mant * 2^exp`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Dyadic {
    mant: BigInt,
    exp: i64,
}

impl Dyadic {
    pub fn new(mant: BigInt, exp: i64) -> Self {
        let mut d = Dyadic { mant, exp };
        d.normalize();
        d
    }

    pub fn zero() -> Self {
        Dyadic { mant: BigInt::zero(), exp: 0 }
    }

    pub fn from_int(n: impl Into<BigInt>) -> Self {
        Dyadic::new(n.into(), 0)
    }

    /// Exact conversion; panics on non-finite input.
    pub fn from_f64(x: f64) -> Self {
        assert!(x.is_finite(), "non-finite f64 {x}");
        if x == 0.0 {
            return Dyadic::zero();
        }
        let bits = x.to_bits();
        let sign = if bits >> 63 == 0 { 1i64 } else { -1 };
        let exp_bits = ((bits >> 52) & 0x7ff) as i64;
        let frac = bits & ((1u64 << 52) - 1);
        let (m, e) = if exp_bits == 0 { (frac, -1074) } else { (frac | (1u64 << 52), exp_bits - 1075) };
        Dyadic::new(BigInt::from(m) * sign, e)
    }

    pub fn mant(&self) -> &BigInt {
        &self.mant
    }

    pub fn exp(&self) -> i64 {
        self.exp
    }

    fn normalize(&mut self) {
        if self.mant.is_zero() {
            self.exp = 0;
            return;
        }
        let tz = self.mant.trailing_zeros().unwrap_or(0);
        if tz > 0 {
            self.mant >>= tz as usize;
            self.exp += tz as i64;
        }
    }

    pub fn is_zero(&self) -> bool {
        self.mant.is_zero()
    }

    pub fn signum(&self) -> i32 {
        match self.mant.sign() {
            Sign::Minus => -1,
            Sign::NoSign => 0,
            Sign::Plus => 1,
        }
    }

    pub fn abs(&self) -> Self {
        Dyadic { mant: self.mant.abs(), exp: self.exp }
    }

    /// Scale by `2^k` (exact).
    pub fn shl(&self, k: i64) -> Self {
        Dyadic { mant: self.mant.clone(), exp: if self.mant.is_zero() { 0 } else { self.exp + k } }
    }

    /// Number of significant bits of the mantissa.
    pub fn bits(&self) -> u64 {
        self.mant.bits()
    }

    /// `floor(log2 |x|)`, or `None` for zero.
    pub fn ilog2(&self) -> Option<i64> {
        if self.is_zero() {
            None
        } else {
            Some(self.mant.bits() as i64 - 1 + self.exp)
        }
    }

    pub fn to_f64(&self) -> f64 {
        if self.mant.is_zero() {
            return 0.0;
        }
        let a = self.mant.magnitude();
        let b = a.bits() as i64;
        let shift = (b - 64).max(0);
        let top = (a >> shift as usize).to_u64().unwrap() as f64;
        let v = ldexp(top, self.exp + shift);
        if self.mant.is_negative() {
            -v
        } else {
            v
        }
    }

    /// `log2 |x|` as a float (−inf for zero).
    pub fn log2_abs(&self) -> f64 {
        if self.mant.is_zero() {
            return f64::NEG_INFINITY;
        }
        let a = self.mant.magnitude();
        let b = a.bits() as i64;
        let shift = (b - 64).max(0);
        let top = (a >> shift as usize).to_u64().unwrap() as f64;
        top.log2() + (self.exp + shift) as f64
    }

    pub fn to_rational(&self) -> BigRational {
        if self.exp >= 0 {
            BigRational::from_integer(&self.mant << self.exp as usize)
        } else {
            BigRational::new(self.mant.clone(), BigInt::one() << (-self.exp) as usize)
        }
    }

    /// Integer `floor(x * 2^k)`.
    pub fn floor_scaled(&self, k: i64) -> BigInt {
        let e = self.exp + k;
        if e >= 0 {
            &self.mant << e as usize
        } else {
            self.mant.div_floor(&(BigInt::one() << (-e) as usize))
        }
    }

    pub fn floor(&self) -> BigInt {
        self.floor_scaled(0)
    }

    pub fn ceil(&self) -> BigInt {
        -(self.neg().floor())
    }

    /// Nearest integer, ties rounded up.
    pub fn round(&self) -> BigInt {
        self.add(&Dyadic::new(BigInt::one(), -1)).floor()
    }

    pub fn neg(&self) -> Self {
        Dyadic { mant: -&self.mant, exp: self.exp }
    }

    pub fn add(&self, o: &Self) -> Self {
        if self.is_zero() {
            return o.clone();
        }
        if o.is_zero() {
            return self.clone();
        }
        let e = self.exp.min(o.exp);
        let a = &self.mant << (self.exp - e) as usize;
        let b = &o.mant << (o.exp - e) as usize;
        Dyadic::new(a + b, e)
    }

    pub fn sub(&self, o: &Self) -> Self {
        self.add(&o.neg())
    }

    pub fn mul(&self, o: &Self) -> Self {
        Dyadic::new(&self.mant * &o.mant, self.exp + o.exp)
    }

    pub fn mul_int(&self, n: &BigInt) -> Self {
        Dyadic::new(&self.mant * n, self.exp)
    }

    fn round_dir(&self, prec: u32, up: bool) -> Self {
        let b = self.mant.bits();
        if b <= prec as u64 {
            return self.clone();
        }
        let shift = (b - prec as u64) as usize;
        let d = BigInt::one() << shift;
        let m = if up { -((-&self.mant).div_floor(&d)) } else { self.mant.div_floor(&d) };
        Dyadic::new(m, self.exp + shift as i64)
    }

    /// Round toward −∞ keeping `prec` significant bits.
    pub fn round_down(&self, prec: u32) -> Self {
        self.round_dir(prec, false)
    }

    /// Round toward +∞ keeping `prec` significant bits.
    pub fn round_up(&self, prec: u32) -> Self {
        self.round_dir(prec, true)
    }

    /// Shortest-ish scientific rendering with `digits` significant digits.
    pub fn to_sci_string(&self, digits: usize) -> String {
        let f = self.to_f64();
        if f.is_finite() && f != 0.0 && f.abs() > 1e-300 && f.abs() < 1e300 {
            return crate::io::fmt_f64(f);
        }
        if self.is_zero() {
            return "0".into();
        }
        // Exact decimal digits via big-integer arithmetic.
        let l10 = self.log2_abs() * std::f64::consts::LOG10_2;
        let e10 = l10.floor() as i64;
        let scale = digits as i64 - 1 - e10;
        let r = self.abs().to_rational();
        let ten = BigInt::from(10);
        let scaled = if scale >= 0 {
            r * BigRational::from_integer(num_traits::pow(ten.clone(), scale as usize))
        } else {
            r / BigRational::from_integer(num_traits::pow(ten.clone(), (-scale) as usize))
        };
        let n = scaled.round().to_integer();
        let mut s = n.to_string();
        let mut exp10 = -scale;
        while s.len() > 1 && s.ends_with('0') {
            s.pop();
            exp10 += 1;
        }
        let e = exp10 + s.len() as i64 - 1;
        let body = if s.len() > 1 { format!("{}.{}", &s[..1], &s[1..]) } else { s };
        format!("{}{}e{}", if self.signum() < 0 { "-" } else { "" }, body, e)
    }
}

impl PartialOrd for Dyadic {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Dyadic {
    fn cmp(&self, other: &Self) -> Ordering {
        let d = self.sub(other);
        d.signum().cmp(&0)
    }
}

impl fmt::Display for Dyadic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_sci_string(17))
    }
}

/// Closed interval `[lo, hi]` with dyadic endpoints.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Interval {
    lo: Dyadic,
    hi: Dyadic,
}

impl Interval {
    pub fn new(lo: Dyadic, hi: Dyadic) -> Self {
        debug_assert!(lo <= hi, "inverted interval");
        Interval { lo, hi }
    }

    pub fn point(x: Dyadic) -> Self {
        Interval { lo: x.clone(), hi: x }
    }

    pub fn from_int(n: impl Into<BigInt>) -> Self {
        Interval::point(Dyadic::from_int(n))
    }

    pub fn from_f64(x: f64) -> Self {
        Interval::point(Dyadic::from_f64(x))
    }

    /// Enclosure of a rational with `prec` significant bits.
    pub fn from_rational(r: &BigRational, prec: u32) -> Self {
        if r.denom().is_one() {
            return Interval::from_int(r.numer().clone());
        }
        let den_pow2 = r.denom().trailing_zeros().unwrap_or(0);
        if (r.denom() >> den_pow2 as usize).is_one() {
            return Interval::point(Dyadic::new(r.numer().clone(), -(den_pow2 as i64)));
        }
        // floor(r * 2^k) / 2^k with k giving `prec` bits of the quotient.
        let nb = r.numer().bits() as i64;
        let db = r.denom().bits() as i64;
        let k = prec as i64 - (nb - db) + 2;
        let num = if k >= 0 { r.numer() << k as usize } else { r.numer() >> (-k) as usize };
        let (q, rem) = if k >= 0 {
            num.div_mod_floor(r.denom())
        } else {
            // k < 0 only for huge rationals; bracket conservatively.
            (num.div_floor(r.denom()), BigInt::one())
        };
        let lo = Dyadic::new(q.clone(), -k);
        let hi = if rem.is_zero() && k >= 0 { lo.clone() } else { Dyadic::new(q + 2, -k) };
        Interval { lo, hi }
    }

    pub fn lo(&self) -> &Dyadic {
        &self.lo
    }

    pub fn hi(&self) -> &Dyadic {
        &self.hi
    }

    pub fn mid(&self) -> Dyadic {
        self.lo.add(&self.hi).shl(-1)
    }

    pub fn width(&self) -> Dyadic {
        self.hi.sub(&self.lo)
    }

    /// `log2` of the radius (−inf for points).
    pub fn radius_log2(&self) -> f64 {
        self.width().log2_abs() - 1.0
    }

    /// Radius is at most `2^-bits`.
    pub fn radius_le_pow2(&self, bits: i64) -> bool {
        let w = self.width();
        match w.ilog2() {
            None => true,
            Some(l) => l - 1 < -bits || (l - 1 == -bits && w.shl(-1) <= Dyadic::new(BigInt::one(), -bits)),
        }
    }

    pub fn contains_zero(&self) -> bool {
        self.lo.signum() <= 0 && self.hi.signum() >= 0
    }

    pub fn contains(&self, x: &Dyadic) -> bool {
        &self.lo <= x && x <= &self.hi
    }

    /// Certified sign, or `None` if the interval straddles zero.
    pub fn sign(&self) -> Option<Ordering> {
        if self.lo.signum() > 0 {
            Some(Ordering::Greater)
        } else if self.hi.signum() < 0 {
            Some(Ordering::Less)
        } else if self.lo.is_zero() && self.hi.is_zero() {
            Some(Ordering::Equal)
        } else {
            None
        }
    }

    /// Certified comparison, `None` if the intervals overlap (and are not equal points).
    pub fn cmp_certified(&self, o: &Interval) -> Option<Ordering> {
        if self.hi < o.lo {
            Some(Ordering::Less)
        } else if self.lo > o.hi {
            Some(Ordering::Greater)
        } else if self.lo == self.hi && o.lo == o.hi && self.lo == o.lo {
            Some(Ordering::Equal)
        } else {
            None
        }
    }

    /// Nesting check: `self` is contained in `outer`.
    pub fn within(&self, outer: &Interval) -> bool {
        outer.lo <= self.lo && self.hi <= outer.hi
    }

    pub fn to_f64(&self) -> f64 {
        self.mid().to_f64()
    }

    pub fn neg(&self) -> Self {
        Interval { lo: self.hi.neg(), hi: self.lo.neg() }
    }

    pub fn abs(&self) -> Self {
        if self.lo.signum() >= 0 {
            self.clone()
        } else if self.hi.signum() <= 0 {
            self.neg()
        } else {
            let m = std::cmp::max(self.lo.abs(), self.hi.abs());
            Interval { lo: Dyadic::zero(), hi: m }
        }
    }

    pub fn add(&self, o: &Self, prec: u32) -> Self {
        Interval { lo: self.lo.add(&o.lo).round_down(prec), hi: self.hi.add(&o.hi).round_up(prec) }
    }

    pub fn sub(&self, o: &Self, prec: u32) -> Self {
        self.add(&o.neg(), prec)
    }

    pub fn mul(&self, o: &Self, prec: u32) -> Self {
        let c = [self.lo.mul(&o.lo), self.lo.mul(&o.hi), self.hi.mul(&o.lo), self.hi.mul(&o.hi)];
        let lo = c.iter().min().unwrap().round_down(prec);
        let hi = c.iter().max().unwrap().round_up(prec);
        Interval { lo, hi }
    }

    pub fn mul_int(&self, n: &BigInt, prec: u32) -> Self {
        let a = self.lo.mul_int(n);
        let b = self.hi.mul_int(n);
        let (lo, hi) = if n.is_negative() { (b, a) } else { (a, b) };
        Interval { lo: lo.round_down(prec), hi: hi.round_up(prec) }
    }

    pub fn sqr(&self, prec: u32) -> Self {
        let a = self.abs();
        Interval { lo: a.lo.mul(&a.lo).round_down(prec), hi: a.hi.mul(&a.hi).round_up(prec) }
    }

    /// Exact scaling by `2^k`.
    pub fn shl(&self, k: i64) -> Self {
        Interval { lo: self.lo.shl(k), hi: self.hi.shl(k) }
    }

    pub fn max(&self, o: &Self) -> Self {
        Interval { lo: std::cmp::max(self.lo.clone(), o.lo.clone()), hi: std::cmp::max(self.hi.clone(), o.hi.clone()) }
    }

    pub fn min(&self, o: &Self) -> Self {
        Interval { lo: std::cmp::min(self.lo.clone(), o.lo.clone()), hi: std::cmp::min(self.hi.clone(), o.hi.clone()) }
    }

    /// Reciprocal; `None` if the interval contains zero.
    pub fn recip(&self, prec: u32) -> Option<Self> {
        if self.contains_zero() {
            return None;
        }
        Some(Interval { lo: div_round(&Dyadic::from_int(1), &self.hi, prec, false), hi: div_round(&Dyadic::from_int(1), &self.lo, prec, true) })
    }

    pub fn div(&self, o: &Self, prec: u32) -> Option<Self> {
        let r = o.recip(prec + 8)?;
        Some(self.mul(&r, prec))
    }

    /// Square root of the non-negative part.
    pub fn sqrt(&self, prec: u32) -> Self {
        let lo = if self.lo.signum() <= 0 { Dyadic::zero() } else { sqrt_round(&self.lo, prec, false) };
        let hi = if self.hi.signum() <= 0 { Dyadic::zero() } else { sqrt_round(&self.hi, prec, true) };
        Interval { lo, hi }
    }
}

fn div_round(a: &Dyadic, b: &Dyadic, prec: u32, up: bool) -> Dyadic {
    // a / b = (a.m * 2^k / b.m) * 2^(a.e - b.e - k)
    let k = prec as i64 + b.mant.bits() as i64 - a.mant.bits() as i64 + 2;
    let k = k.max(0);
    let num = &a.mant << k as usize;
    let q = if up { -((-&num).div_floor(&b.mant)) } else { num.div_floor(&b.mant) };
    Dyadic::new(q, a.exp - b.exp - k)
}

fn sqrt_round(x: &Dyadic, prec: u32, up: bool) -> Dyadic {
    // x = m 2^e; choose shift s with e - s even and m 2^s having >= 2 prec bits.
    let mut s = (2 * prec as i64 + 4 - x.mant.bits() as i64).max(0);
    if (x.exp - s).rem_euclid(2) != 0 {
        s += 1;
    }
    let m = &x.mant << s as usize;
    let mut r = m.sqrt();
    if up && &r * &r != m {
        r += 1;
    }
    Dyadic::new(r, (x.exp - s) / 2)
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {}]", self.lo, self.hi)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rat(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn f64_roundtrip_is_exact() {
        for x in [0.1, -3.75, 1e-300, 5e-324, 1.7976931348623157e308, 2.0f64.sqrt()] {
            assert_eq!(Dyadic::from_f64(x).to_f64(), x);
        }
    }

    #[test]
    fn rational_enclosure_contains_value() {
        let r = rat(1, 3);
        let i = Interval::from_rational(&r, 100);
        assert!(i.lo().to_rational() <= r && r <= i.hi().to_rational());
        assert!(i.radius_le_pow2(95));
    }

    #[test]
    fn sqrt_two_enclosure() {
        let two = Interval::from_int(2);
        let s = two.sqrt(200);
        assert!(s.radius_le_pow2(195));
        let sq = s.sqr(400);
        assert!(sq.contains(&Dyadic::from_int(2)));
        assert!((s.to_f64() - 2f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn recip_of_zero_straddling_is_none() {
        let i = Interval::new(Dyadic::from_int(-1), Dyadic::from_int(1));
        assert!(i.recip(64).is_none());
        let r = Interval::from_int(3).recip(80).unwrap();
        let back = r.mul(&Interval::from_int(3), 80);
        assert!(back.contains(&Dyadic::from_int(1)));
    }

    #[test]
    fn rounding_is_outward() {
        let x = Dyadic::new(BigInt::from(0b1011_0111), -3);
        assert!(x.round_down(3) <= x && x <= x.round_up(3));
        let y = x.neg();
        assert!(y.round_down(3) <= y && y <= y.round_up(3));
    }

    #[test]
    fn sci_string_for_tiny_values() {
        let x = Dyadic::new(BigInt::from(3), -2000);
        let s = x.to_sci_string(5);
        assert!(s.starts_with("2.6129") && s.ends_with("e-602"), "{s}");
        assert_eq!(Dyadic::from_f64(0.25).to_sci_string(17), "0.25");
    }

    #[test]
    fn ladder_doubles_to_cap() {
        let v: Vec<u32> = precision_ladder(256).collect();
        assert_eq!(v, vec![256, 512, 1024, 2048, 4096, 8192]);
    }
}
