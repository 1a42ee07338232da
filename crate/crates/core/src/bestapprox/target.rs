use std::cmp::Ordering;
use std::sync::Arc;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use rand::Rng;

use crate::error::{Error, Result};
use crate::interval::{precision_ladder, Dyadic, Interval, MAX_PRECISION_BITS};
use crate::lattice::Norm;
use crate::linalg;
use crate::numfield::{AlgebraicNumber, TotallyRealField};
use crate::scalar::Rational;

/// Default bit length of random generic targets.
pub const GENERIC_BITS: u32 = 2048;

#[derive(Debug, Clone)]
pub enum Coordinate {
    Algebraic(AlgebraicNumber),
    /// A dyadic rational standing in for a generic real.
    Generic(Dyadic),
}

impl Coordinate {
    pub fn to_f64(&self) -> f64 {
        match self {
            Coordinate::Algebraic(a) => a.to_f64(),
            Coordinate::Generic(d) => d.to_f64(),
        }
    }
}

/// Vector `v` in `R^{d-1}` whose best approximations are computed.
#[derive(Debug, Clone)]
pub struct TargetVector {
    coords: Vec<Coordinate>,
    norm: Norm,
    generic_bits: Option<u32>,
}

impl TargetVector {
    pub fn algebraic(coords: Vec<AlgebraicNumber>, norm: Norm) -> Result<Self> {
        if coords.is_empty() {
            return Err(Error::DegenerateInput("empty target".into()));
        }
        for (i, c) in coords.iter().enumerate() {
            if c.is_rational() {
                return Err(Error::RationalCoordinate(i));
            }
        }
        let f = coords[0].field().clone();
        if coords.iter().any(|c| !Arc::ptr_eq(c.field(), &f) && **c.field() != *f) {
            return Err(Error::DegenerateInput("coordinates from different fields".into()));
        }
        Ok(TargetVector { coords: coords.into_iter().map(Coordinate::Algebraic).collect(), norm, generic_bits: None })
    }

    /// Dyadic coordinates with at most `bits` fractional bits, declared generic.
    pub fn generic(coords: Vec<Dyadic>, bits: u32, norm: Norm) -> Result<Self> {
        if coords.is_empty() {
            return Err(Error::DegenerateInput("empty target".into()));
        }
        for (i, c) in coords.iter().enumerate() {
            if c.exp() >= 0 {
                return Err(Error::RationalCoordinate(i));
            }
            if c.exp() < -(bits as i64) {
                return Err(Error::Precondition(format!("coordinate {i} needs more than {bits} bits")));
            }
        }
        Ok(TargetVector { coords: coords.into_iter().map(Coordinate::Generic).collect(), norm, generic_bits: Some(bits) })
    }

    /// Uniform random target in `[0,1)^dim` with odd `bits`-bit numerators.
    pub fn random_generic<R: Rng + ?Sized>(dim: usize, bits: u32, norm: Norm, rng: &mut R) -> Self {
        let coords = (0..dim)
            .map(|_| {
                let mut bytes = vec![0u8; bits.div_ceil(8) as usize];
                rng.fill(&mut bytes[..]);
                let m = (BigUint::from_bytes_le(&bytes) >> (bytes.len() * 8 - bits as usize)) | BigUint::one();
                Dyadic::new(BigInt::from(m), -(bits as i64))
            })
            .collect();
        TargetVector { coords: coords_generic(coords), norm, generic_bits: Some(bits) }
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    pub fn norm(&self) -> Norm {
        self.norm
    }

    pub fn with_norm(mut self, norm: Norm) -> Self {
        self.norm = norm;
        self
    }

    pub fn coords(&self) -> &[Coordinate] {
        &self.coords
    }

    pub fn generic_bits(&self) -> Option<u32> {
        self.generic_bits
    }

    pub fn to_f64(&self) -> Vec<f64> {
        self.coords.iter().map(Coordinate::to_f64).collect()
    }

    /// Largest `log2 q` for which a generic target still models a real
    /// vector: the truncation error `q 2^-bits` stays `2^-64` below the
    /// expected approximation error `q^(-1/n)`.
    pub fn horizon_log2(&self) -> Option<f64> {
        self.generic_bits.map(|b| {
            let n = self.dim() as f64;
            (b as f64 - 64.0) * n / (n + 1.0)
        })
    }
}

fn coords_generic(v: Vec<Dyadic>) -> Vec<Coordinate> {
    v.into_iter().map(Coordinate::Generic).collect()
}

/// Target `(g_1, ..., g_{d-1})` from field elements. With `require_span`,
/// `1, g_1, ...` must be a basis of the field over Q.
pub fn build_target_from_field(field: &Arc<TotallyRealField>, generators: &[AlgebraicNumber], require_span: bool, norm: Norm) -> Result<TargetVector> {
    if generators.iter().any(|g| **g.field() != **field) {
        return Err(Error::DegenerateInput("generator from another field".into()));
    }
    if require_span {
        let mut rows = vec![field.int(1).coeffs().to_vec()];
        rows.extend(generators.iter().map(|g| g.coeffs().to_vec()));
        if rows.len() != field.degree() || linalg::rank(&rows) != field.degree() {
            for (i, g) in generators.iter().enumerate() {
                if g.is_rational() {
                    return Err(Error::RationalCoordinate(i));
                }
            }
            return Err(Error::NotSpanning);
        }
    }
    TargetVector::algebraic(generators.to_vec(), norm)
}

/// Exact value of a coordinate error `q v_i - p_i`.
#[derive(Debug, Clone)]
pub(crate) enum Exact {
    Alg(AlgebraicNumber),
    Rat(Rational),
}

impl Exact {
    fn sub(&self, o: &Exact) -> Exact {
        match (self, o) {
            (Exact::Alg(a), Exact::Alg(b)) => Exact::Alg(a - b),
            (Exact::Rat(a), Exact::Rat(b)) => Exact::Rat(a - b),
            _ => unreachable!("mixed coordinate kinds"),
        }
    }

    fn add(&self, o: &Exact) -> Exact {
        match (self, o) {
            (Exact::Alg(a), Exact::Alg(b)) => Exact::Alg(a + b),
            (Exact::Rat(a), Exact::Rat(b)) => Exact::Rat(a + b),
            _ => unreachable!("mixed coordinate kinds"),
        }
    }

    fn sqr(&self) -> Exact {
        match self {
            Exact::Alg(a) => Exact::Alg(a * a),
            Exact::Rat(a) => Exact::Rat(a * a),
        }
    }

    fn signum(&self) -> Result<Ordering> {
        match self {
            Exact::Alg(a) => a.signum(),
            Exact::Rat(a) => Ok(a.cmp(&Rational::zero())),
        }
    }
}

/// Nearest-integer vector for a given `q` with certified error enclosures.
#[derive(Debug, Clone)]
pub(crate) struct Candidate {
    pub q: BigInt,
    pub p: Vec<BigInt>,
    /// Enclosures of `q v_i - p_i`.
    pub x: Vec<Interval>,
}

impl Candidate {
    /// Enclosure of the norm of the error vector.
    pub fn err(&self, norm: Norm, prec: u32) -> Interval {
        match norm {
            Norm::Sup => self.x.iter().map(|x| x.abs()).reduce(|a, b| a.max(&b)).expect("nonempty"),
            Norm::Euclidean => {
                let s = self.x.iter().map(|x| x.sqr(prec)).reduce(|a, b| a.add(&b, prec)).expect("nonempty");
                s.sqrt(prec)
            }
        }
    }
}

/// Evaluation helper caching coordinate enclosures.
pub(crate) struct Evaluator<'a> {
    target: &'a TargetVector,
    cache_bits: u32,
    cache: Vec<Interval>,
}

impl<'a> Evaluator<'a> {
    pub fn new(target: &'a TargetVector) -> Self {
        Evaluator { target, cache_bits: 0, cache: Vec::new() }
    }

    pub fn target(&self) -> &TargetVector {
        self.target
    }

    /// Coordinate enclosures with radius at most `2^-bits`.
    pub fn coords_at(&mut self, bits: u32) -> Result<&[Interval]> {
        if bits > self.cache_bits || self.cache.is_empty() {
            let bits = bits.max(self.cache_bits * 5 / 4).max(128);
            let mut out = Vec::with_capacity(self.target.dim());
            for c in &self.target.coords {
                out.push(match c {
                    Coordinate::Algebraic(a) => a.real(bits)?,
                    Coordinate::Generic(d) => Interval::point(d.clone()),
                });
            }
            self.cache = out;
            self.cache_bits = bits;
        }
        Ok(&self.cache)
    }

    /// `floor(v_i 2^bits)` up to an error of at most 2 units.
    pub fn fixed_coords(&mut self, bits: u32) -> Result<Vec<BigInt>> {
        let cs = self.coords_at(bits + 2)?;
        Ok(cs.iter().map(|c| c.mid().floor_scaled(bits as i64)).collect())
    }

    /// Nearest integers to `q v` and enclosures of `q v - p` with radius at
    /// most `2^-(bits(q) + 96)`.
    pub fn candidate(&mut self, q: &BigInt) -> Result<Candidate> {
        let qb = q.bits() as u32;
        let mut prec = 2 * qb + 96;
        let n = self.target.dim();
        let mut p = Vec::with_capacity(n);
        let mut x = Vec::with_capacity(n);
        for i in 0..n {
            if let Coordinate::Generic(d) = &self.target.coords[i] {
                let qv = d.mul_int(q);
                let half = Dyadic::new(BigInt::one(), -1);
                let frac = qv.sub(&Dyadic::from_int(qv.floor()));
                if frac == half {
                    return Err(Error::TieUnresolvable(format!("q v_{i} is a half-integer at q = {q}")));
                }
                let pi = qv.round();
                x.push(Interval::point(qv.sub(&Dyadic::from_int(pi.clone()))));
                p.push(pi);
                continue;
            }
            loop {
                if prec > MAX_PRECISION_BITS + 2 * qb + 96 {
                    return Err(Error::exhausted(prec, "nearest integer of q v"));
                }
                let vi = self.coords_at(prec)?[i].clone();
                let qv = vi.mul_int(q, prec + qb + 8);
                let half = Dyadic::new(BigInt::one(), -1);
                let (a, b) = (qv.lo().add(&half).floor(), qv.hi().add(&half).floor());
                if a == b {
                    x.push(qv.sub(&Interval::from_int(a.clone()), prec + qb + 8));
                    p.push(a);
                    break;
                }
                prec *= 2;
            }
        }
        Ok(Candidate { q: q.clone(), p, x })
    }

    pub fn exact_errors(&self, c: &Candidate) -> Vec<Exact> {
        self.target
            .coords
            .iter()
            .zip(&c.p)
            .map(|(v, p)| match v {
                Coordinate::Algebraic(a) => {
                    let qa = a.scale_int(&c.q);
                    Exact::Alg(&qa - &a.field().rational(Rational::from_integer(p.clone())))
                }
                Coordinate::Generic(d) => Exact::Rat(d.mul_int(&c.q).to_rational() - Rational::from_integer(p.clone())),
            })
            .collect()
    }

    /// Certified `|c q v - p| < |r q v - p|` in the target norm.
    pub fn strictly_better(&self, c: &Candidate, r: &Candidate) -> Result<bool> {
        let norm = self.target.norm;
        for prec in precision_ladder(256) {
            let (a, b) = (c.err(norm, prec), r.err(norm, prec));
            match a.cmp_certified(&b) {
                Some(o) => return Ok(o == Ordering::Less),
                None if prec >= 1024 => break,
                None => {}
            }
        }
        let xs: Vec<Exact> = self.exact_errors(c).iter().map(Exact::sqr).collect();
        let ys: Vec<Exact> = self.exact_errors(r).iter().map(Exact::sqr).collect();
        match norm {
            Norm::Euclidean => {
                let sx = xs.iter().skip(1).fold(xs[0].clone(), |acc, v| acc.add(v));
                let sy = ys.iter().skip(1).fold(ys[0].clone(), |acc, v| acc.add(v));
                Ok(sy.sub(&sx).signum()? == Ordering::Greater)
            }
            Norm::Sup => {
                let mut ymax = ys[0].clone();
                for y in &ys[1..] {
                    if y.sub(&ymax).signum()? == Ordering::Greater {
                        ymax = y.clone();
                    }
                }
                for x in &xs {
                    if ymax.sub(x).signum()? != Ordering::Greater {
                        return Ok(false);
                    }
                }
                Ok(true)
            }
        }
    }
}

/// `q^(1/n)` enclosed with radius at most `2^-bits`.
pub fn nth_root_enclosure(q: &BigInt, n: usize, bits: u32) -> Interval {
    let scaled: BigInt = q << (n * bits as usize);
    let r = scaled.nth_root(n as u32);
    let exact = num_traits::pow(r.clone(), n) == scaled;
    let lo = Dyadic::new(r.clone(), -(bits as i64));
    let hi = if exact { lo.clone() } else { Dyadic::new(r + 1, -(bits as i64)) };
    Interval::new(lo, hi)
}

/// Primitive check of `(p, q)`.
pub fn is_primitive(p: &[BigInt], q: &BigInt) -> bool {
    p.iter().fold(q.abs(), |g, x| g.gcd(x)).is_one()
}
