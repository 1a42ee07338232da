//! Best approximations `(p_k, q_k)` of a vector `v`, their directional
//! lattices, displacement vectors and congruence data.
//!
//! The recursion is exact: `q_{k+1}` is the least `q > q_k` whose nearest
//! integer vector is strictly closer to `q v` than the previous record.
//! Candidate denominators are found by enumerating short vectors of the
//! lattice `{((q v - p) / R, q / Q)}`, which contains every `(p, q)` with
//! `q <= Q` and error below `R`; each candidate is then certified by
//! interval comparison with an exact fallback.

mod target;

use std::collections::{BTreeMap, BTreeSet};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::interval::{ldexp, Interval};
use crate::io::fmt_rational;
use crate::lattice::{enumerate_short, hnf_rational, lll_big, mat_mul, LatticeBasis, Norm, DEFAULT_DELTA};
use crate::linalg;
use crate::scalar::Rational;

pub use target::{build_target_from_field, is_primitive, nth_root_enclosure, Coordinate, TargetVector, GENERIC_BITS};
use target::{Candidate, Evaluator};

/// Where to stop the recursion.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Limit {
    /// All records with `q_k <= max_q`.
    MaxQ(BigInt),
    /// The first `k` records.
    MaxK(usize),
}

/// Candidate search method.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Strategy {
    /// Short-vector enumeration in a rescaled lattice (default).
    #[default]
    Lattice,
    /// Test every `q` in turn.
    Scan,
}

/// Directional lattice `q^(1/n) * (Z^n + Z p/q)`, with the scalar kept
/// symbolic: `hnf` is the exact HNF basis of the unscaled lattice.
#[derive(Debug, Clone, PartialEq)]
pub struct DirectionalLattice {
    pub q: BigInt,
    pub hnf: Vec<Vec<Rational>>,
}

impl DirectionalLattice {
    pub fn dim(&self) -> usize {
        self.hnf.len()
    }

    /// Exact covolume `q |det hnf|`.
    pub fn covolume_exact(&self) -> Rational {
        Rational::from_integer(self.q.clone()) * linalg::det(&self.hnf).abs()
    }

    /// Exact scaled basis, available when `q` is a perfect `n`-th power
    /// (always for `n = 1`).
    pub fn exact_basis(&self) -> Option<LatticeBasis<Rational>> {
        let n = self.dim() as u32;
        let r = self.q.nth_root(n);
        if num_traits::pow(r.clone(), n as usize) != self.q {
            return None;
        }
        let s = Rational::from_integer(r);
        let rows = self.hnf.iter().map(|row| row.iter().map(|x| x * &s).collect()).collect();
        LatticeBasis::new(rows).ok()
    }

    /// Float basis with the scalar evaluated.
    pub fn to_basis(&self) -> Result<LatticeBasis<f64>> {
        let n = self.dim();
        let s = root_f64(&self.q, n);
        let rows: Vec<Vec<f64>> = self.hnf.iter().map(|row| row.iter().map(|x| ToPrimitive::to_f64(x).unwrap_or(f64::NAN) * s).collect()).collect();
        let scale = rows.iter().flatten().fold(0.0f64, |m, x| m.max(x.abs()));
        Ok(LatticeBasis::new(rows)?.with_radius(scale * 4.0 * f64::EPSILON))
    }

    /// HNF entries row-major as exact rational strings.
    pub fn hnf_strings(&self) -> Vec<String> {
        self.hnf.iter().flatten().map(fmt_rational).collect()
    }
}

/// One best approximation.
#[derive(Debug, Clone)]
pub struct BestApproxRecord {
    pub k: usize,
    pub q: BigInt,
    pub p: Vec<BigInt>,
    /// Enclosure of `|q v - p|` in the target norm.
    pub err: Interval,
    /// Enclosures of the coordinates of `q v - p`.
    pub errors: Vec<Interval>,
    /// `q^(1/n) (q v - p)`, relative accuracy near `2^-50`.
    pub w: Vec<f64>,
    pub lambda: DirectionalLattice,
    pub residues: BTreeMap<u64, (Vec<u64>, u64)>,
}

impl BestApproxRecord {
    pub fn err_f64(&self) -> f64 {
        self.err.to_f64()
    }

    pub fn w_norm(&self, norm: Norm) -> f64 {
        norm.of(&self.w)
    }

    pub fn with_residues(mut self, moduli: &[u64]) -> Self {
        self.residues = residues(&self.p, &self.q, moduli);
        self
    }
}

/// `q^(1/n)` as a float, valid for huge `q`.
fn root_f64(q: &BigInt, n: usize) -> f64 {
    let bits = q.bits() as i64;
    let shift = (bits - 60).max(0);
    let top = (q >> shift as usize).to_f64().unwrap_or(f64::NAN);
    let l = top.log2() + shift as f64;
    (l / n as f64).exp2()
}

/// Best approximations of `v` up to `limit`.
pub fn best_approximations(v: &TargetVector, limit: &Limit) -> Result<Vec<BestApproxRecord>> {
    best_approximations_with(v, limit, Strategy::Lattice)
}

pub fn best_approximations_with(v: &TargetVector, limit: &Limit, strategy: Strategy) -> Result<Vec<BestApproxRecord>> {
    match limit {
        Limit::MaxQ(m) if !m.is_positive() => return Err(Error::Precondition("max_q must be positive".into())),
        Limit::MaxK(0) => return Err(Error::Precondition("max_k must be positive".into())),
        _ => {}
    }
    let mut ev = Evaluator::new(v);
    let cands = match strategy {
        Strategy::Lattice => lattice_search(&mut ev, limit)?,
        Strategy::Scan => scan_search(&mut ev, limit)?,
    };
    cands.into_iter().enumerate().map(|(i, c)| make_record(i + 1, c, v.norm())).collect()
}

fn make_record(k: usize, c: Candidate, norm: Norm) -> Result<BestApproxRecord> {
    let lambda = directional_lattice(&c.p, &c.q)?;
    let n = c.p.len();
    let s = root_f64(&c.q, n);
    let w = c.x.iter().map(|x| x.to_f64() * s).collect();
    let err = c.err(norm, 128);
    Ok(BestApproxRecord { k, q: c.q, p: c.p, err, errors: c.x, w, lambda, residues: BTreeMap::new() })
}

fn limit_reached(limit: &Limit, count: usize, covered: &BigInt) -> bool {
    match limit {
        Limit::MaxK(k) => count >= *k,
        Limit::MaxQ(m) => covered >= m,
    }
}

fn scan_search(ev: &mut Evaluator, limit: &Limit) -> Result<Vec<Candidate>> {
    let mut recs = vec![ev.candidate(&BigInt::one())?];
    let mut q = BigInt::one();
    while !limit_reached(limit, recs.len(), &q) {
        q += 1;
        check_horizon(ev.target(), &q)?;
        let c = ev.candidate(&q)?;
        if ev.strictly_better(&c, recs.last().expect("nonempty"))? {
            recs.push(c);
        }
    }
    Ok(recs)
}

fn check_horizon(v: &TargetVector, q: &BigInt) -> Result<()> {
    if let Some(h) = v.horizon_log2() {
        if q.bits() as f64 - 1.0 > h {
            return Err(Error::exhausted(v.generic_bits().unwrap_or(0), format!("generic target horizon 2^{h:.0} passed")));
        }
    }
    Ok(())
}

/// Fixed-point scale of the search lattice.
const FIXED_BITS: i64 = 80;

fn lattice_search(ev: &mut Evaluator, limit: &Limit) -> Result<Vec<Candidate>> {
    let n = ev.target().dim();
    let norm = ev.target().norm();
    let mut recs = vec![ev.candidate(&BigInt::one())?];
    let mut basis: Vec<Vec<BigInt>> = (0..=n).map(|i| (0..=n).map(|j| BigInt::from((i == j) as i64)).collect()).collect();
    let mut covered = BigInt::one();
    while !limit_reached(limit, recs.len(), &covered) {
        let mut qmax: BigInt = &covered * 2;
        if let Limit::MaxQ(m) = limit {
            if &qmax > m {
                qmax = m.clone();
            }
        }
        check_horizon(ev.target(), &qmax)?;
        let last = recs.last().expect("nonempty").clone();
        let r_hi = last.err(norm, 128).hi().clone();
        let qs = window_candidates(ev, &mut basis, &r_hi, &qmax, norm)?;
        for q in qs.range((std::ops::Bound::Excluded(last.q.clone()), std::ops::Bound::Included(qmax.clone()))) {
            let c = ev.candidate(q)?;
            if ev.strictly_better(&c, recs.last().expect("nonempty"))? {
                recs.push(c);
                if let Limit::MaxK(k) = limit {
                    if recs.len() >= *k {
                        break;
                    }
                }
            }
        }
        covered = qmax;
    }
    Ok(recs)
}

/// Every `q <= qmax` whose error may be below `r_hi` (a superset; the caller
/// certifies). `basis` holds the integer vectors `(p, q)` of the current
/// reduced basis and is updated in place.
fn window_candidates(ev: &mut Evaluator, basis: &mut Vec<Vec<BigInt>>, r_hi: &crate::interval::Dyadic, qmax: &BigInt, norm: Norm) -> Result<BTreeSet<BigInt>> {
    let n = basis.len() - 1;
    let e_r = r_hi.ilog2().ok_or_else(|| Error::DegenerateInput("zero approximation error".into()))?;
    let rho = r_hi.shl(-e_r).to_f64() * (1.0 + 1e-12);
    let e_q = qmax.bits() as i64;
    let q_bits = basis.iter().map(|r| r[n].bits()).max().unwrap_or(1).max(qmax.bits()) as i64;
    let prec = q_bits + FIXED_BITS + 40 - e_r;
    let v = ev.fixed_coords(prec as u32)?;
    let shift = (prec + e_r - FIXED_BITS) as usize;
    let rows: Vec<Vec<BigInt>> = basis
        .iter()
        .map(|row| {
            let q = &row[n];
            let mut out: Vec<BigInt> = (0..n).map(|i| (q * &v[i] - (&row[i] << prec as usize)) >> shift).collect();
            let s = FIXED_BITS - e_q;
            out.push(if s >= 0 { q << s as usize } else { q >> (-s) as usize });
            out
        })
        .collect();
    let red = lll_big(rows, DEFAULT_DELTA);
    *basis = mat_mul(&red.transform, basis);
    let frows: Vec<Vec<f64>> = red.rows.iter().map(|r| r.iter().map(|x| ldexp(x.to_f64().unwrap_or(f64::NAN), -FIXED_BITS)).collect()).collect();
    let r2 = match norm {
        Norm::Sup => n as f64 * rho * rho + 1.0,
        Norm::Euclidean => rho * rho + 1.0,
    } * (1.0 + 1e-6);
    let mut out = BTreeSet::new();
    let complete = enumerate_short(&frows, r2, &mut |x| {
        let mut q = BigInt::zero();
        for (c, row) in x.iter().zip(basis.iter()) {
            if *c != 0 {
                q += &row[n] * *c;
            }
        }
        let q = q.abs();
        if !q.is_zero() && &q <= qmax {
            out.insert(q);
        }
    });
    if !complete {
        return Err(Error::Precondition("candidate enumeration cap reached".into()));
    }
    Ok(out)
}

/// Exact directional lattice of a primitive `(p, q)`.
pub fn directional_lattice(p: &[BigInt], q: &BigInt) -> Result<DirectionalLattice> {
    if !q.is_positive() || !is_primitive(p, q) {
        return Err(Error::NotPrimitive);
    }
    let n = p.len();
    let mut gens: Vec<Vec<Rational>> = (0..n).map(|i| (0..n).map(|j| if i == j { Rational::one() } else { Rational::zero() }).collect()).collect();
    gens.push(p.iter().map(|pi| -Rational::new(pi.clone(), q.clone())).collect());
    Ok(DirectionalLattice { q: q.clone(), hnf: hnf_rational(&gens) })
}

/// Certified enclosure of `q^(1/n) (q v - p)` with radius at most `2^-bits`
/// relative to its magnitude scale.
pub fn displacement(rec: &BestApproxRecord, v: &TargetVector, bits: u32) -> Result<Vec<Interval>> {
    if rec.p.len() != v.dim() {
        return Err(Error::DegenerateInput("record and target dimensions differ".into()));
    }
    let mut ev = Evaluator::new(v);
    let qb = rec.q.bits() as u32;
    let prec = bits + 2 * qb + 64;
    let root = nth_root_enclosure(&rec.q, v.dim(), bits + qb + 16);
    let vs = ev.coords_at(prec)?.to_vec();
    Ok(vs
        .iter()
        .zip(&rec.p)
        .map(|(vi, pi)| vi.mul_int(&rec.q, prec + qb).sub(&Interval::from_int(pi.clone()), prec + qb).mul(&root, prec + qb))
        .collect())
}

/// `(p mod M, q mod M)` for each modulus, residues in `[0, M)`.
pub fn residues(p: &[BigInt], q: &BigInt, moduli: &[u64]) -> BTreeMap<u64, (Vec<u64>, u64)> {
    moduli
        .iter()
        .filter(|&&m| m > 0)
        .map(|&m| {
            let mb = BigInt::from(m);
            let r = |x: &BigInt| x.mod_floor(&mb).to_u64().expect("residue fits");
            (m, (p.iter().map(r).collect(), r(q)))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numfield::{make_field, quadratic_field};

    fn sqrt2_minus_1() -> TargetVector {
        let f = quadratic_field(2).unwrap();
        TargetVector::algebraic(vec![&f.generator() - &f.int(1)], Norm::Sup).unwrap()
    }

    fn qs(recs: &[BestApproxRecord]) -> Vec<i64> {
        recs.iter().map(|r| r.q.to_i64().unwrap()).collect()
    }

    #[test]
    fn sqrt2_sequence() {
        let v = sqrt2_minus_1();
        let recs = best_approximations(&v, &Limit::MaxQ(200.into())).unwrap();
        assert_eq!(qs(&recs), vec![1, 2, 5, 12, 29, 70, 169]);
        let scan = best_approximations_with(&v, &Limit::MaxQ(200.into()), Strategy::Scan).unwrap();
        assert_eq!(qs(&scan), qs(&recs));
    }

    #[test]
    fn displacement_value() {
        let v = sqrt2_minus_1();
        let recs = best_approximations(&v, &Limit::MaxK(3)).unwrap();
        let r = &recs[2];
        assert_eq!(r.q, 5.into());
        assert_eq!(r.p, vec![BigInt::from(2)]);
        let w = displacement(r, &v, 80).unwrap();
        let expect = 25.0 * 2f64.sqrt() - 35.0;
        assert!((w[0].to_f64() - expect).abs() < 1e-14);
        assert!((r.w[0] - expect).abs() < 1e-14);
    }

    #[test]
    fn rational_rejected() {
        let f = quadratic_field(2).unwrap();
        assert!(matches!(TargetVector::algebraic(vec![f.rational(crate::scalar::rational(1, 2))], Norm::Sup), Err(Error::RationalCoordinate(0))));
    }

    #[test]
    fn cubic_records_are_consistent() {
        let f = make_field(&[-1, -2, 1, 1]).unwrap();
        let b = f.generator();
        let v = build_target_from_field(&f, &[b.clone(), &b * &b], true, Norm::Sup).unwrap();
        let recs = best_approximations(&v, &Limit::MaxQ(5000.into())).unwrap();
        let scan = best_approximations_with(&v, &Limit::MaxQ(5000.into()), Strategy::Scan).unwrap();
        assert_eq!(qs(&recs), qs(&scan));
        for r in &recs {
            assert_eq!(r.lambda.covolume_exact(), Rational::one());
        }
    }

    #[test]
    fn directional_lattice_examples() {
        let l = directional_lattice(&[1.into(), 1.into()], &2.into()).unwrap();
        assert_eq!(l.covolume_exact(), Rational::one());
        assert!(matches!(directional_lattice(&[2.into()], &4.into()), Err(Error::NotPrimitive)));
        let z = directional_lattice(&[2.into()], &5.into()).unwrap();
        assert_eq!(z.exact_basis().unwrap().rows(), &[vec![Rational::one()]]);
    }

    #[test]
    fn residue_map() {
        let r = residues(&[3.into(), 4.into()], &7.into(), &[4]);
        assert_eq!(r[&4], (vec![3, 0], 3));
        let r = residues(&[2.into()], &5.into(), &[3]);
        assert_eq!(r[&3], (vec![2], 2));
    }
}
