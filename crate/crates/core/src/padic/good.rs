use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{exp_domain, is_prime, modulus, padic_exp, PadicInt};
use crate::error::{Error, Result};
use crate::io::fmt_rational;
use crate::scalar::Rational;

/// Largest number of residues an exhaustive sweep may visit.
pub const ENUMERATION_CAP: u128 = 10_000_000;

const UNRESOLVED: u8 = u8::MAX;

fn p_pow(p: u64, e: i64) -> Rational {
    let b = num_traits::pow(BigInt::from(p), e.unsigned_abs() as usize);
    if e >= 0 {
        Rational::from_integer(b)
    } else {
        Rational::new(BigInt::one(), b)
    }
}

/// A function on `Z_p` of the form `p^-shift F` with `F` integral and
/// 1-Lipschitz, known modulo `p^N`.
pub trait PadicFunction: Sync {
    fn p(&self) -> u64;
    fn precision(&self) -> u32;
    fn shift(&self) -> u32;
    /// `F(s) mod p^N` for `s` given mod `p^N`.
    fn eval_scaled(&self, s: &PadicInt) -> Result<PadicInt>;
    /// Whether `f(0) = 0`; the default only knows the residue.
    fn vanishes_at_zero(&self) -> Result<bool> {
        Ok(self.eval_scaled(&PadicInt::new(self.p(), self.precision(), 0)?)?.is_zero())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TermSpec {
    pub c_num: i64,
    #[serde(default)]
    pub c_den_valuation: u32,
    /// 1-based index into `lambdas`.
    pub i: usize,
    pub l: u32,
}

/// `lambda = unit * p^valuation`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LambdaSpec {
    pub unit: i64,
    pub valuation: u32,
}

/// `f(s) = sum c_{i,l} s^l exp(lambda_i s)` with `c = c_num / p^c_den_valuation`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GoodFunctionSpec {
    pub p: u64,
    #[serde(rename = "N", alias = "precision")]
    pub precision: u32,
    pub terms: Vec<TermSpec>,
    pub lambdas: Vec<LambdaSpec>,
}

impl GoodFunctionSpec {
    /// `f(s) = s^degree`, with `degree + 1` lambdas.
    pub fn monomial(p: u64, precision: u32, degree: u32) -> Self {
        let d = exp_domain(p);
        GoodFunctionSpec {
            p,
            precision,
            terms: vec![TermSpec { c_num: 1, c_den_valuation: 0, i: 1, l: degree }],
            lambdas: (0..=degree as i64).map(|k| LambdaSpec { unit: k, valuation: d }).collect(),
        }
    }

    pub fn n(&self) -> usize {
        self.lambdas.len()
    }

    pub fn validate(&self) -> Result<()> {
        if !is_prime(self.p) {
            return Err(Error::Config(format!("p = {} is not prime", self.p)));
        }
        modulus(self.p, self.precision).map_err(|e| Error::Config(e.to_string()))?;
        if self.precision == 0 {
            return Err(Error::Config("N must be positive".into()));
        }
        let n = self.n();
        if n == 0 {
            return Err(Error::Config("no lambdas".into()));
        }
        for t in &self.terms {
            if t.i == 0 || t.i > n {
                return Err(Error::Config(format!("term index i = {} outside 1..={n}", t.i)));
            }
            if t.l as usize >= n {
                return Err(Error::Config(format!("power l = {} exceeds n - 1 = {}", t.l, n - 1)));
            }
        }
        let lams = self.lambda_values()?;
        for (k, (spec, lam)) in self.lambdas.iter().zip(&lams).enumerate() {
            if !lam.is_zero() && spec.valuation < exp_domain(self.p) {
                return Err(Error::OutsideConvergenceDomain { valuation: spec.valuation });
            }
            if let Some(v) = lam.valuation() {
                if v < exp_domain(self.p) {
                    return Err(Error::OutsideConvergenceDomain { valuation: v });
                }
            }
            if lams[..k].contains(lam) {
                return Err(Error::Config(format!("lambda {} repeats mod p^N", k + 1)));
            }
        }
        Ok(())
    }

    pub fn lambda_values(&self) -> Result<Vec<PadicInt>> {
        self.lambdas
            .iter()
            .map(|l| {
                let scale = if l.valuation >= self.precision { 0 } else { self.p.pow(l.valuation) as i128 };
                PadicInt::new(self.p, self.precision, l.unit as i128 * scale)
            })
            .collect()
    }

    fn max_den(&self) -> u32 {
        self.terms.iter().map(|t| t.c_den_valuation).max().unwrap_or(0)
    }

    /// `f(0)` exactly.
    pub fn value_at_zero(&self) -> Rational {
        self.terms.iter().filter(|t| t.l == 0).map(|t| Rational::from_integer(t.c_num.into()) * p_pow(self.p, -(t.c_den_valuation as i64))).sum()
    }
}

impl PadicFunction for GoodFunctionSpec {
    fn p(&self) -> u64 {
        self.p
    }

    fn precision(&self) -> u32 {
        self.precision
    }

    fn shift(&self) -> u32 {
        self.max_den()
    }

    fn eval_scaled(&self, s: &PadicInt) -> Result<PadicInt> {
        let lams = self.lambda_values()?;
        let k = self.max_den();
        let mut exps: Vec<Option<PadicInt>> = vec![None; lams.len()];
        let mut acc = s.zero_like();
        for t in &self.terms {
            let e = match &exps[t.i - 1] {
                Some(e) => *e,
                None => {
                    let e = padic_exp(&lams[t.i - 1].mul(s))?;
                    exps[t.i - 1] = Some(e);
                    e
                }
            };
            let lift = k - t.c_den_valuation;
            let c = if lift >= self.precision { s.zero_like() } else { s.from_like(t.c_num as i128 * self.p.pow(lift) as i128) };
            acc = acc.add(&c.mul(&s.pow(t.l as u64)).mul(&e));
        }
        Ok(acc)
    }

    fn vanishes_at_zero(&self) -> Result<bool> {
        Ok(self.value_at_zero().is_zero())
    }
}

/// `f(s)` as `p^-shift * scaled`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PadicValue {
    pub scaled: PadicInt,
    pub shift: u32,
}

impl PadicValue {
    /// `v_p(f(s))`; fails when the residue vanishes.
    pub fn valuation(&self) -> Result<i64> {
        match self.scaled.valuation() {
            Some(v) => Ok(v as i64 - self.shift as i64),
            None => Err(Error::PrecisionBelowResolution { precision: self.scaled.precision(), context: "all terms vanish mod p^N".into() }),
        }
    }

    pub fn abs(&self) -> Result<Rational> {
        Ok(p_pow(self.scaled.p(), -self.valuation()?))
    }

    /// Upper bound on `|f(s)|_p` that always holds.
    pub fn abs_bound(&self) -> Rational {
        let v = self.scaled.valuation().unwrap_or(self.scaled.precision()) as i64 - self.shift as i64;
        p_pow(self.scaled.p(), -v)
    }
}

pub fn eval_good_function(spec: &GoodFunctionSpec, s: &PadicInt) -> Result<PadicValue> {
    spec.validate()?;
    if s.p() != spec.p || s.precision() != spec.precision {
        return Err(Error::Precondition("argument ring differs from the spec".into()));
    }
    Ok(PadicValue { scaled: spec.eval_scaled(s)?, shift: spec.shift() })
}

/// Ball `center + p^radius_exp Z_p`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Ball {
    pub center: u128,
    pub radius_exp: u32,
}

impl Ball {
    pub fn whole() -> Self {
        Ball { center: 0, radius_exp: 0 }
    }

    pub fn new(center: u128, radius_exp: u32, p: u64) -> Self {
        let m = (p as u128).pow(radius_exp);
        Ball { center: center % m, radius_exp }
    }

    /// Every ball of radius `p^-j` for `j <= j_max`.
    pub fn all_up_to(p: u64, j_max: u32) -> Vec<Ball> {
        let mut out = Vec::new();
        for j in 0..=j_max {
            for c in 0..(p as u128).pow(j) {
                out.push(Ball { center: c, radius_exp: j });
            }
        }
        out
    }

    pub fn measure(&self, p: u64) -> Rational {
        p_pow(p, -(self.radius_exp as i64))
    }
}

/// Valuations of `F` on every residue of a ball mod `p^N`.
#[derive(Debug, Clone)]
pub struct ResidueTable {
    p: u64,
    precision: u32,
    shift: u32,
    ball: Ball,
    vals: Vec<u8>,
}

fn check_cap(p: u64, digits: u32) -> Result<u128> {
    let mut size: u128 = 1;
    for _ in 0..digits {
        size = size.saturating_mul(p as u128);
    }
    if size > ENUMERATION_CAP {
        return Err(Error::EnumerationTooLarge { size, cap: ENUMERATION_CAP });
    }
    Ok(size)
}

impl ResidueTable {
    pub fn new<F: PadicFunction + ?Sized>(f: &F, ball: Ball) -> Result<Self> {
        let (p, n) = (f.p(), f.precision());
        if ball.radius_exp > n {
            return Err(Error::Precondition(format!("ball radius p^-{} is below resolution p^-{n}", ball.radius_exp)));
        }
        let size = check_cap(p, n - ball.radius_exp)?;
        let step = (p as u128).pow(ball.radius_exp);
        let vals = (0..size as usize)
            .into_par_iter()
            .with_min_len(256)
            .map(|t| {
                let s = PadicInt::raw(p, n, ball.center + step * t as u128);
                Ok(f.eval_scaled(&s)?.valuation().map(|v| v as u8).unwrap_or(UNRESOLVED))
            })
            .collect::<Result<Vec<u8>>>()?;
        Ok(ResidueTable { p, precision: n, shift: f.shift(), ball, vals })
    }

    pub fn whole<F: PadicFunction + ?Sized>(f: &F) -> Result<Self> {
        Self::new(f, Ball::whole())
    }

    pub fn ball(&self) -> Ball {
        self.ball
    }

    pub fn len(&self) -> usize {
        self.vals.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vals.is_empty()
    }

    /// Largest valuation of `f` this table can certify.
    pub fn resolved_limit(&self) -> i64 {
        self.precision as i64 - self.shift as i64
    }

    /// `(residue, v(f) or None)` over the table in increasing residue order.
    pub fn entries(&self) -> impl Iterator<Item = (u128, Option<i64>)> + '_ {
        let step = (self.p as u128).pow(self.ball.radius_exp);
        self.vals.iter().enumerate().map(move |(t, &v)| (self.ball.center + step * t as u128, self.f_val(v)))
    }

    fn f_val(&self, raw: u8) -> Option<i64> {
        (raw != UNRESOLVED).then(|| raw as i64 - self.shift as i64)
    }

    fn sub_indices(&self, sub: Ball) -> Result<(usize, usize)> {
        let (j0, j) = (self.ball.radius_exp, sub.radius_exp);
        let pj0 = (self.p as u128).pow(j0);
        if j < j0 || j > self.precision || (sub.center % pj0) != self.ball.center % pj0 {
            return Err(Error::Precondition("ball is not inside the enumerated ball".into()));
        }
        let mj = (self.p as u128).pow(j);
        let start = ((sub.center % mj) - self.ball.center % pj0) / pj0;
        Ok((start as usize, (self.p as u128).pow(j - j0) as usize))
    }

    /// Counts by valuation of `f` on `sub`: `(counts[w - w_min], unresolved, total, w_min)`.
    pub fn histogram(&self, sub: Ball) -> Result<Histogram> {
        let (start, step) = self.sub_indices(sub)?;
        let mut counts = vec![0u128; self.precision as usize];
        let mut unresolved = 0u128;
        let mut total = 0u128;
        for &v in self.vals[start..].iter().step_by(step) {
            total += 1;
            if v == UNRESOLVED {
                unresolved += 1;
            } else {
                counts[v as usize] += 1;
            }
        }
        Ok(Histogram { p: self.p, shift: self.shift as i64, precision: self.precision as i64, counts, unresolved, total })
    }
}

/// Valuation counts of `F = p^shift f` on one ball.
#[derive(Debug, Clone)]
pub struct Histogram {
    p: u64,
    shift: i64,
    precision: i64,
    counts: Vec<u128>,
    unresolved: u128,
    total: u128,
}

impl Histogram {
    /// Smallest resolved valuation of `f`, i.e. `sup |f| = p^-w`.
    pub fn sup_valuation(&self) -> Option<i64> {
        self.counts.iter().position(|&c| c > 0).map(|v| v as i64 - self.shift)
    }

    fn limit(&self) -> i64 {
        self.precision - self.shift
    }

    /// Residues with `|f| <= p^-m`; `None` when the unresolved ones cannot be placed.
    pub fn count_closed(&self, m: i64) -> Option<u128> {
        if m > self.limit() && self.unresolved > 0 {
            return None;
        }
        let resolved: u128 = self.counts.iter().enumerate().filter(|(v, _)| *v as i64 - self.shift >= m).map(|(_, c)| c).sum();
        Some(resolved + self.unresolved)
    }

    /// Residues with `|f| < eps`; `None` when the unresolved ones cannot be placed.
    pub fn count_strict(&self, eps: &Rational) -> Option<u128> {
        if self.unresolved > 0 && p_pow(self.p, -self.limit()) >= *eps {
            return None;
        }
        let resolved: u128 = self.counts.iter().enumerate().filter(|(v, _)| p_pow(self.p, -(*v as i64 - self.shift)) < *eps).map(|(_, c)| c).sum();
        Some(resolved + self.unresolved)
    }

    pub fn total(&self) -> u128 {
        self.total
    }
}

/// Exact sublevel data on one ball at resolution `p^-N`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SublevelResult {
    pub count: u128,
    pub total: u128,
    /// Fraction of the ball, `mu(set) / mu(B)`.
    #[serde(with = "rational_str")]
    pub measure: Rational,
    /// Haar measure of the set.
    #[serde(with = "rational_str")]
    pub haar: Rational,
    pub sup_valuation: i64,
    #[serde(with = "rational_str")]
    pub sup: Rational,
}

fn sublevel_impl<F: PadicFunction + ?Sized>(f: &F, ball: Ball, count: impl Fn(&Histogram) -> Option<u128>) -> Result<SublevelResult> {
    let table = ResidueTable::new(f, ball)?;
    let h = table.histogram(ball)?;
    let below = || Error::PrecisionBelowResolution { precision: f.precision(), context: "sublevel set on the ball".into() };
    let sup_valuation = h.sup_valuation().ok_or_else(below)?;
    let count = count(&h).ok_or_else(below)?;
    let measure = Rational::new(BigInt::from(count), BigInt::from(h.total));
    Ok(SublevelResult { count, total: h.total, haar: &measure * ball.measure(f.p()), measure, sup_valuation, sup: p_pow(f.p(), -sup_valuation) })
}

/// `mu{x in B : |f(x)|_p < eps}`, exact at resolution `p^-N`.
pub fn sublevel_measure<F: PadicFunction + ?Sized>(f: &F, ball: Ball, eps: &Rational) -> Result<SublevelResult> {
    if !eps.is_positive() {
        return Err(Error::Precondition("eps must be positive".into()));
    }
    sublevel_impl(f, ball, |h| h.count_strict(eps))
}

/// `mu{x in B : |f(x)|_p <= eps}`, the limit of the strict measure as `eps` decreases to `eps`.
pub fn sublevel_measure_closed<F: PadicFunction + ?Sized>(f: &F, ball: Ball, eps: &Rational) -> Result<SublevelResult> {
    if !eps.is_positive() {
        return Err(Error::Precondition("eps must be positive".into()));
    }
    sublevel_impl(f, ball, |h| {
        // |f| <= eps iff v(f) >= ceil(-log_p eps)
        let mut m = -(h.limit() + 2 * h.precision + 2);
        while p_pow(h.p, -m) > *eps {
            m += 1;
        }
        h.count_closed(m)
    })
}

#[derive(Debug, Clone, PartialEq)]
pub enum EpsGrid {
    Explicit(Vec<Rational>),
    /// Every level `p^-m` approached from above, which realizes the supremum of the ratio.
    Auto,
}

/// Worst ratio at one level of eps over all balls.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckRow {
    pub eps: String,
    /// `"strict"` for an explicit eps, `"right_limit"` for `eps -> p^-m` from above.
    pub mode: String,
    pub balls_checked: usize,
    pub max_ratio: f64,
    pub worst_ball: Ball,
    pub verified: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Witness {
    pub ball: Ball,
    /// A concrete eps at which the strict sublevel inequality fails.
    pub eps: String,
    pub measure: String,
    pub sup_norm: String,
    pub ratio: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckReport {
    pub p: u64,
    #[serde(rename = "N")]
    pub precision: u32,
    pub c: String,
    pub alpha: String,
    pub pass: bool,
    pub max_ratio: f64,
    pub checks: usize,
    pub undecided: usize,
    pub rows: Vec<CheckRow>,
    pub witness: Option<Witness>,
    pub scope: String,
}

/// `rel <= c x^alpha`, exact.
fn within(rel: &Rational, x: &Rational, c: &Rational, alpha: &Rational) -> bool {
    let approx = ratio_f64(rel, x, alpha);
    let cf = c.to_f64().unwrap_or(f64::INFINITY);
    if approx.is_finite() && (approx - cf).abs() > 1e-9 * cf.max(1.0) {
        return approx < cf;
    }
    // rel^b <= c^b x^a with alpha = a / b
    let a = alpha.numer().to_u32().expect("small alpha numerator");
    let b = alpha.denom().to_u32().expect("small alpha denominator");
    num_traits::pow(rel.clone(), b as usize) <= num_traits::pow(c.clone(), b as usize) * num_traits::pow(x.clone(), a as usize)
}

fn log_f64(r: &Rational) -> f64 {
    let bits = |b: &BigInt| {
        let n = b.bits() as i64;
        let sh = (n - 60).max(0);
        ((b >> sh as usize).to_f64().unwrap()).ln() + sh as f64 * std::f64::consts::LN_2
    };
    bits(r.numer()) - bits(r.denom())
}

fn ratio_f64(rel: &Rational, x: &Rational, alpha: &Rational) -> f64 {
    if rel.is_zero() {
        return 0.0;
    }
    (log_f64(rel) - alpha.to_f64().unwrap() * log_f64(x)).exp()
}

fn validate_constants(c: &Rational, alpha: &Rational) -> Result<()> {
    if !c.is_positive() {
        return Err(Error::Config("C must be positive".into()));
    }
    if !alpha.is_positive() || alpha.numer().bits() > 16 || alpha.denom().bits() > 16 {
        return Err(Error::Config("alpha must be a positive fraction with small numerator and denominator".into()));
    }
    Ok(())
}

/// Exhaustive check of `mu{|f| < eps} <= C (eps / sup_B |f|)^alpha mu(B)` on
/// every given ball at resolution `p^-N`.
pub fn check_good<F: PadicFunction + ?Sized>(f: &F, c: &Rational, alpha: &Rational, balls: &[Ball], eps: &EpsGrid) -> Result<CheckReport> {
    validate_constants(c, alpha)?;
    let p = f.p();
    let table = ResidueTable::whole(f)?;
    let limit = table.resolved_limit();
    // one entry per (ball, eps level): (level key, ratio, within, ball, rel, x)
    let per_ball: Vec<Vec<(usize, f64, bool, Ball, Rational, Rational)>> = balls
        .par_iter()
        .map(|&ball| -> Result<Vec<_>> {
            let h = table.histogram(ball)?;
            let Some(w) = h.sup_valuation() else { return Ok(Vec::new()) };
            let total = BigInt::from(h.total());
            let mut out = Vec::new();
            match eps {
                EpsGrid::Auto => {
                    for m in w..=limit {
                        let count = h.count_closed(m).expect("decidable up to the limit");
                        let rel = Rational::new(BigInt::from(count), total.clone());
                        let x = p_pow(p, w - m);
                        let r = ratio_f64(&rel, &x, alpha);
                        out.push(((m - w) as usize, r, within(&rel, &x, c, alpha), ball, rel, x));
                    }
                }
                EpsGrid::Explicit(list) => {
                    for (k, e) in list.iter().enumerate() {
                        if let Some(count) = h.count_strict(e) {
                            let rel = Rational::new(BigInt::from(count), total.clone());
                            let x = e * p_pow(p, w);
                            let r = ratio_f64(&rel, &x, alpha);
                            out.push((k, r, within(&rel, &x, c, alpha), ball, rel, x));
                        }
                    }
                }
            }
            Ok(out)
        })
        .collect::<Result<_>>()?;

    let levels = match eps {
        EpsGrid::Auto => (limit.max(0) + 1) as usize + per_ball.iter().flatten().map(|e| e.0 + 1).max().unwrap_or(0),
        EpsGrid::Explicit(list) => list.len(),
    };
    let expected = match eps {
        EpsGrid::Auto => None,
        EpsGrid::Explicit(list) => Some(balls.len() * list.len()),
    };
    let mut rows: Vec<Option<CheckRow>> = vec![None; levels];
    let mut checks = 0;
    let mut pass = true;
    let mut max_ratio = 0.0f64;
    let mut worst: Option<&(usize, f64, bool, Ball, Rational, Rational)> = None;
    for e in per_ball.iter().flatten() {
        checks += 1;
        pass &= e.2;
        max_ratio = max_ratio.max(e.1);
        if !e.2 && worst.is_none_or(|w| e.1 > w.1) {
            worst = Some(e);
        }
        let (label, mode) = match eps {
            EpsGrid::Auto => (format!("p^-(sup+{})", e.0), "right_limit"),
            EpsGrid::Explicit(list) => (fmt_rational(&list[e.0]), "strict"),
        };
        let row = rows[e.0].get_or_insert(CheckRow { eps: label, mode: mode.into(), balls_checked: 0, max_ratio: 0.0, worst_ball: e.3, verified: true });
        row.balls_checked += 1;
        row.verified &= e.2;
        if e.1 > row.max_ratio {
            row.max_ratio = e.1;
            row.worst_ball = e.3;
        }
    }
    if checks == 0 {
        return Err(Error::PrecisionBelowResolution { precision: f.precision(), context: "no (ball, eps) pair is decidable".into() });
    }
    let witness = worst.map(|(_, _, _, ball, rel, x)| {
        let h = table.histogram(*ball).expect("ball was checked");
        let w = h.sup_valuation().expect("resolved");
        let norm = p_pow(p, -w);
        let eps_w = match eps {
            EpsGrid::Explicit(_) => x * &norm,
            // the strict measure is constant on (p^-m, p^-m+1], so push eps slightly above p^-m
            EpsGrid::Auto => {
                let mut t = Rational::new(3.into(), 2.into());
                let base = x * &norm;
                for _ in 0..64 {
                    if !within(rel, &(&base * &t / &norm), c, alpha) {
                        break;
                    }
                    t = (t + Rational::one()) / Rational::from_integer(2.into());
                }
                base * t
            }
        };
        let strict = h.count_strict(&eps_w).expect("decidable above the level");
        let rel_w = Rational::new(BigInt::from(strict), BigInt::from(h.total()));
        Witness { ball: *ball, ratio: ratio_f64(&rel_w, &(&eps_w / &norm), alpha), eps: fmt_rational(&eps_w), measure: fmt_rational(&rel_w), sup_norm: fmt_rational(&norm) }
    });
    Ok(CheckReport {
        p,
        precision: f.precision(),
        c: fmt_rational(c),
        alpha: fmt_rational(alpha),
        pass,
        max_ratio,
        checks,
        undecided: expected.map(|e| e.saturating_sub(checks)).unwrap_or(0),
        rows: rows.into_iter().flatten().collect(),
        witness,
        scope: format!("verified at resolution {p}^-{} on the cylinder partition; not a proof for Z_{p}", f.precision()),
    })
}

/// Smallest `C` with `check_good` passing for this `alpha` on all balls at
/// the right-limit levels, rounded up to a dyadic with 40 fractional bits.
pub fn tight_constant<F: PadicFunction + ?Sized>(f: &F, alpha: &Rational, balls: &[Ball]) -> Result<Rational> {
    let probe = check_good(f, &Rational::one(), alpha, balls, &EpsGrid::Auto)?;
    let scale: BigInt = BigInt::one() << 40;
    let mut c = Rational::new(BigInt::from((probe.max_ratio * (1u64 << 40) as f64).ceil() as u64 + 1), scale.clone());
    while !check_good(f, &c, alpha, balls, &EpsGrid::Auto)?.pass {
        c += Rational::new(BigInt::from(1u64 << 20), scale.clone());
    }
    Ok(c)
}

/// `C' = (2 C p)^(1 / alpha)` as a float.
pub fn weak_ivt_constant(c: &Rational, alpha: &Rational, p: u64) -> f64 {
    (2.0 * c.to_f64().unwrap() * p as f64).powf(1.0 / alpha.to_f64().unwrap())
}

/// Lower bound on the ratios of consecutive suprema.
#[derive(Debug, Clone, PartialEq)]
pub enum IvtBound {
    /// `C'` given directly.
    Constant(Rational),
    /// `C' = (2 C p)^(1 / alpha)`.
    FromGood { c: Rational, alpha: Rational },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IvtLevel {
    pub n: u32,
    pub sup_valuation: i64,
    pub next_sup_valuation: i64,
    pub ratio: String,
    pub holds: Option<bool>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IvtReport {
    pub p: u64,
    #[serde(rename = "N")]
    pub precision: u32,
    pub c_prime: Option<f64>,
    pub levels: Vec<IvtLevel>,
    pub holds: bool,
}

impl IvtReport {
    pub fn ratios(&self) -> Vec<Rational> {
        self.levels.iter().map(|l| crate::io::parse_rational(&l.ratio).expect("own format")).collect()
    }
}

/// `v(f)` minimized over `p^n Z_p`, for `n = 0..=N`.
fn sup_valuations(table: &ResidueTable) -> Vec<Option<i64>> {
    let n = table.precision as usize;
    let p = table.p as u128;
    // best[e]: smallest valuation among residues with v_p(r) = e (r = 0 has e = N)
    let mut best: Vec<Option<i64>> = vec![None; n + 1];
    for (r, v) in table.entries() {
        let Some(v) = v else { continue };
        let mut e = 0;
        let mut x = r;
        if x == 0 {
            e = n;
        } else {
            while x % p == 0 {
                x /= p;
                e += 1;
            }
        }
        best[e] = Some(best[e].map_or(v, |b: i64| b.min(v)));
    }
    let mut out = vec![None; n + 1];
    let mut acc: Option<i64> = None;
    for e in (0..=n).rev() {
        if let Some(b) = best[e] {
            acc = Some(acc.map_or(b, |a| a.min(b)));
        }
        out[e] = acc;
    }
    out
}

/// Ratios `R_n = sup_{p^(n+1) Z_p} |f| / sup_{p^n Z_p} |f|` for `n <= n_max`,
/// with `R_n >= 1 / C'` checked when a bound is supplied.
pub fn weak_ivt_check<F: PadicFunction + ?Sized>(f: &F, n_max: u32, bound: Option<&IvtBound>) -> Result<IvtReport> {
    let p = f.p();
    if n_max + 1 > f.precision() {
        return Err(Error::PrecisionBelowResolution { precision: f.precision(), context: format!("level {} needs more digits", n_max + 1) });
    }
    let table = ResidueTable::whole(f)?;
    let sups = sup_valuations(&table);
    let mut levels = Vec::new();
    let mut holds = true;
    for n in 0..=n_max {
        let (Some(a), Some(b)) = (sups[n as usize], sups[n as usize + 1]) else {
            return Err(Error::PrecisionBelowResolution { precision: f.precision(), context: format!("sup over {p}^{} Z_{p} vanishes mod p^N", n + 1) });
        };
        let ratio = p_pow(p, a - b);
        let ok = bound.map(|bd| match bd {
            IvtBound::Constant(cp) => &ratio * cp >= Rational::one(),
            // ratio >= (2Cp)^(-1/alpha)  iff  ratio^a (2Cp)^b >= 1 with alpha = a / b
            IvtBound::FromGood { c, alpha } => {
                let a = alpha.numer().to_usize().expect("small alpha");
                let b = alpha.denom().to_usize().expect("small alpha");
                num_traits::pow(ratio.clone(), a) * num_traits::pow(c * Rational::from_integer((2 * p).into()), b) >= Rational::one()
            }
        });
        holds &= ok.unwrap_or(true);
        levels.push(IvtLevel { n, sup_valuation: a, next_sup_valuation: b, ratio: fmt_rational(&ratio), holds: ok });
    }
    let c_prime = bound.map(|bd| match bd {
        IvtBound::Constant(cp) => cp.to_f64().unwrap(),
        IvtBound::FromGood { c, alpha } => weak_ivt_constant(c, alpha, p),
    });
    Ok(IvtReport { p, precision: f.precision(), c_prime, levels, holds })
}

/// Smallest residue `s` with `rho / C' <= |f(s)|_p < rho`.
pub fn find_controlled_value<F: PadicFunction + ?Sized>(f: &F, rho: &Rational, c_prime: &Rational) -> Result<PadicInt> {
    if !rho.is_positive() || *c_prime < Rational::one() {
        return Err(Error::Precondition("need rho > 0 and C' >= 1".into()));
    }
    if !f.vanishes_at_zero()? {
        return Err(Error::Precondition("f(0) != 0".into()));
    }
    let p = f.p();
    let table = ResidueTable::whole(f)?;
    let abs = |w: i64| p_pow(p, -w);
    if !table.entries().any(|(_, v)| v.is_some_and(|w| abs(w) >= *rho)) {
        return Err(Error::Precondition("no resolved u with |f(u)| >= rho".into()));
    }
    let low = rho / c_prime;
    let found = table
        .entries()
        .find(|(_, v)| v.is_some_and(|w| abs(w) >= low && abs(w) < *rho))
        .map(|(r, _)| PadicInt::raw(p, f.precision(), r))
        .ok_or(Error::NoWitnessAtResolution(f.precision()));
    found
}

/// Balls used when none are given: every ball of radius at least `p^-(N-1)`.
pub fn default_balls<F: PadicFunction + ?Sized>(f: &F) -> Vec<Ball> {
    Ball::all_up_to(f.p(), f.precision().saturating_sub(1))
}

pub(crate) mod rational_str {
    use serde::{Deserialize, Deserializer, Serializer};

    use crate::io::{fmt_rational, parse_rational};
    use crate::scalar::Rational;

    pub fn serialize<S: Serializer>(r: &Rational, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&fmt_rational(r))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Rational, D::Error> {
        let s = String::deserialize(d)?;
        parse_rational(&s).map_err(serde::de::Error::custom)
    }
}
