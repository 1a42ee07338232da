//! Sampling of periodic orbits `A x` of the diagonal group on the space of
//! covolume-one lattices, and lattice observables along them.
//!
//! A point `t` (trace zero) of the orbit is the lattice spanned by the rows of
//! `g diag(e^t) s`. The matrix `g` is known to any precision; the product is
//! formed in fixed point with the column factors `e^t` rounded to f64 and
//! taken as exact, reduced exactly, and only then converted to floats. The
//! returned basis carries a bound on the entry error coming from `g`.

use num_bigint::BigInt;
use num_traits::{Signed, ToPrimitive};
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::interval::{Dyadic, MAX_PRECISION_BITS};
use crate::lattice::{lll_big, observables, LatticeBasis, LatticeObservables, Norm, DEFAULT_DELTA};
use crate::numfield::{orbit_matrix, orbit_period_d2, rescale_basis, AlgebraicNumber, OrbitMatrix};
use crate::rng::{derive_seed, sample_rng};
use crate::Lattice;
use crate::stats::{trend_report, wasserstein1, ks_distance, EmpiricalMeasure, FeatureMetric, FeatureRecord, Metadata, Metric, Schema, TrendOptions, TrendReport};

/// Trace-zero diagonal parameter `t`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiagonalParameter {
    t: Vec<f64>,
}

impl DiagonalParameter {
    /// From the first `d - 1` coordinates; the last is `-sum`.
    pub fn from_free(free: &[f64]) -> Self {
        let mut t = free.to_vec();
        t.push(-free.iter().sum::<f64>());
        DiagonalParameter { t }
    }

    pub fn new(t: Vec<f64>) -> Result<Self> {
        let s: f64 = t.iter().sum();
        let scale: f64 = t.iter().map(|x| x.abs()).sum::<f64>().max(1.0);
        if t.is_empty() || t.iter().any(|x| !x.is_finite()) || s.abs() > 1e-12 * scale {
            return Err(Error::Precondition("diagonal parameter must be finite with zero sum".into()));
        }
        Ok(DiagonalParameter { t })
    }

    pub fn zero(d: usize) -> Self {
        DiagonalParameter { t: vec![0.0; d] }
    }

    pub fn t(&self) -> &[f64] {
        &self.t
    }

    pub fn dim(&self) -> usize {
        self.t.len()
    }

    pub fn add(&self, o: &DiagonalParameter) -> DiagonalParameter {
        DiagonalParameter { t: self.t.iter().zip(&o.t).map(|(a, b)| a + b).collect() }
    }

    fn spread(&self) -> f64 {
        let max = self.t.iter().cloned().fold(f64::MIN, f64::max);
        let min = self.t.iter().cloned().fold(f64::MAX, f64::min);
        max - min
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OrbitSamplePlan {
    /// Half-width `T` of the sampling box.
    pub t_max: f64,
    pub samples: usize,
    pub seed: u64,
    /// Right translate `s` applied to every basis.
    #[serde(default)]
    pub translate: Option<Vec<Vec<f64>>>,
    pub radii: Vec<f64>,
    #[serde(default = "euclidean")]
    pub norm: Norm,
}

fn euclidean() -> Norm {
    Norm::Euclidean
}

impl Default for OrbitSamplePlan {
    fn default() -> Self {
        OrbitSamplePlan { t_max: 20.0, samples: 20_000, seed: 0, translate: None, radii: vec![0.5, 1.0, 1.5, 2.0], norm: Norm::Euclidean }
    }
}

impl OrbitSamplePlan {
    pub fn validate(&self, d: usize) -> Result<()> {
        if !(self.t_max >= 0.0) || !self.t_max.is_finite() {
            return Err(Error::Config("T must be finite and nonnegative".into()));
        }
        if self.samples == 0 {
            return Err(Error::Config("sample count must be at least 1".into()));
        }
        if self.radii.iter().any(|r| !r.is_finite() || *r <= 0.0) {
            return Err(Error::Config("radii must be positive".into()));
        }
        if let Some(s) = &self.translate {
            if s.len() != d || s.iter().any(|r| r.len() != d) || s.iter().flatten().any(|x| !x.is_finite()) {
                return Err(Error::Config(format!("translate must be a finite {d}x{d} matrix")));
            }
            if det_f64(s) == 0.0 {
                return Err(Error::Config("translate is singular".into()));
            }
        }
        Ok(())
    }
}

fn det_f64(m: &[Vec<f64>]) -> f64 {
    let n = m.len();
    let mut a = m.to_vec();
    let mut det = 1.0;
    for c in 0..n {
        let p = (c..n).max_by(|&i, &j| a[i][c].abs().total_cmp(&a[j][c].abs())).expect("nonempty");
        if a[p][c] == 0.0 {
            return 0.0;
        }
        if p != c {
            a.swap(p, c);
            det = -det;
        }
        det *= a[c][c];
        for r in c + 1..n {
            let f = a[r][c] / a[c][c];
            for k in c..n {
                a[r][k] -= f * a[c][k];
            }
        }
    }
    det
}

/// Precomputed fixed-point form of an orbit matrix.
#[derive(Debug, Clone)]
pub struct FlowContext {
    g: OrbitMatrix,
    scale: u32,
    fixed: Vec<Vec<BigInt>>,
    det_g: f64,
}

impl FlowContext {
    /// Context good for parameters with spread up to `max_spread`, where
    /// the spread of `t` is `max t - min t`.
    pub fn new(g: &OrbitMatrix, max_spread: f64) -> Result<Self> {
        let entry_bits = g.to_f64().iter().flatten().map(|x| x.abs().log2().ceil() as i64).max().unwrap_or(0).max(0);
        let spread_bits = (max_spread / std::f64::consts::LN_2).ceil() as i64;
        let scale = (64 + 2 * spread_bits + 2 * entry_bits + 48).max(128);
        if scale as u32 > MAX_PRECISION_BITS {
            return Err(Error::exhausted(scale as u32, "orbit flow spread"));
        }
        let scale = scale as u32;
        let g = g.refined(scale + 16)?;
        let det_g = g.det_enclosure().to_f64();
        Ok(FlowContext { fixed: g.fixed_point(scale), g, scale, det_g })
    }

    pub fn matrix(&self) -> &OrbitMatrix {
        &self.g
    }

    fn dim(&self) -> usize {
        self.fixed.len()
    }

    /// Covolume-one reduced basis of `g diag(e^t) s`.
    pub fn lattice(&self, t: &DiagonalParameter, s: Option<&[Vec<f64>]>) -> Result<Lattice> {
        let d = self.dim();
        if t.dim() != d {
            return Err(Error::DegenerateInput(format!("parameter has {} coordinates, matrix is {d}x{d}", t.dim())));
        }
        let cols: Vec<f64> = t.t().iter().map(|x| x.exp()).collect();
        if cols.iter().any(|c| !c.is_finite() || *c == 0.0) {
            return Err(Error::exhausted(self.scale, "flow parameter out of f64 range"));
        }
        // M = diag(c) s as exact dyadics over a common exponent
        let m: Vec<Vec<Dyadic>> = (0..d)
            .map(|k| {
                (0..d)
                    .map(|j| {
                        let sv = s.map_or(if j == k { 1.0 } else { 0.0 }, |s| s[k][j]);
                        Dyadic::from_f64(cols[k]).mul(&Dyadic::from_f64(sv))
                    })
                    .collect()
            })
            .collect();
        let e = m.iter().flatten().filter(|x| !x.is_zero()).map(|x| x.exp()).min().unwrap_or(0);
        let m_int: Vec<Vec<BigInt>> = m.iter().map(|r| r.iter().map(|x| x.floor_scaled(-e)).collect()).collect();
        let rows: Vec<Vec<BigInt>> = self.fixed.iter().map(|gr| (0..d).map(|j| gr.iter().zip(&m_int).map(|(a, mr)| a * &mr[j]).sum()).collect()).collect();
        let red = lll_big(rows, DEFAULT_DELTA);
        let unit = e - self.scale as i64;
        let mut f: Vec<Vec<f64>> = red.rows.iter().map(|r| r.iter().map(|x| Dyadic::new(x.clone(), unit).to_f64()).collect()).collect();
        let det_s = s.map_or(1.0, det_f64);
        let cov = (self.det_g * cols.iter().product::<f64>() * det_s).abs();
        let norm = cov.powf(-1.0 / d as f64);
        f.iter_mut().flatten().for_each(|x| *x *= norm);
        // g entries are off by at most 2 units of 2^-scale
        let mmax = m.iter().flatten().map(|x| x.to_f64().abs()).fold(0.0, f64::max);
        let ugrowth = red.transform.iter().map(|r| r.iter().map(|c| c.abs().to_f64().unwrap_or(f64::INFINITY)).sum::<f64>()).fold(0.0, f64::max);
        let ldexp_err = crate::interval::ldexp(2.0 * d as f64, -(self.scale as i64));
        let emax = f.iter().flatten().fold(0.0f64, |a, x| a.max(x.abs()));
        let radius = ldexp_err * ugrowth * mmax * norm + 8.0 * f64::EPSILON * emax;
        if !(radius < 1e-9) {
            return Err(Error::exhausted(self.scale, "orbit lattice error bound too large"));
        }
        Ok(LatticeBasis::from_parts(f, false, radius, true))
    }
}

/// Covolume-one lattice `g diag(e^t)` in reduced form.
pub fn apply_flow(g: &OrbitMatrix, t: &DiagonalParameter) -> Result<Lattice> {
    apply_flow_translated(g, t, None)
}

pub fn apply_flow_translated(g: &OrbitMatrix, t: &DiagonalParameter, s: Option<&[Vec<f64>]>) -> Result<Lattice> {
    let cond = s.map_or(0.0, |s| {
        let m = s.iter().flatten().fold(0.0f64, |a, x| a.max(x.abs()));
        (m * m * s.len() as f64 / det_f64(s).abs().powf(1.0 / s.len() as f64)).max(1.0).ln()
    });
    FlowContext::new(g, t.spread() + cond)?.lattice(t, s)
}

/// One sample of an orbit.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OrbitSample {
    pub index: usize,
    pub t: Vec<f64>,
    pub obs: LatticeObservables,
}

/// Period of the orbit when `d = 2`.
pub fn orbit_period(g: &OrbitMatrix) -> Result<Option<f64>> {
    if g.dim() != 2 {
        return Ok(None);
    }
    let b = g.source_basis();
    Ok(Some(orbit_period_d2(&b[0], &b[1])?.1))
}

/// Reduce `tau` into `[-P/2, P/2)`.
fn reduce_mod(tau: f64, period: f64) -> f64 {
    tau - period * (tau / period + 0.5).floor()
}

fn draw_parameter(d: usize, t_max: f64, seed: u64, index: usize, period: Option<f64>) -> DiagonalParameter {
    let mut rng = sample_rng(seed, index as u64);
    let free: Vec<f64> = (0..d - 1).map(|_| if t_max > 0.0 { rng.random_range(-t_max..=t_max) } else { 0.0 }).collect();
    match period {
        Some(p) => DiagonalParameter::from_free(&[reduce_mod(free[0], p)]),
        None => DiagonalParameter::from_free(&free),
    }
}

/// Observables at `N` parameters uniform in the trace-zero box `[-T, T]^(d-1)`.
/// For `d = 2` parameters are reduced modulo the orbit period, which leaves
/// the lattices unchanged.
pub fn sample_orbit(g: &OrbitMatrix, plan: &OrbitSamplePlan) -> Result<Vec<OrbitSample>> {
    let d = g.dim();
    plan.validate(d)?;
    let period = orbit_period(g)?;
    let t_eff = plan.t_max;
    let max_spread = match period {
        Some(p) => p.min(2.0 * t_eff) + 1.0,
        None => 2.0 * (d - 1) as f64 * t_eff + 1.0,
    };
    let ctx = FlowContext::new(g, max_spread + translate_cond(plan))?;
    (0..plan.samples)
        .into_par_iter()
        .map(|i| {
            let t = draw_parameter(d, t_eff, plan.seed, i, period);
            let lat = ctx.lattice(&t, plan.translate.as_deref())?;
            let obs = observables(&lat, &plan.radii, plan.norm)?;
            Ok(OrbitSample { index: i, t: t.t().to_vec(), obs })
        })
        .collect()
}

fn translate_cond(plan: &OrbitSamplePlan) -> f64 {
    plan.translate.as_ref().map_or(0.0, |s| {
        let m = s.iter().flatten().fold(0.0f64, |a, x| a.max(x.abs()));
        (m * m * s.len() as f64 / det_f64(s).abs().powf(1.0 / s.len() as f64)).max(1.0).ln()
    })
}

/// Observable vector `(lambda_1, N_r1, N_r2, ...)`.
pub fn observable_vector(o: &LatticeObservables) -> Vec<f64> {
    let mut v = vec![o.lambda[0]];
    v.extend(o.counts.iter().map(|&c| c as f64));
    v
}

/// Componentwise mean of observable vectors.
pub fn observable_means(obs: &[LatticeObservables]) -> Vec<f64> {
    let k = obs.first().map_or(0, |o| o.counts.len() + 1);
    let mut acc = vec![0.0; k];
    for o in obs {
        for (a, v) in acc.iter_mut().zip(observable_vector(o)) {
            *a += v;
        }
    }
    acc.iter().map(|a| a / obs.len().max(1) as f64).collect()
}

/// Mean observables over one period of a `d = 2` orbit, rectangle rule with
/// `m` equally spaced nodes (the trapezoid rule for a periodic integrand).
/// The node grid is shifted by a golden-ratio fraction of a step so that no
/// node lands on a symmetric point of the orbit, where lattice vectors can
/// lie exactly on a ball boundary.
pub fn exact_period_average(basis: &[AlgebraicNumber], radii: &[f64], m: usize, norm: Norm) -> Result<Vec<f64>> {
    if basis.len() != 2 || basis[0].field().degree() != 2 {
        return Err(Error::Precondition("period average needs a real quadratic field".into()));
    }
    if m == 0 {
        return Err(Error::Config("quadrature size must be positive".into()));
    }
    let g = orbit_matrix(basis, crate::interval::start_precision())?;
    let (_, period) = orbit_period_d2(&basis[0], &basis[1])?;
    let ctx = FlowContext::new(&g, period + 1.0)?;
    let obs = (0..m)
        .into_par_iter()
        .map(|j| {
            let tau = period * ((j as f64 + NODE_SHIFT) / m as f64 - 0.5);
            let lat = ctx.lattice(&DiagonalParameter::from_free(&[tau]), None)?;
            observables(&lat, radii, norm)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(observable_means(&obs))
}

const NODE_SHIFT: f64 = 0.618_033_988_749_894_8;

/// Lattices on the closed horocycle of length `1/y`: rows
/// `[[sqrt y, x / sqrt y], [0, 1 / sqrt y]]`, `x` uniform in `[0, 1)`.
pub fn haar_reference_d2(n: usize, y: f64, seed: u64, radii: &[f64], norm: Norm) -> Result<Vec<LatticeObservables>> {
    if !(y > 0.0 && y <= 1e-3) {
        return Err(Error::Precondition("horocycle height must lie in (0, 1e-3]".into()));
    }
    let sy = y.sqrt();
    (0..n)
        .into_par_iter()
        .map(|i| {
            let x: f64 = sample_rng(seed, i as u64).random();
            let b = LatticeBasis::new(vec![vec![sy, x / sy], vec![0.0, 1.0 / sy]])?.assume_exact();
            observables(&b, radii, norm)
        })
        .collect()
}

/// The divergence hypothesis: every `|i_j - i_r|` strictly increases along
/// the schedule.
pub fn check_schedule(schedule: &[Vec<i64>]) -> Result<()> {
    let d = schedule.first().map_or(0, |v| v.len());
    if schedule.iter().any(|v| v.len() != d) {
        return Err(Error::Config("schedule vectors differ in length".into()));
    }
    for j in 0..d {
        for r in j + 1..d {
            for (n, w) in schedule.windows(2).enumerate() {
                let a = (w[0][j] - w[0][r]).abs();
                let b = (w[1][j] - w[1][r]).abs();
                if b <= a {
                    return Err(Error::ScheduleViolation(format!("|i_{j} - i_{r}| does not increase between steps {n} and {}", n + 1)));
                }
            }
        }
    }
    Ok(())
}

pub fn observable_schema(radii: &[f64]) -> Schema {
    let mut real = vec!["lambda1".to_string()];
    real.extend(radii.iter().map(|r| format!("N_{}", crate::io::fmt_f64(*r))));
    Schema { real, categorical: vec![] }
}

pub fn observables_measure(obs: &[LatticeObservables], radii: &[f64]) -> Result<EmpiricalMeasure> {
    let recs: Vec<FeatureRecord> = obs.iter().map(|o| FeatureRecord { real: observable_vector(o), categorical: vec![] }).collect();
    crate::stats::empirical(&recs, &observable_schema(radii))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HaarReferenceSpec {
    pub y: f64,
    pub samples: usize,
    pub seed: u64,
}

impl Default for HaarReferenceSpec {
    fn default() -> Self {
        HaarReferenceSpec { y: 1e-4, samples: 100_000, seed: 0 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LevelReport {
    pub n: usize,
    pub i_vec: Vec<i64>,
    pub period: Option<f64>,
    pub effective_t: f64,
    pub seed: u64,
    pub means: Vec<f64>,
    /// W1 and KS of `lambda1` to the reference.
    pub distances: std::collections::BTreeMap<String, f64>,
    /// W1 and KS of `lambda1` to the previous level.
    pub previous: std::collections::BTreeMap<String, f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReferenceInfo {
    pub kind: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub haar: Option<HaarReferenceSpec>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EquidistReport {
    pub levels: Vec<LevelReport>,
    pub reference: ReferenceInfo,
    pub trend: TrendReport,
}

/// Periods needed before a `d = 2` box average is treated as a full orbit.
pub const MIN_PERIODS: f64 = 50.0;

/// Orbit measures along a rescaling schedule and their trend against a
/// reference (Haar for `d = 2`, the last level otherwise).
pub fn equidist_trend(basis: &[AlgebraicNumber], m: i64, schedule: &[Vec<i64>], plan: &OrbitSamplePlan, haar: Option<&HaarReferenceSpec>, trend: &TrendOptions) -> Result<EquidistReport> {
    check_schedule(schedule)?;
    let d = basis.len();
    if schedule.iter().any(|v| v.len() != d) {
        return Err(Error::Config(format!("schedule vectors must have {d} entries")));
    }
    if schedule.len() < 3 {
        return Err(Error::Config("trend needs at least 3 schedule levels".into()));
    }
    plan.validate(d)?;
    let mut measures = Vec::new();
    let mut levels = Vec::new();
    for (n, iv) in schedule.iter().enumerate() {
        let b = rescale_basis(basis, m, iv)?;
        let g = orbit_matrix(&b, crate::interval::start_precision())?;
        let period = orbit_period(&g)?;
        let seed = derive_seed(plan.seed, n as u64);
        let t_eff = period.map_or(plan.t_max, |p| plan.t_max.max(MIN_PERIODS * p));
        let level_plan = OrbitSamplePlan { t_max: t_eff, seed, ..plan.clone() };
        let obs: Vec<LatticeObservables> = sample_orbit(&g, &level_plan)?.into_iter().map(|s| s.obs).collect();
        let meas = observables_measure(&obs, &plan.radii)?.with_meta(Metadata { run_id: format!("level-{n}"), seed: Some(seed), n_index: Some(n as i64) });
        levels.push(LevelReport { n, i_vec: iv.clone(), period, effective_t: t_eff, seed, means: observable_means(&obs), distances: Default::default(), previous: Default::default() });
        measures.push(meas);
    }
    let (reference, info) = if d == 2 {
        let spec = haar.cloned().unwrap_or_default();
        let obs = haar_reference_d2(spec.samples, spec.y, spec.seed, &plan.radii, plan.norm)?;
        (observables_measure(&obs, &plan.radii)?, ReferenceInfo { kind: "haar_horocycle_d2".into(), haar: Some(spec) })
    } else {
        (measures.last().expect("nonempty").clone(), ReferenceInfo { kind: "last_level".into(), haar: None })
    };
    for i in 0..levels.len() {
        levels[i].distances.insert("w1_lambda1".into(), wasserstein1(&measures[i], &reference, "lambda1")?);
        levels[i].distances.insert("ks_lambda1".into(), ks_distance(&measures[i], &reference, "lambda1")?);
        if i > 0 {
            levels[i].previous.insert("w1_lambda1".into(), wasserstein1(&measures[i], &measures[i - 1], "lambda1")?);
            levels[i].previous.insert("ks_lambda1".into(), ks_distance(&measures[i], &measures[i - 1], "lambda1")?);
        }
    }
    let feats = [FeatureMetric::new("lambda1", Metric::W1), FeatureMetric::new("lambda1", Metric::Ks)];
    let seq: &[EmpiricalMeasure] = if d == 2 { &measures } else { &measures[..measures.len() - 1] };
    let trend = if seq.len() >= 3 {
        trend_report(seq, &reference, &feats, trend)?
    } else {
        cauchy_report(&measures, &feats, trend)?
    };
    Ok(EquidistReport { levels, reference: info, trend })
}

/// Trend of consecutive-level distances (used when no external reference
/// exists and too few levels remain after taking the last as reference).
fn cauchy_report(measures: &[EmpiricalMeasure], feats: &[FeatureMetric], opts: &TrendOptions) -> Result<TrendReport> {
    let mut out = Vec::new();
    for fm in feats {
        let distances = measures.windows(2).map(|w| fm.metric.distance(&w[1], &w[0], &fm.feature)).collect::<Result<Vec<f64>>>()?;
        let band = opts.noise_band.unwrap_or(0.0);
        let (inversions, verdict) = crate::stats::classify(&distances, band);
        out.push(crate::stats::FeatureTrend { feature: fm.feature.clone(), metric: fm.metric, noise_sd: vec![0.0; distances.len()], distances, noise_band: band, inversions, verdict });
    }
    Ok(TrendReport { features: out, note: format!("{}; consecutive-level distances", crate::stats::TREND_NOTE) })
}

/// Convenience: orbit matrix for a basis at the default precision.
pub fn orbit_for(basis: &[AlgebraicNumber]) -> Result<OrbitMatrix> {
    orbit_matrix(basis, crate::interval::start_precision())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::covolume;
    use crate::numfield::quadratic_field;

    fn sqrt2_orbit() -> OrbitMatrix {
        let f = quadratic_field(2).unwrap();
        orbit_for(&[f.int(1), f.generator()]).unwrap()
    }

    #[test]
    fn unit_period_returns_same_lattice() {
        let g = sqrt2_orbit();
        let eps = (1.0 + 2f64.sqrt()).ln();
        let a = apply_flow(&g, &DiagonalParameter::zero(2)).unwrap();
        let b = apply_flow(&g, &DiagonalParameter::from_free(&[2.0 * eps])).unwrap();
        let radii = [0.8, 1.0, 1.5];
        let oa = observables(&a, &radii, Norm::Euclidean).unwrap();
        let ob = observables(&b, &radii, Norm::Euclidean).unwrap();
        assert!((oa.lambda[0] - ob.lambda[0]).abs() < 1e-12);
        assert_eq!(oa.counts, ob.counts);
        assert!((covolume(&b) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn large_parameter_is_accurate() {
        let g = sqrt2_orbit();
        let p = orbit_period(&g).unwrap().unwrap();
        let a = apply_flow(&g, &DiagonalParameter::from_free(&[0.3])).unwrap();
        let b = apply_flow(&g, &DiagonalParameter::from_free(&[0.3 + 20.0 * p])).unwrap();
        let oa = observables(&a, &[1.0], Norm::Euclidean).unwrap();
        let ob = observables(&b, &[1.0], Norm::Euclidean).unwrap();
        assert!((oa.lambda[0] - ob.lambda[0]).abs() < 1e-9, "{} {}", oa.lambda[0], ob.lambda[0]);
        assert!(b.radius() < 1e-12);
    }

    #[test]
    fn schedule_checks() {
        assert!(check_schedule(&[vec![0, 2], vec![0, 4], vec![0, 6]]).is_ok());
        assert!(matches!(check_schedule(&[vec![0, 0], vec![0, 0], vec![0, 0]]), Err(Error::ScheduleViolation(_))));
    }

    #[test]
    fn single_sample_at_zero() {
        let g = sqrt2_orbit();
        let plan = OrbitSamplePlan { t_max: 0.0, samples: 1, seed: 3, ..Default::default() };
        let s = sample_orbit(&g, &plan).unwrap();
        assert_eq!(s[0].t, vec![0.0, 0.0]);
        let direct = observables(&apply_flow(&g, &DiagonalParameter::zero(2)).unwrap(), &plan.radii, plan.norm).unwrap();
        assert_eq!(s[0].obs, direct);
    }
}
