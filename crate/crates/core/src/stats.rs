//! Weighted empirical measures over named features, one-dimensional
//! distances between them and convergence trend reports.

use std::collections::BTreeMap;

use num_traits::Float;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::sample_rng;

/// Feature names: real-valued components first, then categorical ones.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize, Default)]
pub struct Schema {
    pub real: Vec<String>,
    pub categorical: Vec<String>,
}

impl Schema {
    pub fn new(real: &[&str], categorical: &[&str]) -> Self {
        Schema { real: real.iter().map(|s| s.to_string()).collect(), categorical: categorical.iter().map(|s| s.to_string()).collect() }
    }
}

/// One atom's feature values, positionally matching a [`Schema`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
pub struct FeatureRecord {
    pub real: Vec<f64>,
    pub categorical: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
pub struct Metadata {
    pub run_id: String,
    pub seed: Option<u64>,
    pub n_index: Option<i64>,
}

/// JSON companion of a measure CSV.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MeasureSidecar {
    pub schema: Schema,
    pub meta: Metadata,
    pub atoms: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EmpiricalMeasure {
    schema: Schema,
    real: Vec<Vec<f64>>,
    categorical: Vec<Vec<String>>,
    weights: Vec<f64>,
    pub meta: Metadata,
}

/// Uniform-weight measure on the records.
pub fn empirical(records: &[FeatureRecord], schema: &Schema) -> Result<EmpiricalMeasure> {
    EmpiricalMeasure::weighted(records, schema, None)
}

impl EmpiricalMeasure {
    pub fn weighted(records: &[FeatureRecord], schema: &Schema, weights: Option<&[f64]>) -> Result<Self> {
        if records.is_empty() {
            return Err(Error::Precondition("empirical measure needs at least one record".into()));
        }
        let mut real = vec![Vec::with_capacity(records.len()); schema.real.len()];
        let mut categorical = vec![Vec::with_capacity(records.len()); schema.categorical.len()];
        for (i, r) in records.iter().enumerate() {
            if r.real.len() != schema.real.len() || r.categorical.len() != schema.categorical.len() {
                return Err(Error::SchemaMismatch(format!("record {i} does not match the schema")));
            }
            for (c, v) in real.iter_mut().zip(&r.real) {
                if !v.is_finite() {
                    return Err(Error::DegenerateInput(format!("non-finite feature in record {i}")));
                }
                c.push(*v);
            }
            for (c, v) in categorical.iter_mut().zip(&r.categorical) {
                c.push(v.clone());
            }
        }
        let weights = match weights {
            None => vec![1.0 / records.len() as f64; records.len()],
            Some(w) => {
                if w.len() != records.len() || w.iter().any(|x| !(*x >= 0.0)) {
                    return Err(Error::DegenerateInput("weights must be nonnegative, one per record".into()));
                }
                let s: f64 = w.iter().sum();
                if s <= 0.0 {
                    return Err(Error::DegenerateInput("weights sum to zero".into()));
                }
                // already normalized up to rounding: keep the bits as given
                if (s - 1.0).abs() <= 1e-12 {
                    w.to_vec()
                } else {
                    w.iter().map(|x| x / s).collect()
                }
            }
        };
        Ok(EmpiricalMeasure { schema: schema.clone(), real, categorical, weights, meta: Metadata::default() })
    }

    /// Measure on a single real feature.
    pub fn from_values(name: &str, values: &[f64]) -> Result<Self> {
        let schema = Schema::new(&[name], &[]);
        let recs: Vec<FeatureRecord> = values.iter().map(|&v| FeatureRecord { real: vec![v], categorical: vec![] }).collect();
        empirical(&recs, &schema)
    }

    pub fn with_meta(mut self, meta: Metadata) -> Self {
        self.meta = meta;
        self
    }

    pub fn schema(&self) -> &Schema {
        &self.schema
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn real_feature(&self, name: &str) -> Result<&[f64]> {
        let i = self.schema.real.iter().position(|n| n == name).ok_or_else(|| Error::SchemaMismatch(format!("no real feature {name:?}")))?;
        Ok(&self.real[i])
    }

    pub fn categorical_feature(&self, name: &str) -> Result<&[String]> {
        let i = self.schema.categorical.iter().position(|n| n == name).ok_or_else(|| Error::SchemaMismatch(format!("no categorical feature {name:?}")))?;
        Ok(&self.categorical[i])
    }

    /// Weighted mean of a real feature.
    pub fn mean(&self, name: &str) -> Result<f64> {
        Ok(self.real_feature(name)?.iter().zip(&self.weights).map(|(x, w)| x * w).sum())
    }

    /// Atoms as rows (real features then categorical ones).
    pub fn records(&self) -> Vec<FeatureRecord> {
        (0..self.len())
            .map(|i| FeatureRecord { real: self.real.iter().map(|c| c[i]).collect(), categorical: self.categorical.iter().map(|c| c[i].clone()).collect() })
            .collect()
    }

    /// One row per atom: `weight`, real features, categorical features.
    pub fn to_csv(&self) -> String {
        let mut head = vec!["weight".to_string()];
        head.extend(self.schema.real.iter().cloned());
        head.extend(self.schema.categorical.iter().cloned());
        let mut out = crate::io::csv_line(&head);
        for (i, w) in self.weights.iter().enumerate() {
            let mut row = vec![format!("{w}")];
            row.extend(self.real.iter().map(|c| format!("{}", c[i])));
            row.extend(self.categorical.iter().map(|c| c[i].clone()));
            out.push_str(&crate::io::csv_line(&row));
        }
        out
    }

    pub fn sidecar(&self) -> MeasureSidecar {
        MeasureSidecar { schema: self.schema.clone(), meta: self.meta.clone(), atoms: self.len() }
    }

    /// Inverse of [`to_csv`](Self::to_csv) given the sidecar.
    pub fn from_csv(text: &str, sidecar: &MeasureSidecar) -> Result<Self> {
        let mut lines = text.lines();
        let head: Vec<&str> = lines.next().unwrap_or("").split(',').collect();
        let expected: Vec<&str> = std::iter::once("weight").chain(sidecar.schema.real.iter().map(|s| s.as_str())).chain(sidecar.schema.categorical.iter().map(|s| s.as_str())).collect();
        if head != expected {
            return Err(Error::SchemaMismatch(format!("CSV header {head:?} does not match the sidecar schema")));
        }
        let nr = sidecar.schema.real.len();
        let mut recs = Vec::new();
        let mut weights = Vec::new();
        for (i, line) in lines.filter(|l| !l.is_empty()).enumerate() {
            let f: Vec<&str> = line.split(',').collect();
            if f.len() != expected.len() {
                return Err(Error::SchemaMismatch(format!("CSV row {} has {} fields", i + 1, f.len())));
            }
            let num = |s: &str| s.parse::<f64>().map_err(|_| Error::Config(format!("bad number {s:?} in CSV row {}", i + 1)));
            weights.push(num(f[0])?);
            let real = f[1..1 + nr].iter().map(|s| num(s)).collect::<Result<Vec<_>>>()?;
            recs.push(FeatureRecord { real, categorical: f[1 + nr..].iter().map(|s| s.to_string()).collect() });
        }
        if recs.len() != sidecar.atoms {
            return Err(Error::SchemaMismatch(format!("CSV has {} atoms, sidecar declares {}", recs.len(), sidecar.atoms)));
        }
        Ok(EmpiricalMeasure::weighted(&recs, &sidecar.schema, Some(&weights))?.with_meta(sidecar.meta.clone()))
    }

    /// Measure on the atoms `idx` (with repetition), uniform weights.
    fn resample(&self, idx: &[usize]) -> EmpiricalMeasure {
        EmpiricalMeasure {
            schema: self.schema.clone(),
            real: self.real.iter().map(|c| idx.iter().map(|&i| c[i]).collect()).collect(),
            categorical: self.categorical.iter().map(|c| idx.iter().map(|&i| c[i].clone()).collect()).collect(),
            weights: vec![1.0 / idx.len() as f64; idx.len()],
            meta: self.meta.clone(),
        }
    }

    /// Index drawn with probability proportional to the weights.
    fn draw<R: Rng>(&self, cdf: &[f64], rng: &mut R) -> usize {
        let u: f64 = rng.random();
        cdf.partition_point(|&c| c <= u).min(self.len() - 1)
    }
}

fn same_schema(a: &EmpiricalMeasure, b: &EmpiricalMeasure) -> Result<()> {
    if a.schema != b.schema {
        return Err(Error::SchemaMismatch("compared measures have different schemas".into()));
    }
    Ok(())
}

fn sorted_atoms<T: Float>(xs: &[T], ws: &[T]) -> Vec<(T, T)> {
    let mut v: Vec<(T, T)> = xs.iter().copied().zip(ws.iter().copied()).collect();
    v.sort_by(|a, b| a.0.partial_cmp(&b.0).expect("finite atoms"));
    v
}

/// Merge walk over two sorted weighted samples; calls `f(x, next_x, F1, F2)`
/// on each gap between consecutive distinct atom positions.
fn walk<T: Float>(a: &[(T, T)], b: &[(T, T)], mut f: impl FnMut(T, Option<T>, T, T)) {
    let (mut i, mut j) = (0, 0);
    let (mut fa, mut fb) = (T::zero(), T::zero());
    while i < a.len() || j < b.len() {
        let x = match (a.get(i), b.get(j)) {
            (Some(p), Some(q)) => p.0.min(q.0),
            (Some(p), None) => p.0,
            (None, Some(q)) => q.0,
            (None, None) => unreachable!(),
        };
        while i < a.len() && a[i].0 == x {
            fa = fa + a[i].1;
            i += 1;
        }
        while j < b.len() && b[j].0 == x {
            fb = fb + b[j].1;
            j += 1;
        }
        let next = match (a.get(i), b.get(j)) {
            (Some(p), Some(q)) => Some(p.0.min(q.0)),
            (Some(p), None) => Some(p.0),
            (None, Some(q)) => Some(q.0),
            (None, None) => None,
        };
        f(x, next, fa, fb);
    }
}

/// Kolmogorov-Smirnov distance `sup |F1 - F2|` of two weighted samples.
pub fn ks_weighted<T: Float>(xa: &[T], wa: &[T], xb: &[T], wb: &[T]) -> T {
    let (a, b) = (sorted_atoms(xa, wa), sorted_atoms(xb, wb));
    let mut d = T::zero();
    walk(&a, &b, |_, _, fa, fb| d = d.max((fa - fb).abs()));
    d.min(T::one())
}

/// 1-Wasserstein distance `int |F1 - F2|` of two weighted samples.
pub fn w1_weighted<T: Float>(xa: &[T], wa: &[T], xb: &[T], wb: &[T]) -> T {
    let (a, b) = (sorted_atoms(xa, wa), sorted_atoms(xb, wb));
    let mut s = T::zero();
    walk(&a, &b, |x, next, fa, fb| {
        if let Some(n) = next {
            s = s + (fa - fb).abs() * (n - x);
        }
    });
    s
}

pub fn ks_distance(m1: &EmpiricalMeasure, m2: &EmpiricalMeasure, feature: &str) -> Result<f64> {
    same_schema(m1, m2)?;
    Ok(ks_weighted(m1.real_feature(feature)?, &m1.weights, m2.real_feature(feature)?, &m2.weights))
}

pub fn wasserstein1(m1: &EmpiricalMeasure, m2: &EmpiricalMeasure, feature: &str) -> Result<f64> {
    same_schema(m1, m2)?;
    Ok(w1_weighted(m1.real_feature(feature)?, &m1.weights, m2.real_feature(feature)?, &m2.weights))
}

/// Total variation distance of the induced categorical distributions.
pub fn categorical_tv(m1: &EmpiricalMeasure, m2: &EmpiricalMeasure, feature: &str) -> Result<f64> {
    same_schema(m1, m2)?;
    let mut mass: BTreeMap<&str, (f64, f64)> = BTreeMap::new();
    for (c, w) in m1.categorical_feature(feature)?.iter().zip(&m1.weights) {
        mass.entry(c).or_default().0 += w;
    }
    for (c, w) in m2.categorical_feature(feature)?.iter().zip(&m2.weights) {
        mass.entry(c).or_default().1 += w;
    }
    Ok((0.5 * mass.values().map(|(a, b)| (a - b).abs()).sum::<f64>()).min(1.0))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Metric {
    Ks,
    W1,
    Tv,
}

impl Metric {
    pub fn distance(&self, m1: &EmpiricalMeasure, m2: &EmpiricalMeasure, feature: &str) -> Result<f64> {
        match self {
            Metric::Ks => ks_distance(m1, m2, feature),
            Metric::W1 => wasserstein1(m1, m2, feature),
            Metric::Tv => categorical_tv(m1, m2, feature),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureMetric {
    pub feature: String,
    pub metric: Metric,
}

impl FeatureMetric {
    pub fn new(feature: &str, metric: Metric) -> Self {
        FeatureMetric { feature: feature.to_string(), metric }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    /// Every distance lies inside the noise band.
    Converged,
    /// Distances never increase.
    Decreasing,
    /// One increase, no larger than the noise band.
    NonincreasingWithinNoise,
    NotDecreasing,
}

impl Verdict {
    pub fn passes(&self) -> bool {
        !matches!(self, Verdict::NotDecreasing)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrendOptions {
    pub bootstrap_reps: usize,
    pub seed: u64,
    /// Overrides the bootstrap estimate when set.
    pub noise_band: Option<f64>,
}

impl Default for TrendOptions {
    fn default() -> Self {
        TrendOptions { bootstrap_reps: 50, seed: 0, noise_band: None }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureTrend {
    pub feature: String,
    pub metric: Metric,
    pub distances: Vec<f64>,
    /// Bootstrap standard deviation of each distance.
    pub noise_sd: Vec<f64>,
    pub noise_band: f64,
    pub inversions: usize,
    pub verdict: Verdict,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrendReport {
    pub features: Vec<FeatureTrend>,
    pub note: String,
}

pub const TREND_NOTE: &str = "per-feature distances only; feature choice and noise band policy (2 x largest bootstrap sd) are choices of this tool, not a full weak-* statement";

/// Verdict for a distance sequence and noise band.
pub fn classify(distances: &[f64], band: f64) -> (usize, Verdict) {
    let rises: Vec<f64> = distances.windows(2).map(|w| w[1] - w[0]).filter(|&r| r > 0.0).collect();
    let verdict = if distances.iter().all(|&d| d <= band) {
        Verdict::Converged
    } else if rises.is_empty() {
        Verdict::Decreasing
    } else if rises.len() == 1 && rises[0] <= band {
        Verdict::NonincreasingWithinNoise
    } else {
        Verdict::NotDecreasing
    };
    (rises.len(), verdict)
}

/// Distances of each measure to `reference`, with a bootstrap noise band.
pub fn trend_report(seq: &[EmpiricalMeasure], reference: &EmpiricalMeasure, features: &[FeatureMetric], opts: &TrendOptions) -> Result<TrendReport> {
    if seq.len() < 3 {
        return Err(Error::Precondition("trend report needs at least 3 measures".into()));
    }
    for m in seq {
        same_schema(m, reference)?;
    }
    let mut out = Vec::with_capacity(features.len());
    for (fi, fm) in features.iter().enumerate() {
        let distances = seq.iter().map(|m| fm.metric.distance(m, reference, &fm.feature)).collect::<Result<Vec<f64>>>()?;
        let mut noise_sd = Vec::with_capacity(seq.len());
        for (mi, m) in seq.iter().enumerate() {
            noise_sd.push(bootstrap_sd(m, reference, fm, opts, (fi * seq.len() + mi) as u64)?);
        }
        let band = opts.noise_band.unwrap_or_else(|| 2.0 * noise_sd.iter().cloned().fold(0.0, f64::max));
        let (inversions, verdict) = classify(&distances, band);
        out.push(FeatureTrend { feature: fm.feature.clone(), metric: fm.metric, distances, noise_sd, noise_band: band, inversions, verdict });
    }
    Ok(TrendReport { features: out, note: TREND_NOTE.to_string() })
}

fn bootstrap_sd(m: &EmpiricalMeasure, reference: &EmpiricalMeasure, fm: &FeatureMetric, opts: &TrendOptions, tag: u64) -> Result<f64> {
    if opts.bootstrap_reps < 2 {
        return Ok(0.0);
    }
    let mut cdf = Vec::with_capacity(m.len());
    let mut acc = 0.0;
    for w in &m.weights {
        acc += w;
        cdf.push(acc);
    }
    let mut vals = Vec::with_capacity(opts.bootstrap_reps);
    for rep in 0..opts.bootstrap_reps {
        let mut rng = sample_rng(opts.seed, (tag << 20) | rep as u64);
        let idx: Vec<usize> = (0..m.len()).map(|_| m.draw(&cdf, &mut rng)).collect();
        vals.push(fm.metric.distance(&m.resample(&idx), reference, &fm.feature)?);
    }
    let mean = vals.iter().sum::<f64>() / vals.len() as f64;
    let var = vals.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (vals.len() - 1) as f64;
    Ok(var.sqrt())
}
