//! Empirical best-approximation measures: features of record streams,
//! the Monte Carlo generic baseline and trends along rescaled algebraic targets.

use std::sync::Arc;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bestapprox::{best_approximations, build_target_from_field, BestApproxRecord, Limit, TargetVector, GENERIC_BITS};
use crate::error::{Error, Result};
use crate::lattice::Norm;
use crate::numfield::{rescale_basis, AlgebraicNumber, TotallyRealField};
use crate::rng::sample_rng;
use crate::stats::{empirical, trend_report, EmpiricalMeasure, FeatureMetric, FeatureRecord, Metadata, Metric, Schema, TrendOptions, TrendReport};

/// `w_norm`, `w_dir_1..`, then one categorical `res_m` per modulus.
pub fn record_schema(dim: usize, moduli: &[u64]) -> Schema {
    let mut real = vec!["w_norm".to_string()];
    real.extend((1..=dim).map(|j| format!("w_dir_{j}")));
    Schema { real, categorical: moduli.iter().map(|m| format!("res_{m}")).collect() }
}

pub fn record_features(rec: &BestApproxRecord, norm: Norm, moduli: &[u64]) -> FeatureRecord {
    let wn = rec.w_norm(norm);
    let mut real = vec![wn];
    real.extend(rec.w.iter().map(|x| x / wn));
    let categorical = moduli
        .iter()
        .map(|&m| {
            let m_big = num_bigint::BigInt::from(m);
            let r = |x: &num_bigint::BigInt| num_integer::Integer::mod_floor(x, &m_big).to_string();
            let ps: Vec<String> = rec.p.iter().map(r).collect();
            format!("{};{}", ps.join(":"), r(&rec.q))
        })
        .collect();
    FeatureRecord { real, categorical }
}

pub fn records_measure(recs: &[BestApproxRecord], dim: usize, norm: Norm, moduli: &[u64]) -> Result<EmpiricalMeasure> {
    let feats: Vec<FeatureRecord> = recs.iter().map(|r| record_features(r, norm, moduli)).collect();
    empirical(&feats, &record_schema(dim, moduli))
}

/// Monte Carlo estimate of the generic best-approximation measure.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BaselineSpec {
    pub dim: usize,
    pub targets: usize,
    pub records: usize,
    pub seed: u64,
    pub bits: u32,
    pub norm: Norm,
    pub moduli: Vec<u64>,
}

impl BaselineSpec {
    pub fn new(dim: usize, seed: u64) -> Self {
        BaselineSpec { dim, targets: 1000, records: 500, seed, bits: GENERIC_BITS, norm: Norm::Sup, moduli: vec![2] }
    }
}

/// Records of target `i` of the baseline; independent of scheduling.
pub fn baseline_target_records(spec: &BaselineSpec, i: usize) -> Result<Vec<BestApproxRecord>> {
    let mut rng = sample_rng(spec.seed, i as u64);
    let v = TargetVector::random_generic(spec.dim, spec.bits, spec.norm, &mut rng);
    best_approximations(&v, &Limit::MaxK(spec.records))
}

pub fn generic_baseline(spec: &BaselineSpec) -> Result<EmpiricalMeasure> {
    if spec.targets == 0 || spec.records == 0 || spec.dim == 0 {
        return Err(Error::Config("baseline needs targets, records and dim > 0".into()));
    }
    let per: Vec<Vec<FeatureRecord>> = (0..spec.targets)
        .into_par_iter()
        .map(|i| Ok(baseline_target_records(spec, i)?.iter().map(|r| record_features(r, spec.norm, &spec.moduli)).collect()))
        .collect::<Result<_>>()?;
    let feats: Vec<FeatureRecord> = per.into_iter().flatten().collect();
    let m = empirical(&feats, &record_schema(spec.dim, &spec.moduli))?;
    Ok(m.with_meta(Metadata { run_id: "generic-baseline".into(), seed: Some(spec.seed), n_index: None }))
}

/// Each exponent must grow and, for two or more, each pairwise gap must grow.
pub fn check_nu_schedule(schedule: &[Vec<i64>]) -> Result<()> {
    if schedule.len() < 3 {
        return Err(Error::Config(format!("schedule has {} steps, at least 3 are needed", schedule.len())));
    }
    let d = schedule[0].len();
    if d == 0 || schedule.iter().any(|v| v.len() != d) {
        return Err(Error::Config("schedule vectors must share a positive length".into()));
    }
    for (n, w) in schedule.windows(2).enumerate() {
        for r in 0..d {
            if w[1][r] <= w[0][r] {
                return Err(Error::ScheduleViolation(format!("i_{} does not increase between steps {n} and {}", r + 1, n + 1)));
            }
            for j in r + 1..d {
                if (w[1][r] - w[1][j]).abs() <= (w[0][r] - w[0][j]).abs() {
                    return Err(Error::ScheduleViolation(format!("|i_{} - i_{}| does not increase between steps {n} and {}", r + 1, j + 1, n + 1)));
                }
            }
        }
    }
    Ok(())
}

/// `(m^{i_1} a_1, ..., m^{i_k} a_k)` as a target.
pub fn scaled_target(field: &Arc<TotallyRealField>, gens: &[AlgebraicNumber], m: i64, exponents: &[i64], norm: Norm) -> Result<TargetVector> {
    let scaled = rescale_basis(gens, m, exponents)?;
    build_target_from_field(field, &scaled, true, norm)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NuBestPlan {
    pub m: i64,
    pub schedule: Vec<Vec<i64>>,
    pub records: usize,
    pub norm: Norm,
    pub moduli: Vec<u64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NuBestLevel {
    pub exponents: Vec<i64>,
    pub records: usize,
    pub last_q_bits: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NuBestReport {
    pub levels: Vec<NuBestLevel>,
    pub baseline: Metadata,
    pub baseline_atoms: usize,
    pub trend: TrendReport,
}

pub fn default_nu_features() -> Vec<FeatureMetric> {
    vec![FeatureMetric::new("w_norm", Metric::Ks)]
}

/// Record measures of the rescaled targets and their trend to `baseline`.
pub fn nu_best_trend(
    field: &Arc<TotallyRealField>,
    gens: &[AlgebraicNumber],
    plan: &NuBestPlan,
    baseline: &EmpiricalMeasure,
    features: &[FeatureMetric],
    opts: &TrendOptions,
) -> Result<NuBestReport> {
    check_nu_schedule(&plan.schedule)?;
    if plan.schedule[0].len() != gens.len() {
        return Err(Error::Config(format!("schedule vectors have {} entries for {} generators", plan.schedule[0].len(), gens.len())));
    }
    let runs: Vec<(NuBestLevel, EmpiricalMeasure)> = plan
        .schedule
        .par_iter()
        .enumerate()
        .map(|(n, ivec)| {
            let v = scaled_target(field, gens, plan.m, ivec, plan.norm)?;
            let recs = best_approximations(&v, &Limit::MaxK(plan.records))?;
            let meas = records_measure(&recs, gens.len(), plan.norm, &plan.moduli)?.with_meta(Metadata { run_id: format!("level-{n}"), seed: None, n_index: Some(n as i64) });
            let level = NuBestLevel { exponents: ivec.clone(), records: recs.len(), last_q_bits: recs.last().map_or(0, |r| r.q.bits()) };
            Ok((level, meas))
        })
        .collect::<Result<_>>()?;
    let (levels, measures): (Vec<_>, Vec<_>) = runs.into_iter().unzip();
    let trend = trend_report(&measures, baseline, features, opts)?;
    Ok(NuBestReport { levels, baseline: baseline.meta.clone(), baseline_atoms: baseline.len(), trend })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn schedules() {
        assert!(check_nu_schedule(&[vec![1, 2], vec![2, 4], vec![3, 6]]).is_ok());
        assert!(matches!(check_nu_schedule(&[vec![1, 2]]), Err(Error::Config(_))));
        assert!(matches!(check_nu_schedule(&[vec![1, 1], vec![2, 2], vec![3, 3]]), Err(Error::ScheduleViolation(_))));
        assert!(matches!(check_nu_schedule(&[vec![1], vec![1], vec![2]]), Err(Error::ScheduleViolation(_))));
    }

    #[test]
    fn baseline_is_deterministic() {
        let mut spec = BaselineSpec::new(1, 3);
        spec.targets = 4;
        spec.records = 20;
        let a = generic_baseline(&spec).unwrap();
        let b = generic_baseline(&spec).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.len(), 80);
    }
}
