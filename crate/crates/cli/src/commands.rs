use std::path::{Path, PathBuf};
use std::sync::Arc;

use clap::Args;
use num_traits::Signed;
use orbitlab::bestapprox::{best_approximations_with, build_target_from_field, BestApproxRecord, Limit, Strategy, TargetVector, GENERIC_BITS};
use orbitlab::io::{csv_line, fmt_f64, fmt_rational, parse_element, parse_rational, BasisSpec, FieldSpec};
use orbitlab::nubest::{default_nu_features, generic_baseline, nu_best_trend, BaselineSpec, NuBestPlan};
use orbitlab::numfield::rescale_basis;
use orbitlab::orbitflow::{equidist_trend, haar_reference_d2, observables_measure, orbit_for, sample_orbit, HaarReferenceSpec, OrbitSamplePlan};
use orbitlab::padic::{check_good, default_balls, tight_constant, weak_ivt_check, Ball, EpsGrid, GoodFunctionSpec, IvtBound, PadicFunction, ENUMERATION_CAP};
use orbitlab::rng::sample_rng;
use orbitlab::stats::{EmpiricalMeasure, FeatureMetric, MeasureSidecar, Metadata, Metric, TrendOptions};
use orbitlab::{AlgebraicNumber, Error, Norm, Result, TotallyRealField};
use serde::{Deserialize, Serialize};

fn parse_norm(s: &str) -> std::result::Result<Norm, String> {
    match s.to_ascii_lowercase().as_str() {
        "sup" | "max" | "inf" => Ok(Norm::Sup),
        "euclidean" | "euclid" | "l2" => Ok(Norm::Euclidean),
        _ => Err(format!("unknown norm {s:?} (sup | euclidean)")),
    }
}

fn write_out(out: Option<&Path>, text: &str) -> Result<()> {
    match out {
        Some(p) => std::fs::write(p, text).map_err(|e| Error::Io(format!("{}: {e}", p.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn to_json<T: Serialize>(x: &T) -> String {
    let mut s = serde_json::to_string_pretty(x).expect("report serializes");
    s.push('\n');
    s
}

/// `base.csv` -> `base.schema.json`.
pub fn sidecar_path(csv: &Path) -> PathBuf {
    csv.with_extension("schema.json")
}

fn write_measure(out: Option<&Path>, m: &EmpiricalMeasure) -> Result<()> {
    write_out(out, &m.to_csv())?;
    if let Some(p) = out {
        write_out(Some(&sidecar_path(p)), &to_json(&m.sidecar()))?;
    }
    Ok(())
}

fn read_measure(csv: &Path) -> Result<EmpiricalMeasure> {
    let side = sidecar_path(csv);
    let text = std::fs::read_to_string(csv).map_err(|e| Error::Config(format!("{}: {e}", csv.display())))?;
    let side_text = std::fs::read_to_string(&side).map_err(|e| Error::Config(format!("{}: {e}", side.display())))?;
    let sidecar: MeasureSidecar = serde_json::from_str(&side_text).map_err(|e| Error::Config(format!("{}: {e}", side.display())))?;
    EmpiricalMeasure::from_csv(&text, &sidecar)
}

fn load_field(path: &Path) -> Result<Arc<TotallyRealField>> {
    FieldSpec::load(path)?.build()
}

fn parse_gens(field: &Arc<TotallyRealField>, gens: &str) -> Result<Vec<AlgebraicNumber>> {
    gens.split(',').filter(|s| !s.trim().is_empty()).map(|g| parse_element(g, field)).collect()
}

/// `1, b, ..., b^(d-1)` unless a basis file is given.
fn load_basis(field: &Arc<TotallyRealField>, basis: Option<&Path>) -> Result<Vec<AlgebraicNumber>> {
    match basis {
        Some(p) => BasisSpec::load(p)?.build(field),
        None => Ok((0..field.degree() as u64).map(|k| field.generator().pow(k)).collect()),
    }
}

/// `"0,2;0,4"` -> `[[0,2],[0,4]]`.
fn parse_schedule(s: &str) -> Result<Vec<Vec<i64>>> {
    s.split(';').filter(|x| !x.trim().is_empty()).map(orbitlab::io::parse_list::<i64>).collect()
}

fn parse_matrix(s: &str) -> Result<Vec<Vec<f64>>> {
    s.split(';').filter(|x| !x.trim().is_empty()).map(orbitlab::io::parse_list::<f64>).collect()
}

fn trend_options(bootstrap: usize, seed: u64, noise_band: Option<f64>) -> TrendOptions {
    TrendOptions { bootstrap_reps: bootstrap, seed, noise_band }
}

fn parse_features(spec: &str) -> Result<Vec<FeatureMetric>> {
    spec.split(',')
        .filter(|s| !s.trim().is_empty())
        .map(|item| {
            let (name, metric) = item.trim().split_once(':').unwrap_or((item.trim(), "ks"));
            let metric = match metric {
                "ks" => Metric::Ks,
                "w1" => Metric::W1,
                "tv" => Metric::Tv,
                m => return Err(Error::Config(format!("unknown metric {m:?} (ks | w1 | tv)"))),
            };
            Ok(FeatureMetric::new(name, metric))
        })
        .collect()
}

#[derive(Args, Serialize, Deserialize, Debug, Clone)]
pub struct BestApproxArgs {
    /// Field file (TOML or JSON).
    #[arg(long, required_unless_present = "random_dim")]
    pub field: Option<PathBuf>,
    /// Comma-separated coordinates in the generator `b`.
    #[arg(long, default_value = "b")]
    pub gens: String,
    /// Random dyadic target of this dimension instead of a field target.
    #[arg(long, conflicts_with = "field")]
    pub random_dim: Option<usize>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = GENERIC_BITS)]
    pub bits: u32,
    #[arg(long, value_parser = parse_norm, default_value = "sup")]
    pub norm: Norm,
    #[arg(long)]
    pub max_q: Option<String>,
    #[arg(long)]
    pub max_k: Option<usize>,
    #[arg(long, value_delimiter = ',')]
    #[serde(default)]
    pub moduli: Vec<u64>,
    /// Require the coordinates and 1 to span the field.
    #[arg(long)]
    #[serde(default)]
    pub require_span: bool,
    #[arg(long)]
    #[serde(default)]
    pub scan: bool,
    /// CSV output (stdout when absent).
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// JSON mirror with exact values.
    #[arg(long)]
    pub json: Option<PathBuf>,
}

#[derive(Serialize)]
struct RecordJson {
    k: usize,
    q: String,
    p: Vec<String>,
    err: String,
    err_lo: String,
    err_hi: String,
    w: Vec<String>,
    hnf: Vec<String>,
    residues: std::collections::BTreeMap<u64, (Vec<u64>, u64)>,
}

pub fn records_csv(recs: &[BestApproxRecord], dim: usize, moduli: &[u64]) -> String {
    let mut head = vec!["k".to_string(), "q".into(), "p".into(), "err".into()];
    head.extend((1..=dim).map(|j| format!("w_{j}")));
    for i in 1..=dim {
        for j in 1..=dim {
            head.push(format!("hnf_{i}{j}"));
        }
    }
    head.extend(moduli.iter().map(|m| format!("res_{m}")));
    let mut out = csv_line(&head);
    for r in recs {
        let mut row = vec![r.k.to_string(), r.q.to_string(), r.p.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(";"), fmt_f64(r.err_f64())];
        row.extend(r.w.iter().map(|x| fmt_f64(*x)));
        row.extend(r.lambda.hnf_strings());
        for m in moduli {
            let (ps, q) = &r.residues[m];
            row.push(format!("{};{}", ps.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(":"), q));
        }
        out.push_str(&csv_line(&row));
    }
    out
}

pub fn cmd_best_approx(a: &BestApproxArgs) -> Result<()> {
    let limit = match (&a.max_q, a.max_k) {
        (Some(q), None) => {
            let q = parse_rational(q)?;
            if !q.is_integer() || !q.is_positive() {
                return Err(Error::Config("--max-q must be a positive integer".into()));
            }
            Limit::MaxQ(q.to_integer())
        }
        (None, Some(k)) if k > 0 => Limit::MaxK(k),
        (None, Some(_)) => return Err(Error::Config("--max-k must be positive".into())),
        _ => return Err(Error::Config("give exactly one of --max-q and --max-k".into())),
    };
    let target = match (&a.field, a.random_dim) {
        (Some(f), None) => {
            let field = load_field(f)?;
            build_target_from_field(&field, &parse_gens(&field, &a.gens)?, a.require_span, a.norm)?
        }
        (None, Some(d)) if d > 0 => {
            let mut rng = sample_rng(a.seed, 0);
            TargetVector::random_generic(d, a.bits, a.norm, &mut rng)
        }
        _ => return Err(Error::Config("give --field or a positive --random-dim".into())),
    };
    let strategy = if a.scan { Strategy::Scan } else { Strategy::Lattice };
    let recs: Vec<BestApproxRecord> = best_approximations_with(&target, &limit, strategy)?.into_iter().map(|r| r.with_residues(&a.moduli)).collect();
    let dim = target.dim();
    write_out(a.out.as_deref(), &records_csv(&recs, dim, &a.moduli))?;
    if let Some(j) = &a.json {
        let rows: Vec<RecordJson> = recs
            .iter()
            .map(|r| RecordJson {
                k: r.k,
                q: r.q.to_string(),
                p: r.p.iter().map(|x| x.to_string()).collect(),
                err: fmt_f64(r.err_f64()),
                err_lo: fmt_rational(&r.err.lo().to_rational()),
                err_hi: fmt_rational(&r.err.hi().to_rational()),
                w: r.w.iter().map(|x| fmt_f64(*x)).collect(),
                hnf: r.lambda.hnf_strings(),
                residues: r.residues.clone(),
            })
            .collect();
        write_out(Some(j), &to_json(&rows))?;
    }
    Ok(())
}

#[derive(Args, Serialize, Deserialize, Debug, Clone)]
pub struct OrbitSampleArgs {
    #[arg(long)]
    pub field: PathBuf,
    /// Basis file; the power basis when absent.
    #[arg(long)]
    pub basis: Option<PathBuf>,
    #[arg(long, default_value_t = 2)]
    pub m: i64,
    /// Exponents `i` of the rescaling `m^i`.
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    #[serde(default)]
    pub ivec: Vec<i64>,
    #[arg(long = "T", default_value_t = 20.0)]
    pub t_max: f64,
    #[arg(long = "N", default_value_t = 20_000)]
    pub samples: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, value_delimiter = ',', default_value = "0.5,1,1.5,2")]
    pub radii: Vec<f64>,
    #[arg(long, value_parser = parse_norm, default_value = "euclidean")]
    pub norm: Norm,
    /// Right translate as rows `a,b;c,d`.
    #[arg(long)]
    pub translate: Option<String>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

pub fn cmd_orbit_sample(a: &OrbitSampleArgs) -> Result<()> {
    let field = load_field(&a.field)?;
    let mut basis = load_basis(&field, a.basis.as_deref())?;
    if !a.ivec.is_empty() {
        basis = rescale_basis(&basis, a.m, &a.ivec)?;
    }
    let plan = OrbitSamplePlan { t_max: a.t_max, samples: a.samples, seed: a.seed, translate: a.translate.as_deref().map(parse_matrix).transpose()?, radii: a.radii.clone(), norm: a.norm };
    let g = orbit_for(&basis)?;
    let samples = sample_orbit(&g, &plan)?;
    let mut head = vec!["id".to_string(), "lambda1".into()];
    head.extend(a.radii.iter().map(|r| format!("N_{}", fmt_f64(*r))));
    let mut out = csv_line(&head);
    for s in &samples {
        let mut row = vec![s.index.to_string(), fmt_f64(s.obs.lambda[0])];
        row.extend(s.obs.counts.iter().map(|c| c.to_string()));
        out.push_str(&csv_line(&row));
    }
    write_out(a.out.as_deref(), &out)
}

#[derive(Args, Serialize, Deserialize, Debug, Clone)]
pub struct EquidistArgs {
    #[arg(long)]
    pub field: PathBuf,
    #[arg(long)]
    pub basis: Option<PathBuf>,
    #[arg(long, default_value_t = 2)]
    pub m: i64,
    /// Exponent vectors `i_n`, e.g. `0,2;0,4;0,6`.
    #[arg(long, allow_hyphen_values = true)]
    pub schedule: String,
    #[arg(long = "T", default_value_t = 40.0)]
    pub t_max: f64,
    #[arg(long = "N", default_value_t = 20_000)]
    pub samples: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, value_delimiter = ',', default_value = "0.5,1,1.5,2")]
    pub radii: Vec<f64>,
    #[arg(long, value_parser = parse_norm, default_value = "euclidean")]
    pub norm: Norm,
    /// Haar reference for d = 2: horocycle height, sample count, seed.
    #[arg(long, default_value_t = 1e-4)]
    pub haar_y: f64,
    #[arg(long, default_value_t = 100_000)]
    pub haar_n: usize,
    #[arg(long, default_value_t = 0)]
    pub haar_seed: u64,
    #[arg(long, default_value_t = 50)]
    pub bootstrap: usize,
    #[arg(long)]
    pub noise_band: Option<f64>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

pub fn cmd_equidist(a: &EquidistArgs) -> Result<()> {
    let field = load_field(&a.field)?;
    let basis = load_basis(&field, a.basis.as_deref())?;
    let schedule = parse_schedule(&a.schedule)?;
    let plan = OrbitSamplePlan { t_max: a.t_max, samples: a.samples, seed: a.seed, translate: None, radii: a.radii.clone(), norm: a.norm };
    let haar = HaarReferenceSpec { y: a.haar_y, samples: a.haar_n, seed: a.haar_seed };
    let report = equidist_trend(&basis, a.m, &schedule, &plan, (basis.len() == 2).then_some(&haar), &trend_options(a.bootstrap, a.seed, a.noise_band))?;
    write_out(a.out.as_deref(), &to_json(&report))
}

#[derive(Args, Serialize, Deserialize, Debug, Clone)]
pub struct NuBestArgs {
    #[arg(long)]
    pub field: PathBuf,
    /// Coordinates `a_j`; `b, b^2, ..., b^(d-1)` when absent.
    #[arg(long)]
    pub gens: Option<String>,
    #[arg(long, default_value_t = 2)]
    pub m: i64,
    /// Exponent vectors `i_n`, e.g. `1,2;2,4;3,6;4,8`.
    #[arg(long, allow_hyphen_values = true)]
    pub schedule: String,
    #[arg(long = "K", default_value_t = 500)]
    pub records: usize,
    #[arg(long, value_parser = parse_norm, default_value = "sup")]
    pub norm: Norm,
    #[arg(long, value_delimiter = ',', default_value = "2")]
    pub moduli: Vec<u64>,
    /// Baseline measure CSV (with its `.schema.json` sidecar); generated when absent.
    #[arg(long)]
    pub reference: Option<PathBuf>,
    #[arg(long, default_value_t = 1000)]
    pub baseline_targets: usize,
    #[arg(long, default_value_t = 0)]
    pub baseline_seed: u64,
    #[arg(long, default_value_t = GENERIC_BITS)]
    pub baseline_bits: u32,
    /// Feature list `name:metric`, metric in ks | w1 | tv.
    #[arg(long, default_value = "w_norm:ks")]
    pub features: String,
    #[arg(long, default_value_t = 50)]
    pub bootstrap: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub noise_band: Option<f64>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

pub fn cmd_nu_best_compare(a: &NuBestArgs) -> Result<()> {
    let field = load_field(&a.field)?;
    let gens = match &a.gens {
        Some(g) => parse_gens(&field, g)?,
        None => (1..field.degree() as u64).map(|k| field.generator().pow(k)).collect(),
    };
    let plan = NuBestPlan { m: a.m, schedule: parse_schedule(&a.schedule)?, records: a.records, norm: a.norm, moduli: a.moduli.clone() };
    orbitlab::nubest::check_nu_schedule(&plan.schedule)?;
    let baseline = match &a.reference {
        Some(p) => read_measure(p)?,
        None => {
            let spec = BaselineSpec { dim: gens.len(), targets: a.baseline_targets, records: a.records, seed: a.baseline_seed, bits: a.baseline_bits, norm: a.norm, moduli: a.moduli.clone() };
            generic_baseline(&spec)?
        }
    };
    let features = if a.features.trim().is_empty() { default_nu_features() } else { parse_features(&a.features)? };
    let report = nu_best_trend(&field, &gens, &plan, &baseline, &features, &trend_options(a.bootstrap, a.seed, a.noise_band))?;
    write_out(a.out.as_deref(), &to_json(&report))
}

#[derive(Args, Serialize, Deserialize, Debug, Clone)]
pub struct PadicGoodArgs {
    /// GoodFunctionSpec JSON file.
    #[arg(long)]
    pub spec: PathBuf,
    #[arg(long = "C", default_value = "1")]
    pub c: String,
    #[arg(long, default_value = "1")]
    pub alpha: String,
    /// `auto` or a comma-separated list of eps values.
    #[arg(long, default_value = "auto")]
    pub eps: String,
    /// `auto` or `center:j` items separated by `;`.
    #[arg(long, default_value = "auto")]
    pub balls: String,
    /// Also report weak IVT ratios up to this level.
    #[arg(long)]
    pub ivt_levels: Option<u32>,
    /// Replace C by the tight constant for the given alpha.
    #[arg(long)]
    #[serde(default)]
    pub tight: bool,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Serialize)]
struct PadicReport {
    spec: GoodFunctionSpec,
    certificate: orbitlab::padic::CheckReport,
    #[serde(skip_serializing_if = "Option::is_none")]
    weak_ivt: Option<orbitlab::padic::IvtReport>,
}

pub fn cmd_padic_good(a: &PadicGoodArgs) -> Result<()> {
    let text = std::fs::read_to_string(&a.spec).map_err(|e| Error::Config(format!("{}: {e}", a.spec.display())))?;
    let spec: GoodFunctionSpec = serde_json::from_str(&text).map_err(|e| Error::Config(format!("{}: {e}", a.spec.display())))?;
    spec.validate()?;
    let alpha = parse_rational(&a.alpha)?;
    let eps = if a.eps.trim() == "auto" { EpsGrid::Auto } else { EpsGrid::Explicit(a.eps.split(',').map(parse_rational).collect::<Result<_>>()?) };
    let balls = if a.balls.trim() == "auto" {
        default_balls(&spec)
    } else {
        a.balls
            .split(';')
            .filter(|s| !s.trim().is_empty())
            .map(|b| {
                let (c, j) = b.split_once(':').ok_or_else(|| Error::Config(format!("ball {b:?} is not center:j")))?;
                let c: u128 = c.trim().parse().map_err(|_| Error::Config(format!("bad ball center {c:?}")))?;
                let j: u32 = j.trim().parse().map_err(|_| Error::Config(format!("bad ball radius {j:?}")))?;
                Ok(Ball::new(c, j, spec.p()))
            })
            .collect::<Result<_>>()?
    };
    let size = orbitlab::padic::modulus(spec.p, spec.precision)?;
    if size > ENUMERATION_CAP {
        return Err(Error::EnumerationTooLarge { size, cap: ENUMERATION_CAP });
    }
    let c = if a.tight { tight_constant(&spec, &alpha, &balls)? } else { parse_rational(&a.c)? };
    let certificate = check_good(&spec, &c, &alpha, &balls, &eps)?;
    let weak_ivt = match a.ivt_levels {
        Some(n) => Some(weak_ivt_check(&spec, n, Some(&IvtBound::FromGood { c: c.clone(), alpha: alpha.clone() }))?),
        None => None,
    };
    write_out(a.out.as_deref(), &to_json(&PadicReport { spec, certificate, weak_ivt }))
}

#[derive(Args, Serialize, Deserialize, Debug, Clone)]
pub struct HaarArgs {
    #[arg(long, default_value_t = 1e-4)]
    pub y: f64,
    #[arg(long = "N", default_value_t = 100_000)]
    pub samples: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, value_delimiter = ',', default_value = "0.5,1,1.5,2")]
    pub radii: Vec<f64>,
    #[arg(long, value_parser = parse_norm, default_value = "euclidean")]
    pub norm: Norm,
    /// Measure CSV; its sidecar goes next to it.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

pub fn cmd_haar_ref(a: &HaarArgs) -> Result<()> {
    let obs = haar_reference_d2(a.samples, a.y, a.seed, &a.radii, a.norm)?;
    let m = observables_measure(&obs, &a.radii)?.with_meta(Metadata { run_id: format!("haar-d2-y{}", fmt_f64(a.y)), seed: Some(a.seed), n_index: None });
    write_measure(a.out.as_deref(), &m)
}

#[derive(Args, Serialize, Deserialize, Debug, Clone)]
pub struct BaselineArgs {
    #[arg(long)]
    pub dim: usize,
    #[arg(long, default_value_t = 1000)]
    pub targets: usize,
    #[arg(long = "K", default_value_t = 500)]
    pub records: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = GENERIC_BITS)]
    pub bits: u32,
    #[arg(long, value_parser = parse_norm, default_value = "sup")]
    pub norm: Norm,
    #[arg(long, value_delimiter = ',', default_value = "2")]
    pub moduli: Vec<u64>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

pub fn cmd_baseline_gen(a: &BaselineArgs) -> Result<()> {
    let spec = BaselineSpec { dim: a.dim, targets: a.targets, records: a.records, seed: a.seed, bits: a.bits, norm: a.norm, moduli: a.moduli.clone() };
    write_measure(a.out.as_deref(), &generic_baseline(&spec)?)
}
