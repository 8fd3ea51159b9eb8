//! Monte Carlo estimates of winding-number moments and density correlators,
//! with resampling errors and comparison against the closed forms.
//!
//! Realization `i` always uses the seed `derive_seed(master_seed, i)` and all
//! reductions run in index order, so results do not depend on the number of
//! worker threads.

mod artifact;
mod compare;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::analytic::{self, predict_moments, CurveOptions, MomentPrediction};
use crate::coeff_model::CoefficientField;
use crate::ensemble::{self, derive_seed, Realization};
use crate::error::{Error, Result};
use crate::winding::{self, Method, LaurentStructure, MAX_ROOT_COUNT_DEGREE};
use crate::DEFAULT_GAUGE_GRID;

pub use artifact::{histogram, write_histogram_csv, write_json, Artifact, HistogramBin, SCHEMA_VERSION};
pub use compare::{compare, Comparison, Estimate, Prediction, PredictionKind, Verdict};

pub const DEFAULT_BOOTSTRAP: usize = 1000;
/// Largest tolerated fraction of failed realizations.
pub const MAX_EXCLUDED_FRACTION: f64 = 0.01;
const BOOTSTRAP_STREAM: u64 = u64::MAX;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct McOptions {
    pub workers: usize,
    pub method: Method,
    /// Leading realizations whose winding is recomputed by a second method.
    pub oracle_checks: usize,
    pub bootstrap_resamples: usize,
    /// Variance coefficient for the predictions; computed from the curves
    /// when absent.
    pub i2: Option<f64>,
}

impl Default for McOptions {
    fn default() -> Self {
        McOptions {
            workers: 1,
            method: Method::Pencil,
            oracle_checks: 10,
            bootstrap_resamples: DEFAULT_BOOTSTRAP,
            i2: None,
        }
    }
}

/// An estimated quantity with its resampling error, prediction and z-score.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Measured {
    pub order: u32,
    pub value: f64,
    pub std_error: f64,
    pub predicted: f64,
    pub z: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MomentReport {
    pub n: usize,
    pub samples: usize,
    pub excluded: usize,
    pub excluded_indices: Vec<u64>,
    pub master_seed: u64,
    pub method: Method,
    pub model_hash: String,
    pub i2: f64,
    /// Order 1 holds the mean of W against the analytic mean; orders 2 to 6
    /// are central moments about the empirical mean.
    pub central_moments: Vec<Measured>,
    pub skewness: Measured,
    pub kurtosis: Measured,
    pub predicted: Vec<MomentPrediction>,
    /// Winding numbers of the accepted realizations in index order.
    pub windings: Vec<i64>,
}

impl MomentReport {
    pub fn moment(&self, order: u32) -> Option<&Measured> {
        self.central_moments.iter().find(|m| m.order == order)
    }

    pub fn mean(&self) -> f64 {
        self.central_moments[0].value
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CorrelatorEstimate {
    pub n: usize,
    pub model_hash: String,
    pub points: Vec<f64>,
    pub k: usize,
    pub estimate: Complex64,
    pub std_error: f64,
    pub samples: usize,
    pub excluded: usize,
}

pub(crate) fn z_score(value: f64, predicted: f64, se: f64) -> f64 {
    let d = value - predicted;
    if d == 0.0 {
        0.0
    } else {
        d / se
    }
}

fn pool(workers: usize) -> Result<rayon::ThreadPool> {
    if workers == 0 {
        return Err(Error::InvalidArgument("worker count must be positive".into()));
    }
    rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| Error::InvalidArgument(e.to_string()))
}

fn excludable(e: &Error) -> bool {
    matches!(
        e,
        Error::RootOnCircle { .. }
            | Error::NonConvergent { .. }
            | Error::Inconsistent { .. }
            | Error::IllConditioned { .. }
            | Error::NearSingular { .. }
            | Error::EigenFailure
    )
}

fn check_exclusions(excluded: usize, samples: usize) -> Result<()> {
    if excluded as f64 > MAX_EXCLUDED_FRACTION * samples as f64 {
        Err(Error::TooManyExclusions { excluded, samples })
    } else {
        Ok(())
    }
}

/// Second method used to cross-check the first realizations.
fn oracle_method(field: &CoefficientField, n: usize, primary: Method) -> Method {
    match primary {
        Method::PhaseUnwrap if n * LaurentStructure::of(field).steps <= MAX_ROOT_COUNT_DEGREE => {
            Method::RootCount
        }
        Method::PhaseUnwrap => Method::Pencil,
        _ => Method::PhaseUnwrap,
    }
}

/// Mean, central moments 2 to 6, skewness and kurtosis.
#[derive(Clone, Copy, Debug)]
struct Summary {
    mean: f64,
    central: [f64; 5],
    skewness: f64,
    kurtosis: f64,
}

fn summarize(x: &[f64]) -> Summary {
    let len = x.len() as f64;
    let mean = x.iter().sum::<f64>() / len;
    let mut central = [0.0; 5];
    for v in x {
        let d = v - mean;
        let mut pw = d;
        for c in central.iter_mut() {
            pw *= d;
            *c += pw;
        }
    }
    for c in central.iter_mut() {
        *c /= len;
    }
    let var = central[0];
    Summary {
        mean,
        central,
        skewness: central[1] / var.powf(1.5),
        kurtosis: central[2] / (var * var),
    }
}

fn std_dev(values: &[f64]) -> f64 {
    let len = values.len() as f64;
    let mean = values.iter().sum::<f64>() / len;
    (values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (len - 1.0)).sqrt()
}

/// Bootstrap standard errors of every field of [`Summary`], in the order
/// mean, central moments, skewness, kurtosis.
fn bootstrap(x: &[f64], resamples: usize, seed: u64) -> [f64; 8] {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut draws: Vec<[f64; 8]> = Vec::with_capacity(resamples);
    let mut buf = vec![0.0; x.len()];
    for _ in 0..resamples {
        for b in buf.iter_mut() {
            *b = x[rng.random_range(0..x.len())];
        }
        let s = summarize(&buf);
        let c = s.central;
        draws.push([s.mean, c[0], c[1], c[2], c[3], c[4], s.skewness, s.kurtosis]);
    }
    let mut out = [0.0; 8];
    for (i, o) in out.iter_mut().enumerate() {
        let col: Vec<f64> = draws.iter().map(|d| d[i]).collect();
        *o = std_dev(&col);
    }
    out
}

fn variance_coefficient(field: &CoefficientField) -> Result<f64> {
    let canonical = field.canonicalize(DEFAULT_GAUGE_GRID)?;
    let curves = analytic::find_parallel_curves(&canonical, &CurveOptions::default())?;
    analytic::i2(&canonical, &curves)
}

/// Winding numbers of `samples` realizations, in index order. Failed
/// realizations come back as `Err` and are excluded by the caller.
fn windings(
    field: &CoefficientField,
    n: usize,
    samples: usize,
    master_seed: u64,
    opts: &McOptions,
) -> Result<Vec<std::result::Result<i64, Error>>> {
    let oracle = oracle_method(field, n, opts.method);
    let run = |i: u64| -> Result<std::result::Result<i64, Error>> {
        let real = ensemble::sample(n, derive_seed(master_seed, i));
        let w = match winding::winding_number(&real, field, opts.method) {
            Ok(r) => r.w,
            Err(e) if excludable(&e) => return Ok(Err(e)),
            Err(e) => return Err(e),
        };
        if (i as usize) < opts.oracle_checks {
            match winding::winding_number(&real, field, oracle) {
                Ok(r) if r.w != w => {
                    return Err(Error::OracleMismatch { index: i, primary: w, oracle: r.w })
                }
                Err(e) if !excludable(&e) => return Err(e),
                _ => {}
            }
        }
        Ok(Ok(w))
    };
    pool(opts.workers)?.install(|| (0..samples as u64).into_par_iter().map(run).collect())
}

/// Moments of `W` over `samples` realizations of the periodic field, with
/// bootstrap errors and z-scores against the Gaussian large-N predictions.
pub fn mc_winding_moments(
    field: &CoefficientField,
    n: usize,
    samples: usize,
    master_seed: u64,
    opts: &McOptions,
) -> Result<MomentReport> {
    if samples < 2 {
        return Err(Error::InvalidArgument(format!("need at least 2 samples, got {samples}")));
    }
    if n == 0 {
        return Err(Error::InvalidArgument("matrix dimension must be positive".into()));
    }
    let raw = field.raw();
    let i2 = match opts.i2 {
        Some(v) => v,
        None => variance_coefficient(&raw)?,
    };
    let mean_pred = analytic::analytic_mean(&raw, n as u64, DEFAULT_GAUGE_GRID)?;
    let results = windings(&raw, n, samples, master_seed, opts)?;
    let mut excluded_indices = Vec::new();
    let mut ws = Vec::with_capacity(samples);
    for (i, r) in results.into_iter().enumerate() {
        match r {
            Ok(w) => ws.push(w),
            Err(_) => excluded_indices.push(i as u64),
        }
    }
    check_exclusions(excluded_indices.len(), samples)?;
    if ws.len() < 2 {
        return Err(Error::TooManyExclusions { excluded: excluded_indices.len(), samples });
    }
    let x: Vec<f64> = ws.iter().map(|&w| w as f64).collect();
    let s = summarize(&x);
    let se = bootstrap(&x, opts.bootstrap_resamples, derive_seed(master_seed, BOOTSTRAP_STREAM));
    let predicted: Vec<MomentPrediction> = (1..=6).map(|k| predict_moments(n as u64, k, i2)).collect();
    let measured = |order: u32, value: f64, std_error: f64, predicted: f64| Measured {
        order,
        value,
        std_error,
        predicted,
        z: z_score(value, predicted, std_error),
    };
    let mut central_moments = vec![measured(1, s.mean, se[0], mean_pred)];
    for k in 2..=6u32 {
        let i = (k - 2) as usize;
        central_moments.push(measured(k, s.central[i], se[i + 1], predicted[k as usize - 1].leading_value));
    }
    Ok(MomentReport {
        n,
        samples,
        excluded: excluded_indices.len(),
        excluded_indices,
        master_seed,
        method: opts.method,
        model_hash: raw.model_hash(),
        i2,
        central_moments,
        skewness: measured(3, s.skewness, se[6], 0.0),
        kurtosis: measured(4, s.kurtosis, se[7], analytic::PREDICTED_KURTOSIS),
        predicted,
        windings: ws,
    })
}

/// Mean of a complex sample with its jackknife standard error.
fn jackknife_mean(x: &[Complex64]) -> (Complex64, f64) {
    let len = x.len() as f64;
    let total: Complex64 = x.iter().sum();
    let mean = total / len;
    if x.len() < 2 {
        return (mean, f64::INFINITY);
    }
    let spread: f64 = x.iter().map(|v| ((total - v) / (len - 1.0) - mean).norm_sqr()).sum();
    (mean, ((len - 1.0) / len * spread).sqrt())
}

fn mc_average<F>(
    field: &CoefficientField,
    n: usize,
    points: &[f64],
    samples: usize,
    master_seed: u64,
    workers: usize,
    observable: F,
) -> Result<CorrelatorEstimate>
where
    F: Fn(&Realization) -> Result<Complex64> + Sync,
{
    if samples < 2 || n == 0 {
        return Err(Error::InvalidArgument(format!("need n ≥ 1 and at least 2 samples, got n = {n}, {samples}")));
    }
    let run = |i: u64| -> Result<Option<Complex64>> {
        let real = ensemble::sample(n, derive_seed(master_seed, i));
        match observable(&real) {
            Ok(v) => Ok(Some(v)),
            Err(e) if excludable(&e) => Ok(None),
            Err(e) => Err(e),
        }
    };
    let results: Vec<Option<Complex64>> =
        pool(workers)?.install(|| (0..samples as u64).into_par_iter().map(run).collect::<Result<_>>())?;
    let values: Vec<Complex64> = results.iter().flatten().copied().collect();
    let excluded = samples - values.len();
    check_exclusions(excluded, samples)?;
    let (estimate, std_error) = jackknife_mean(&values);
    Ok(CorrelatorEstimate {
        n,
        model_hash: field.model_hash(),
        points: points.to_vec(),
        k: points.len(),
        estimate,
        std_error,
        samples,
        excluded,
    })
}

/// Average of `w(p₁) ⋯ w(p_k)` with a jackknife error. The density is taken
/// from the field as given, gauged when canonical.
pub fn mc_corr(
    field: &CoefficientField,
    n: usize,
    points: &[f64],
    samples: usize,
    master_seed: u64,
    workers: usize,
) -> Result<CorrelatorEstimate> {
    if points.is_empty() || points.len() > 4 {
        return Err(Error::InvalidArgument(format!("k must be in 1..=4, got {}", points.len())));
    }
    mc_average(field, n, points, samples, master_seed, workers, |real| {
        points.iter().map(|&p| ensemble::winding_density(real, field, p)).product()
    })
}

/// Average of `Π_l det K(p_l + J_l) / det K(p_l)`, the quantity whose
/// closed form is [`analytic::gen_func`].
pub fn mc_gen_func(
    field: &CoefficientField,
    n: usize,
    p: &[f64],
    j: &[f64],
    samples: usize,
    master_seed: u64,
    workers: usize,
) -> Result<CorrelatorEstimate> {
    if p.len() != j.len() {
        return Err(Error::InvalidArgument("p and J must have equal length".into()));
    }
    mc_average(field, n, p, samples, master_seed, workers, |real| {
        let mut ln_abs = 0.0;
        let mut phase = 0.0;
        for (&x, &dj) in p.iter().zip(j) {
            let top = ensemble::log_det(real, field, x + dj);
            let bottom = ensemble::log_det(real, field, x);
            if !top.ln_abs.is_finite() || !bottom.ln_abs.is_finite() {
                return Err(Error::NearSingular { p: x, cond: f64::INFINITY });
            }
            ln_abs += top.ln_abs - bottom.ln_abs;
            phase += top.phase - bottom.phase;
        }
        Ok(Complex64::from_polar(ln_abs.exp(), phase))
    })
}
