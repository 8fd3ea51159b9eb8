use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::Path;

use chiral_winding::analytic::{self, CurveOptions, CurveSet, I3Options};
use chiral_winding::coeff_model::parse_model;
use chiral_winding::stats::{self, Artifact, CorrelatorEstimate, McOptions, MomentReport, Prediction, PredictionKind};
use chiral_winding::winding::Method;
use chiral_winding::{models, CoefficientField};
use serde::Serialize;
use serde_json::{json, Value};

use crate::config::RunConfig;

pub enum Outcome {
    Pass,
    Fail,
}

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Runtime(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Runtime(_) => 1,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Usage(m) | CliError::Runtime(m) => f.write_str(m),
        }
    }
}

impl From<chiral_winding::Error> for CliError {
    fn from(e: chiral_winding::Error) -> Self {
        CliError::Runtime(e.to_string())
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Runtime(e.to_string())
    }
}

type CliResult<T> = Result<T, CliError>;

struct Model {
    name: String,
    field: CoefficientField,
}

fn load_model(source: Option<&str>) -> CliResult<Model> {
    let source = source.ok_or_else(|| CliError::Usage("no model given (use --model or [run] model)".into()))?;
    if let Some(name) = source.strip_prefix("builtin:") {
        let field = models::by_name(name).ok_or_else(|| CliError::Usage(format!("unknown built-in model `{name}`")))?;
        return Ok(Model { name: name.to_string(), field });
    }
    let text = fs::read_to_string(source).map_err(|e| CliError::Usage(format!("{source}: {e}")))?;
    let parsed = parse_model(&text).map_err(|e| CliError::Runtime(format!("{source}: {e}")))?;
    let name = parsed.name.unwrap_or_else(|| {
        Path::new(source).file_stem().map_or("model".into(), |s| s.to_string_lossy().into_owned())
    });
    Ok(Model { name, field: parsed.field })
}

fn out_file(cfg: &RunConfig, name: &str) -> CliResult<BufWriter<File>> {
    fs::create_dir_all(&cfg.run.out)?;
    Ok(BufWriter::new(File::create(cfg.run.out.join(name))?))
}

fn write_artifact<T: Serialize>(cfg: &RunConfig, file: &str, kind: &str, hash: &str, payload: &T) -> CliResult<()> {
    let mut out = out_file(cfg, file)?;
    stats::write_json(&mut out, kind, &cfg.to_json(), hash, payload)?;
    out.flush()?;
    println!("wrote {}", cfg.run.out.join(file).display());
    Ok(())
}

/// CSV preceded by `#` lines carrying the model hash and the configuration.
fn csv_with_run_header(cfg: &RunConfig, file: &str, hash: &str) -> CliResult<BufWriter<File>> {
    let mut out = out_file(cfg, file)?;
    writeln!(out, "# model_hash={hash}")?;
    writeln!(out, "# config={}", cfg.to_json())?;
    Ok(out)
}

fn canonical_curves(cfg: &RunConfig, field: &CoefficientField) -> CliResult<(CoefficientField, CurveSet)> {
    let canonical = field.canonicalize(cfg.gauge.grid)?;
    let opts = CurveOptions { scan_grid: cfg.curves.scan_grid, ..CurveOptions::default() };
    let curves = analytic::find_parallel_curves(&canonical, &opts)?;
    Ok((canonical, curves))
}

pub fn validate(cfg: &RunConfig) -> CliResult<Outcome> {
    let model = load_model(cfg.run.model.as_deref())?;
    let canonical = model.field.canonicalize(cfg.gauge.grid)?;
    let (norm_err, orth_err) = canonical.canonical_residuals(1024);
    let b = canonical.berry_phase();
    println!("model        {}", model.name);
    println!("model_hash   {}", model.field.model_hash());
    println!("berry_phase  {:.12} {:+.12}i (arg {:.12})", b.re, b.im, b.arg());
    println!("periodic     {}", canonical.is_periodic());
    println!("residuals    norm {norm_err:.3e}  orthogonality {orth_err:.3e}");
    if norm_err >= 1e-8 || orth_err >= 1e-8 {
        return Err(CliError::Runtime(format!(
            "canonicalization residuals too large: {norm_err:.3e}, {orth_err:.3e}"
        )));
    }
    let opts = CurveOptions { scan_grid: cfg.curves.scan_grid, ..CurveOptions::default() };
    let curves = analytic::find_parallel_curves(&canonical, &opts)?;
    println!("curves       {}", curves.curves.len());
    Ok(Outcome::Pass)
}

pub fn curves(cfg: &RunConfig) -> CliResult<Outcome> {
    let model = load_model(cfg.run.model.as_deref())?;
    let (_, curves) = canonical_curves(cfg, &model.field)?;
    let hash = model.field.model_hash();
    let mut out = csv_with_run_header(cfg, "curves.csv", &hash)?;
    curves.write_csv(&mut out)?;
    out.flush()?;
    for (i, c) in curves.curves.iter().enumerate() {
        let (p, q) = c.start();
        println!("curve {i}: start ({p:.6}, {q:.6}), windings {}, {} samples", c.windings, c.len());
    }
    println!("wrote {}", cfg.run.out.join("curves.csv").display());
    Ok(Outcome::Pass)
}

fn complex_json(z: num_complex::Complex64) -> Value {
    json!({ "re": z.re, "im": z.im })
}

pub fn analytic(cfg: &RunConfig) -> CliResult<Outcome> {
    let model = load_model(cfg.run.model.as_deref())?;
    let hash = model.field.model_hash();
    let n = cfg.n();
    let canonical = model.field.canonicalize(cfg.gauge.grid)?;
    let a = &cfg.analytic;
    let payload = match a.quantity.as_str() {
        "i2" | "moments" => {
            let (_, curves) = canonical_curves(cfg, &model.field)?;
            let i2 = analytic::i2(&canonical, &curves)?;
            let mean = analytic::analytic_mean(&model.field, n as u64, cfg.gauge.grid)?;
            println!("I2 = {i2:.12}");
            println!("mean W = {mean:.12}");
            let predictions: Vec<_> = (1..=6).map(|k| analytic::predict_moments(n as u64, k, i2)).collect();
            for p in &predictions {
                println!("moment {}: {:.6e} (+ O(N^{}))", p.order, p.leading_value, p.error_order);
            }
            let prediction = Prediction { n, model_hash: hash.clone(), kind: PredictionKind::Moments { i2, mean } };
            json!({ "quantity": "i2", "i2": i2, "curve_count": curves.curves.len(), "mean": mean,
                    "moments": predictions, "prediction": prediction })
        }
        "i3" => {
            let (_, curves) = canonical_curves(cfg, &model.field)?;
            let v = analytic::i3(&canonical, &curves, &I3Options::default())?;
            println!("I3 = {:.6e} {:+.6e}i", v.re, v.im);
            json!({ "quantity": "i3", "i3": complex_json(v) })
        }
        "corr" => {
            let v = analytic::corr_k(&canonical, n as u32, &a.points)?;
            println!("C_{} = {:.12e} {:+.12e}i", a.points.len(), v.re, v.im);
            let prediction = Prediction {
                n,
                model_hash: hash.clone(),
                kind: PredictionKind::Correlator { points: a.points.clone(), value: v },
            };
            json!({ "quantity": "corr", "points": a.points, "value": complex_json(v), "prediction": prediction })
        }
        "gen-func" => {
            let v = analytic::gen_func(&canonical, n as u32, &a.points, &a.sources)?;
            println!("Z = {:.12e} {:+.12e}i", v.re, v.im);
            let prediction = Prediction {
                n,
                model_hash: hash.clone(),
                kind: PredictionKind::Correlator { points: a.points.clone(), value: v },
            };
            json!({ "quantity": "gen-func", "points": a.points, "sources": a.sources,
                    "value": complex_json(v), "prediction": prediction })
        }
        q => return Err(CliError::Usage(format!("unknown analytic quantity `{q}`"))),
    };
    write_artifact(cfg, "analytic.json", "analytic", &hash, &payload)?;
    Ok(Outcome::Pass)
}

fn method(cfg: &RunConfig) -> CliResult<Method> {
    cfg.mc.method.parse().map_err(|e: chiral_winding::Error| CliError::Usage(e.to_string()))
}

fn write_histogram(cfg: &RunConfig, report: &MomentReport, mean: f64) -> CliResult<()> {
    let bins = stats::histogram(&report.windings, mean, report.n as u64, report.i2);
    let mut out = csv_with_run_header(cfg, "histogram.csv", &report.model_hash)?;
    stats::write_histogram_csv(&mut out, &bins)?;
    out.flush()?;
    println!("wrote {}", cfg.run.out.join("histogram.csv").display());
    Ok(())
}

fn print_report(r: &MomentReport) {
    println!("n = {}, samples = {}, excluded = {}, I2 = {:.6}", r.n, r.samples, r.excluded, r.i2);
    for m in &r.central_moments {
        println!(
            "order {}: {:>14.6} ± {:<12.6} predicted {:>14.6}  z = {:+.3}",
            m.order, m.value, m.std_error, m.predicted, m.z
        );
    }
    for (name, m) in [("skewness", &r.skewness), ("kurtosis", &r.kurtosis)] {
        println!("{name}: {:.6} ± {:.6} (predicted {}, z = {:+.3})", m.value, m.std_error, m.predicted, m.z);
    }
}

pub fn mc(cfg: &RunConfig) -> CliResult<Outcome> {
    let model = load_model(cfg.run.model.as_deref())?;
    let hash = model.field.model_hash();
    let (n, samples, seed, workers) = (cfg.n(), cfg.samples(), cfg.run.seed, cfg.run.workers);
    match cfg.mc.kind.as_str() {
        "moments" => {
            let opts = McOptions {
                workers,
                method: method(cfg)?,
                oracle_checks: cfg.mc.oracle_checks,
                bootstrap_resamples: cfg.mc.bootstrap,
                i2: None,
            };
            let report = stats::mc_winding_moments(&model.field, n, samples, seed, &opts)?;
            print_report(&report);
            write_artifact(cfg, "mc_moments.json", "mc_moments", &hash, &report)?;
            write_histogram(cfg, &report, report.mean())?;
        }
        "corr" | "gen-func" => {
            let canonical = model.field.canonicalize(cfg.gauge.grid)?;
            let est = if cfg.mc.kind == "corr" {
                stats::mc_corr(&canonical, n, &cfg.mc.points, samples, seed, workers)?
            } else {
                stats::mc_gen_func(&canonical, n, &cfg.mc.points, &cfg.mc.sources, samples, seed, workers)?
            };
            println!(
                "estimate = {:.6e} {:+.6e}i ± {:.3e} ({} samples, {} excluded)",
                est.estimate.re, est.estimate.im, est.std_error, est.samples, est.excluded
            );
            write_artifact(cfg, "mc_corr.json", "mc_corr", &hash, &est)?;
        }
        k => return Err(CliError::Usage(format!("unknown mc kind `{k}`"))),
    }
    Ok(Outcome::Pass)
}

fn read_artifact(path: &Path) -> CliResult<Artifact<Value>> {
    let text = fs::read_to_string(path).map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))?;
    let doc: Artifact<Value> =
        serde_json::from_str(&text).map_err(|e| CliError::Runtime(format!("{}: {e}", path.display())))?;
    if doc.schema_version != stats::SCHEMA_VERSION {
        return Err(CliError::Runtime(format!(
            "{}: schema version {} is not supported",
            path.display(),
            doc.schema_version
        )));
    }
    Ok(doc)
}

fn decode<T: serde::de::DeserializeOwned>(v: Value, what: &str) -> CliResult<T> {
    serde_json::from_value(v).map_err(|e| CliError::Runtime(format!("malformed {what}: {e}")))
}

pub fn compare(cfg: &RunConfig, estimate: &Path, prediction: &Path) -> CliResult<Outcome> {
    let est = read_artifact(estimate)?;
    let pred = read_artifact(prediction)?;
    let prediction: Prediction = decode(
        pred.payload.get("prediction").cloned().ok_or_else(|| {
            CliError::Runtime(format!("{} carries no prediction", prediction.display()))
        })?,
        "prediction",
    )?;
    let comparison = match est.kind.as_str() {
        "mc_moments" => {
            let r: MomentReport = decode(est.payload, "moment report")?;
            stats::compare(stats::Estimate::Moments(&r), &prediction)?
        }
        "mc_corr" => {
            let c: CorrelatorEstimate = decode(est.payload, "correlator estimate")?;
            stats::compare(stats::Estimate::Correlator(&c), &prediction)?
        }
        k => return Err(CliError::Runtime(format!("cannot compare artifacts of kind `{k}`"))),
    };
    for v in &comparison.verdicts {
        println!(
            "{:<18} {:>14.6} ± {:<12.6} predicted {:>14.6}  z = {:+.3}  {}",
            v.quantity,
            v.estimate,
            v.std_error,
            v.predicted,
            v.z,
            if v.pass { "pass" } else { "FAIL" }
        );
    }
    let hash = comparison.model_hash.clone();
    write_artifact(cfg, "comparison.json", "comparison", &hash, &comparison)?;
    Ok(if comparison.pass { Outcome::Pass } else { Outcome::Fail })
}

/// Bounds on the shape of the scaled histogram.
const SKEWNESS_BOUND: f64 = 0.15;
const EXCESS_KURTOSIS_BOUND: f64 = 0.3;

pub fn reproduce_fig3(cfg: &RunConfig) -> CliResult<Outcome> {
    let mut cfg = cfg.clone();
    if cfg.run.model.is_none() {
        cfg.run.model = Some("builtin:fig3".into());
    }
    let (n, samples) = if cfg.run.full { (1500, 10_000) } else { (200, 2000) };
    cfg.run.n = Some(cfg.run.n.unwrap_or(n));
    cfg.run.samples = Some(cfg.run.samples.unwrap_or(samples));
    let model = load_model(cfg.run.model.as_deref())?;
    let hash = model.field.model_hash();
    let opts = McOptions {
        workers: cfg.run.workers,
        method: method(&cfg)?,
        oracle_checks: cfg.mc.oracle_checks,
        bootstrap_resamples: cfg.mc.bootstrap,
        i2: None,
    };
    let report = stats::mc_winding_moments(&model.field, cfg.n(), cfg.samples(), cfg.run.seed, &opts)?;
    print_report(&report);
    let mean = analytic::analytic_mean(&model.field, report.n as u64, cfg.gauge.grid)?;
    let var = report.moment(2).expect("second moment is reported");
    let first = report.moment(1).expect("mean is reported");
    let checks = [
        ("abs(skewness) < 0.15", report.skewness.value.abs() < SKEWNESS_BOUND),
        ("abs(kurtosis - 3) < 0.3", (report.kurtosis.value - 3.0).abs() < EXCESS_KURTOSIS_BOUND),
        ("mean within 3 sigma of N phi / 2 pi", (first.value - mean).abs() < 3.0 * first.std_error),
        (
            "variance within max(3 sigma, 15%) of sqrt(N) I2",
            (var.value - var.predicted).abs() <= (3.0 * var.std_error).max(0.15 * var.predicted),
        ),
    ];
    let pass = checks.iter().all(|c| c.1);
    write_artifact(&cfg, "moments.json", "mc_moments", &hash, &report)?;
    write_histogram(&cfg, &report, mean)?;
    let mut text = String::new();
    text.push_str(&format!("# model_hash={hash}\n# config={}\n", cfg.to_json()));
    for (name, ok) in &checks {
        text.push_str(&format!("{} {name}\n", if *ok { "pass" } else { "FAIL" }));
    }
    text.push_str(&format!("verdict {}\n", if pass { "pass" } else { "FAIL" }));
    fs::write(cfg.run.out.join("verdict.txt"), &text)?;
    print!("{}", text.lines().skip(2).map(|l| format!("{l}\n")).collect::<String>());
    Ok(if pass { Outcome::Pass } else { Outcome::Fail })
}
