use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{z_score, CorrelatorEstimate, MomentReport};
use crate::analytic::{predict_moments, PREDICTED_KURTOSIS};
use crate::error::{Error, Result};

/// Relative slack granted to variance-type comparisons, covering the
/// subleading corrections of the Gaussian predictions.
pub const VARIANCE_RELATIVE_TOLERANCE: f64 = 0.15;
pub const Z_LIMIT: f64 = 3.0;

pub enum Estimate<'a> {
    Moments(&'a MomentReport),
    Correlator(&'a CorrelatorEstimate),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Prediction {
    pub n: usize,
    pub model_hash: String,
    pub kind: PredictionKind,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum PredictionKind {
    Moments { i2: f64, mean: f64 },
    Correlator { points: Vec<f64>, value: Complex64 },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Rule {
    /// `|z| < 3`.
    AbsZ,
    /// `|estimate − prediction| ≤ max(3σ, 15% |prediction|)`.
    VarianceType,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Verdict {
    pub quantity: String,
    pub estimate: f64,
    pub std_error: f64,
    pub predicted: f64,
    pub z: f64,
    pub rule: Rule,
    pub pass: bool,
}

impl Verdict {
    fn new(quantity: &str, estimate: f64, std_error: f64, predicted: f64, rule: Rule) -> Verdict {
        let z = z_score(estimate, predicted, std_error);
        let pass = match rule {
            Rule::AbsZ => z.abs() < Z_LIMIT,
            Rule::VarianceType => {
                (estimate - predicted).abs()
                    <= (Z_LIMIT * std_error).max(VARIANCE_RELATIVE_TOLERANCE * predicted.abs())
            }
        };
        Verdict { quantity: quantity.to_string(), estimate, std_error, predicted, z, rule, pass }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Comparison {
    pub n: usize,
    pub model_hash: String,
    pub verdicts: Vec<Verdict>,
    pub pass: bool,
}

fn check_config(n: usize, hash: &str, pred: &Prediction) -> Result<()> {
    if n != pred.n {
        return Err(Error::MismatchedConfig(format!("estimate has n = {n}, prediction n = {}", pred.n)));
    }
    if hash != pred.model_hash {
        return Err(Error::MismatchedConfig("model hashes differ".into()));
    }
    Ok(())
}

/// Per-quantity verdicts. Even central moments are variance-type
/// comparisons; the mean, odd moments, skewness, kurtosis and correlators
/// use `|z| < 3`.
pub fn compare(estimate: Estimate<'_>, prediction: &Prediction) -> Result<Comparison> {
    let (n, hash, verdicts) = match (estimate, &prediction.kind) {
        (Estimate::Moments(r), PredictionKind::Moments { i2, mean }) => {
            check_config(r.n, &r.model_hash, prediction)?;
            let mut v = Vec::new();
            for m in &r.central_moments {
                let (name, predicted, rule) = match m.order {
                    1 => ("mean".to_string(), *mean, Rule::AbsZ),
                    k => {
                        let p = predict_moments(r.n as u64, k, *i2).leading_value;
                        let rule = if k % 2 == 0 { Rule::VarianceType } else { Rule::AbsZ };
                        (format!("central_moment_{k}"), p, rule)
                    }
                };
                v.push(Verdict::new(&name, m.value, m.std_error, predicted, rule));
            }
            v.push(Verdict::new("skewness", r.skewness.value, r.skewness.std_error, 0.0, Rule::AbsZ));
            v.push(Verdict::new(
                "kurtosis",
                r.kurtosis.value,
                r.kurtosis.std_error,
                PREDICTED_KURTOSIS,
                Rule::AbsZ,
            ));
            (r.n, r.model_hash.clone(), v)
        }
        (Estimate::Correlator(c), PredictionKind::Correlator { points, value }) => {
            check_config(c.n, &c.model_hash, prediction)?;
            if points.len() != c.points.len()
                || points.iter().zip(&c.points).any(|(a, b)| (a - b).abs() > 1e-12)
            {
                return Err(Error::MismatchedConfig("correlator points differ".into()));
            }
            let dist = (c.estimate - value).norm();
            let mut v = Verdict::new("correlator", dist, c.std_error, 0.0, Rule::AbsZ);
            v.estimate = c.estimate.re;
            v.predicted = value.re;
            (c.n, c.model_hash.clone(), vec![v])
        }
        _ => return Err(Error::MismatchedConfig("estimate and prediction are of different kinds".into())),
    };
    let pass = verdicts.iter().all(|v| v.pass);
    Ok(Comparison { n, model_hash: hash, verdicts, pass })
}
