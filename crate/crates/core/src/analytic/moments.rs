use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::coeff_model::CoefficientField;
use crate::error::Result;

/// Leading large-N value of the centered moment `⟨(W − ⟨W⟩)^k⟩`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MomentPrediction {
    pub order: u32,
    pub leading_value: f64,
    /// Power of N of the first neglected term.
    pub error_order: f64,
    pub i2: f64,
}

fn double_factorial(m: i64) -> f64 {
    let mut acc = 1.0;
    let mut x = m;
    while x > 1 {
        acc *= x as f64;
        x -= 2;
    }
    acc
}

/// Even `k = 2k̃`: `(2k̃−1)!! N^{k̃/2} I₂^{k̃}`; odd k: zero. Both with error
/// `O(N^{(k̃−1)/2})`.
pub fn predict_moments(n: u64, k: u32, i2: f64) -> MomentPrediction {
    assert!(k >= 1, "moment order starts at 1");
    let kt = (k / 2) as i32;
    let leading_value = if k % 2 == 0 {
        double_factorial(2 * kt as i64 - 1) * (n as f64).powf(kt as f64 / 2.0) * i2.powi(kt)
    } else {
        0.0
    };
    MomentPrediction { order: k, leading_value, error_order: (kt as f64 - 1.0) / 2.0, i2 }
}

/// Limiting kurtosis.
pub const PREDICTED_KURTOSIS: f64 = 3.0;
/// Power of N with which the skewness decays.
pub const SKEWNESS_DECAY: f64 = -0.75;

/// `(2π√N I₂)^{-1/2} exp(−(w − mean)² / (2√N I₂))`.
pub fn gaussian_pdf(w: f64, mean: f64, n: u64, i2: f64) -> f64 {
    assert!(i2 > 0.0, "variance coefficient must be positive");
    let var = (n as f64).sqrt() * i2;
    (-(w - mean).powi(2) / (2.0 * var)).exp() / (2.0 * PI * var).sqrt()
}

/// `⟨W⟩ = (N / 2π) ∫₀^{2π} Im(v†v′)/‖v‖² dp` for the uncentered field.
pub fn analytic_mean(field: &CoefficientField, n: u64, gauge_grid: usize) -> Result<f64> {
    let total = if field.is_canonical() {
        field.gauge_total_phase()
    } else {
        field.canonicalize(gauge_grid)?.gauge_total_phase()
    };
    Ok(n as f64 * total / (2.0 * PI))
}
