use std::f64::consts::PI;

use num_complex::Complex64;

use super::curves::{Curve, CurveSet};
use super::{check_k, pair_permutation_sum};
use crate::coeff_model::CoefficientField;
use crate::error::{Error, Result};
use crate::linalg::CMatrix;
use crate::quadrature::GaussLegendre;

const SERIES_CUTOFF: f64 = 1e-4;
const COINCIDENT_SHIFT: f64 = 1e-2;

/// `(e^{-x²} − 1) / x²`, switching to its Taylor series near zero.
fn decay_ratio(x: f64) -> f64 {
    if x.abs() < SERIES_CUTOFF {
        let x2 = x * x;
        -1.0 + x2 / 2.0 - x2 * x2 / 6.0
    } else {
        (-x * x).exp_m1() / (x * x)
    }
}

/// Two-point unfolded function
/// `s₁s₂|Δ₁||Δ₂| (e^{-x²} − 1)/x²` with `x = s₁|Δ₁|ψ₁ − s₂|Δ₂|ψ₂`.
pub fn unfolded_corr_k2(s: [f64; 2], abs_delta: [f64; 2], psi: [f64; 2]) -> f64 {
    let x = s[0] * abs_delta[0] * psi[0] - s[1] * abs_delta[1] * psi[1];
    s[0] * s[1] * abs_delta[0] * abs_delta[1] * decay_ratio(x)
}

fn permutation_form(x: &[f64]) -> f64 {
    let k = x.len();
    let pair = CMatrix::from_fn(k, k, |a, b| {
        let d = x[a] - x[b];
        Complex64::new(if a == b { 0.0 } else { 1.0 / (d * d) }, 0.0)
    });
    let entry = CMatrix::from_fn(k, k, |a, b| {
        let d = x[a] - x[b];
        Complex64::new(if a == b { 0.0 } else { (-0.5 * d * d).exp() / d }, 0.0)
    });
    pair_permutation_sum(&pair, &entry).re
}

/// Full permutation-sum evaluation of `f_k` for any k, odd k included.
/// Coincident scaled arguments are removable singularities; there the sum is
/// evaluated at symmetrically spread arguments and extrapolated to zero
/// spread.
pub fn unfolded_corr_general(s: &[f64], abs_delta: &[f64], psi: &[f64]) -> Result<f64> {
    let k = psi.len();
    check_k(k)?;
    if s.len() != k || abs_delta.len() != k {
        return Err(Error::InvalidArgument("s, |Δ| and ψ must have equal length".into()));
    }
    let pre: f64 = s.iter().zip(abs_delta).map(|(a, b)| a * b).product();
    let x: Vec<f64> = (0..k).map(|a| s[a] * abs_delta[a] * psi[a]).collect();
    let min_gap = (0..k)
        .flat_map(|a| (a + 1..k).map(move |b| (a, b)))
        .map(|(a, b)| (x[a] - x[b]).abs())
        .fold(f64::INFINITY, f64::min);
    if min_gap >= SERIES_CUTOFF {
        return Ok(pre * permutation_form(&x));
    }
    let spread = |h: f64| -> f64 {
        let up: Vec<f64> = x.iter().enumerate().map(|(a, v)| v + h * (a as f64 + 1.0)).collect();
        let down: Vec<f64> = x.iter().enumerate().map(|(a, v)| v - h * (a as f64 + 1.0)).collect();
        0.5 * (permutation_form(&up) + permutation_form(&down))
    };
    let h = COINCIDENT_SHIFT;
    let (f1, f2) = (spread(h), spread(h / 2.0));
    Ok(pre * (4.0 * f2 - f1) / 3.0)
}

/// Signs, `|Δ|` and tangent of the two components of `Γ_j(t)`.
#[derive(Clone, Copy, Debug)]
struct CurvePoint {
    s: [f64; 2],
    abs_delta: [f64; 2],
    tangent: [f64; 2],
}

fn curve_point(field: &CoefficientField, curve: &Curve, t: f64) -> Result<CurvePoint> {
    let w = curve.windings as f64;
    let p = curve.p[0] + w * t.rem_euclid(2.0 * PI);
    let q = curve.q_at(field, p)?;
    let dp = field.delta(p)?.norm();
    let dq = field.delta(q)?.norm();
    let s2 = field.parallel_sign(p, q)?;
    Ok(CurvePoint { s: [1.0, s2], abs_delta: [dp, dq], tangent: [w, w * s2 * dp / dq] })
}

fn curve(curveset: &CurveSet, j: usize) -> Result<&Curve> {
    curveset
        .curves
        .get(j)
        .ok_or_else(|| Error::InvalidArgument(format!("no curve with index {j}")))
}

/// `f_k` near the base tuple built from `Γ_j(t)`. Component `a` sits on
/// `Γ_{j,1}` for even `a` and on `Γ_{j,2}` for odd `a`, so k = 2 uses the
/// curve point itself. Odd k vanish identically.
pub fn unfolded_corr(
    field: &CoefficientField,
    curveset: &CurveSet,
    j: usize,
    t: f64,
    psi: &[f64],
) -> Result<f64> {
    let k = psi.len();
    check_k(k)?;
    if k % 2 == 1 {
        return Ok(0.0);
    }
    let cp = curve_point(field, curve(curveset, j)?, t)?;
    if k == 2 {
        return Ok(unfolded_corr_k2(cp.s, cp.abs_delta, [psi[0], psi[1]]));
    }
    let s: Vec<f64> = (0..k).map(|a| cp.s[a % 2]).collect();
    let d: Vec<f64> = (0..k).map(|a| cp.abs_delta[a % 2]).collect();
    unfolded_corr_general(&s, &d, psi)
}

/// `I₂ = (1/2π^{3/2}) Σ_j ∫ dt s₁s₂‖Γ′_j‖ |Δ(Γ_{j,1})||Δ(Γ_{j,2})| / √(|Δ(Γ_{j,1})|² + |Δ(Γ_{j,2})|²)`,
/// the integral of `f₂` across each curve. With `p` as the curve parameter
/// the integrand reduces to `s₂ |Δ(p)|`.
pub fn i2(field: &CoefficientField, curveset: &CurveSet) -> Result<f64> {
    let rule = GaussLegendre::new(8);
    let mut total = 0.0;
    for c in &curveset.curves {
        let panels = c.len();
        let h = 2.0 * PI * c.windings as f64 / panels as f64;
        for i in 0..panels {
            let a = c.p[0] + i as f64 * h;
            let mut err = None;
            total += rule.integrate(a, a + h, |p| match integrand_i2(field, c, p) {
                Ok(v) => v,
                Err(e) => {
                    err = Some(e);
                    0.0
                }
            });
            if let Some(e) = err {
                return Err(e);
            }
        }
    }
    Ok(total / (2.0 * PI.powf(1.5)))
}

fn integrand_i2(field: &CoefficientField, c: &Curve, p: f64) -> Result<f64> {
    let q = c.q_at(field, p)?;
    Ok(field.parallel_sign(p, q)? * field.delta(p)?.norm())
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct I3Options {
    /// Gauss–Legendre nodes along each curve.
    pub t_nodes: usize,
    /// Panels per axis of the `ψ` box, 8 nodes each.
    pub psi_panels: usize,
    /// Half-width of the `ψ` box in units of `1/min|Δ|` at each base point.
    pub psi_extent: f64,
}

impl Default for I3Options {
    fn default() -> Self {
        I3Options { t_nodes: 24, psi_panels: 12, psi_extent: 8.0 }
    }
}

/// `I₃ = Σ_Γ ∫ dt/(2πi)³ ∫ dψ₁dψ₂ ‖Γ′‖²/|Γ′₃| f₃(Γ, ψ₁, ψ₂, ψ₃)` with
/// `ψ₃ = −(Γ′₁ψ₁ + Γ′₂ψ₂)/Γ′₃`, over the triples `(Γ_{j,1}, Γ_{j,2}, Γ_{j,2})`.
/// `f₃` is evaluated through the full permutation sum.
pub fn i3(field: &CoefficientField, curveset: &CurveSet, opts: &I3Options) -> Result<Complex64> {
    let t_rule = GaussLegendre::new(opts.t_nodes);
    let psi_rule = GaussLegendre::new(8);
    let mut total = 0.0;
    for c in &curveset.curves {
        for (&tn, &tw) in t_rule.nodes.iter().zip(&t_rule.weights) {
            let t = PI * (tn + 1.0);
            let cp = curve_point(field, c, t)?;
            let s = [cp.s[0], cp.s[1], cp.s[1]];
            let d = [cp.abs_delta[0], cp.abs_delta[1], cp.abs_delta[1]];
            let g = [cp.tangent[0], cp.tangent[1], cp.tangent[1]];
            let norm2 = g.iter().map(|x| x * x).sum::<f64>();
            let jac = norm2 / g[2].abs();
            let extent = opts.psi_extent / d.iter().cloned().fold(f64::INFINITY, f64::min);
            let width = 2.0 * extent / opts.psi_panels as f64;
            let mut inner = 0.0;
            for a in 0..opts.psi_panels {
                for b in 0..opts.psi_panels {
                    let (a0, b0) = (-extent + a as f64 * width, -extent + b as f64 * width);
                    for (&x1, &w1) in psi_rule.nodes.iter().zip(&psi_rule.weights) {
                        for (&x2, &w2) in psi_rule.nodes.iter().zip(&psi_rule.weights) {
                            let psi1 = a0 + 0.5 * width * (x1 + 1.0);
                            let psi2 = b0 + 0.5 * width * (x2 + 1.0);
                            let psi3 = -(g[0] * psi1 + g[1] * psi2) / g[2];
                            let f = unfolded_corr_general(&s, &d, &[psi1, psi2, psi3])?;
                            inner += 0.25 * width * width * w1 * w2 * f;
                        }
                    }
                }
            }
            total += PI * tw * jac * inner;
        }
    }
    Ok(Complex64::new(total, 0.0) / Complex64::new(0.0, 2.0 * PI).powu(3))
}
