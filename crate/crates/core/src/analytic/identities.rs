use num_complex::Complex64;

use super::pow_n;
use crate::coeff_model::{beta, dot, norm_sqr, CVec2, CoefficientField};
use crate::error::{Error, Result};
use crate::linalg::{small_det, CMatrix};

fn kappa(field: &CoefficientField, p: f64) -> Result<Complex64> {
    let v = field.eval(p, 0);
    if v[1].norm() < 1e-12 * norm_sqr(&v).sqrt() {
        return Err(Error::PoleEncountered { p });
    }
    Ok(v[0] / v[1])
}

/// `|det⁻¹[(κ(p_n+J_n) − κ(p_n)) / (κ(p_n+J_n) − κ(p_m))] − Π_{m<n}(…)|`
/// with `κ = a/b`: the Cauchy determinant identity behind the denominator of
/// the generating function. Columns with `J_n = 0` are unit vectors.
pub fn cauchy_identity_check(field: &CoefficientField, p: &[f64], j: &[f64]) -> Result<f64> {
    let k = p.len();
    if j.len() != k {
        return Err(Error::InvalidArgument("p and J must have equal length".into()));
    }
    let y: Vec<Complex64> = p.iter().map(|&x| kappa(field, x)).collect::<Result<_>>()?;
    let x: Vec<Complex64> =
        p.iter().zip(j).map(|(&a, &b)| kappa(field, a + b)).collect::<Result<_>>()?;
    let m = CMatrix::from_fn(k, k, |row, col| {
        if j[col] == 0.0 {
            Complex64::new(if row == col { 1.0 } else { 0.0 }, 0.0)
        } else {
            (x[col] - y[col]) / (x[col] - y[row])
        }
    });
    let lhs = 1.0 / small_det(&m);
    let mut rhs = Complex64::new(1.0, 0.0);
    for a in 0..k {
        for b in a + 1..k {
            rhs *= (x[a] - y[b]) / (x[a] - x[b]) * (x[b] - y[a]) / (y[b] - y[a]);
        }
    }
    Ok((lhs - rhs).norm())
}

fn f1_entry(v: &[CVec2], delta: &[Complex64], n: u32, a: usize, b: usize) -> Complex64 {
    delta[b] / beta(&v[a], &v[b]) * pow_n(dot(&v[a], &v[b]), n)
}

fn point_data(field: &CoefficientField, p: &[f64]) -> Result<(Vec<CVec2>, Vec<Complex64>)> {
    let v = p.iter().map(|&x| field.eval(x, 0)).collect();
    let d = p.iter().map(|&x| field.delta(x)).collect::<Result<_>>()?;
    Ok((v, d))
}

/// Derivative of the numerator `F₁` in all sources of `p` at `J = 0`:
/// `det[Δ(p_b)/β(v(p_a), v(p_b)) · S(p_a,p_b)^N (1 − δ_ab)]`.
pub fn f1_derivative_det(field: &CoefficientField, n: u32, p: &[f64]) -> Result<Complex64> {
    let (v, d) = point_data(field, p)?;
    let k = p.len();
    let m = CMatrix::from_fn(k, k, |a, b| {
        if a == b {
            Complex64::new(0.0, 0.0)
        } else {
            f1_entry(&v, &d, n, a, b)
        }
    });
    Ok(small_det(&m))
}

/// Closed forms of the same derivative for two and three points.
pub fn f1_derivative_explicit(field: &CoefficientField, n: u32, p: &[f64]) -> Result<Complex64> {
    let (v, d) = point_data(field, p)?;
    let s = |a: usize, b: usize| pow_n(dot(&v[a], &v[b]), n);
    let bt = |a: usize, b: usize| beta(&v[a], &v[b]);
    match p.len() {
        2 => Ok(d[0] * d[1] / (bt(0, 1) * bt(0, 1)) * s(0, 1) * s(1, 0)),
        3 => {
            let den = bt(0, 1) * bt(1, 2) * bt(2, 0);
            Ok(d[0] * d[1] * d[2] / den * (s(0, 1) * s(1, 2) * s(2, 0) - s(0, 2) * s(2, 1) * s(1, 0)))
        }
        k => Err(Error::InvalidArgument(format!("explicit form exists for 2 or 3 points, got {k}"))),
    }
}
