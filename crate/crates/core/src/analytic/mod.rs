//! Closed-form statistics of the model: generating function, k-point
//! correlators, unfolded limits on parallelism curves, the variance
//! coefficient `I₂` and Gaussian moment predictions.

mod curves;
mod identities;
mod moments;
mod unfolded;

use itertools::Itertools;
use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::coeff_model::{beta, dot, CVec2, CoefficientField};
use crate::error::{Error, Result};
use crate::linalg::{small_condition, small_det, CMatrix};

pub use curves::{find_parallel_curves, Curve, CurveOptions, CurveSet};
pub use identities::{cauchy_identity_check, f1_derivative_det, f1_derivative_explicit};
pub use moments::{
    analytic_mean, gaussian_pdf, predict_moments, MomentPrediction, PREDICTED_KURTOSIS, SKEWNESS_DECAY,
};
pub use unfolded::{i2, i3, unfolded_corr, unfolded_corr_general, unfolded_corr_k2, I3Options};

/// Largest k handled by the permutation sums.
pub const MAX_K: usize = 8;
/// Condition estimate (or inverse `|β|`) beyond which points count as parallel.
pub const PARALLEL_CONDITION: f64 = 1e12;

fn check_k(k: usize) -> Result<()> {
    if k == 0 || k > MAX_K {
        Err(Error::InvalidArgument(format!("k must be in 1..={MAX_K}, got {k}")))
    } else {
        Ok(())
    }
}

fn require_canonical(field: &CoefficientField) -> Result<()> {
    if field.is_canonical() {
        Ok(())
    } else {
        Err(Error::NotCanonical)
    }
}

/// `z^n` for `|z| ≤ 1`: phase by repeated squaring of `z/|z|`, magnitude in
/// log space.
pub fn pow_n(z: Complex64, n: u32) -> Complex64 {
    let r = z.norm();
    if r == 0.0 {
        return Complex64::new(0.0, 0.0);
    }
    (z / r).powu(n) * (n as f64 * r.ln()).exp()
}

/// `Σ_l (−1)^l / (2^l l! (k−2l)!) Σ_σ Π_m pair(σ(2m−1), σ(2m)) · det[entry(σ(a), σ(b)) (1 − δ_ab)]`
/// with `a, b > 2l`: the shared skeleton of `C_k` and `f_k`.
pub(crate) fn pair_permutation_sum(pair: &CMatrix, entry: &CMatrix) -> Complex64 {
    let k = pair.nrows();
    let fact = |m: usize| (1..=m).map(|x| x as f64).product::<f64>();
    let mut total = Complex64::new(0.0, 0.0);
    for l in 0..=k / 2 {
        let weight = (-1f64).powi(l as i32) / (2f64.powi(l as i32) * fact(l) * fact(k - 2 * l));
        let rest = k - 2 * l;
        let mut acc = Complex64::new(0.0, 0.0);
        for sigma in (0..k).permutations(k) {
            let mut prod = Complex64::new(1.0, 0.0);
            for m in 0..l {
                prod *= pair[(sigma[2 * m], sigma[2 * m + 1])];
            }
            if prod == Complex64::new(0.0, 0.0) {
                continue;
            }
            let tail = &sigma[2 * l..];
            let sub = DMatrix::from_fn(rest, rest, |a, b| {
                if a == b {
                    Complex64::new(0.0, 0.0)
                } else {
                    entry[(tail[a], tail[b])]
                }
            });
            acc += prod * small_det(&sub);
        }
        total += weight * acc;
    }
    total
}

/// Vectors, `Δ`, `β` and `S^N` at a tuple of points.
struct PointData {
    v: Vec<CVec2>,
    delta: Vec<Complex64>,
}

impl PointData {
    fn new(field: &CoefficientField, p: &[f64]) -> Result<PointData> {
        require_canonical(field)?;
        let v = p.iter().map(|&x| field.eval(x, 0)).collect();
        let delta = p.iter().map(|&x| field.delta(x)).collect::<Result<_>>()?;
        Ok(PointData { v, delta })
    }

    fn k(&self) -> usize {
        self.v.len()
    }

    fn beta(&self, a: usize, b: usize) -> Complex64 {
        beta(&self.v[a], &self.v[b])
    }

    fn s(&self, a: usize, b: usize) -> Complex64 {
        dot(&self.v[a], &self.v[b])
    }

    fn check_separated(&self) -> Result<()> {
        for a in 0..self.k() {
            for b in a + 1..self.k() {
                let bt = self.beta(a, b).norm();
                if !(bt * PARALLEL_CONDITION > 1.0) {
                    return Err(Error::IllConditioned { cond: 1.0 / bt });
                }
            }
        }
        Ok(())
    }

    /// `Δ_a Δ_b / β_ab²`.
    fn pair_matrix(&self) -> CMatrix {
        let k = self.k();
        CMatrix::from_fn(k, k, |a, b| {
            if a == b {
                Complex64::new(0.0, 0.0)
            } else {
                let bt = self.beta(a, b);
                self.delta[a] * self.delta[b] / (bt * bt)
            }
        })
    }

    /// `Δ_b / β_ab · S_ab^N`.
    fn entry_matrix(&self, n: u32) -> CMatrix {
        let k = self.k();
        CMatrix::from_fn(k, k, |a, b| {
            if a == b {
                Complex64::new(0.0, 0.0)
            } else {
                self.delta[b] / self.beta(a, b) * pow_n(self.s(a, b), n)
            }
        })
    }
}

/// Ratio of the two k×k determinants of the source-regularized generating
/// function `Z(p, J) = ⟨Π_l det K(p_l + J_l) / det K(p_l)⟩`.
pub fn gen_func(field: &CoefficientField, n: u32, p: &[f64], j: &[f64]) -> Result<Complex64> {
    require_canonical(field)?;
    check_k(p.len())?;
    if j.len() != p.len() {
        return Err(Error::InvalidArgument("p and J must have equal length".into()));
    }
    let k = p.len();
    let v: Vec<CVec2> = p.iter().map(|&x| field.eval(x, 0)).collect();
    let w: Vec<CVec2> = p.iter().zip(j).map(|(&x, &dj)| field.eval(x + dj, 0)).collect();
    let mut num = CMatrix::zeros(k, k);
    let mut den = CMatrix::zeros(k, k);
    for col in 0..k {
        if j[col] == 0.0 {
            num[(col, col)] = Complex64::new(1.0, 0.0);
            den[(col, col)] = Complex64::new(1.0, 0.0);
            continue;
        }
        let top = beta(&v[col], &w[col]);
        for row in 0..k {
            let ratio = if row == col {
                Complex64::new(1.0, 0.0)
            } else {
                top / beta(&v[row], &w[col])
            };
            den[(row, col)] = ratio;
            num[(row, col)] = ratio * pow_n(dot(&v[row], &w[col]), n);
        }
    }
    for m in [&num, &den] {
        let cond = small_condition(m);
        if !(cond <= PARALLEL_CONDITION) {
            return Err(Error::IllConditioned { cond });
        }
    }
    Ok(small_det(&num) / small_det(&den))
}

/// `C_k(p) = ⟨w(p_1) ⋯ w(p_k)⟩`. Uses the closed two- and three-point forms
/// for k ≤ 3 and the permutation sum otherwise.
pub fn corr_k(field: &CoefficientField, n: u32, p: &[f64]) -> Result<Complex64> {
    match p.len() {
        1 => corr_1(field, n, p[0]),
        2 => corr_2(field, n, p[0], p[1]),
        3 => corr_3(field, n, [p[0], p[1], p[2]]),
        _ => corr_k_general(field, n, p),
    }
}

/// Permutation-sum form valid for every k.
pub fn corr_k_general(field: &CoefficientField, n: u32, p: &[f64]) -> Result<Complex64> {
    check_k(p.len())?;
    let data = PointData::new(field, p)?;
    data.check_separated()?;
    Ok(pair_permutation_sum(&data.pair_matrix(), &data.entry_matrix(n)))
}

/// `N v†v′ / v†v`, identically zero once the field is centered.
pub fn corr_1(field: &CoefficientField, n: u32, p: f64) -> Result<Complex64> {
    require_canonical(field)?;
    let v = field.eval(p, 0);
    Ok(n as f64 * dot(&v, &field.eval(p, 1)) / dot(&v, &v))
}

/// `Δ(p₁)Δ(p₂) / β₁₂² · (|S₁₂|^{2N} − 1)`.
pub fn corr_2(field: &CoefficientField, n: u32, p1: f64, p2: f64) -> Result<Complex64> {
    let p = [p1, p2];
    let data = PointData::new(field, &p)?;
    data.check_separated()?;
    let bt = data.beta(0, 1);
    let decay = (n as f64 * data.s(0, 1).norm_sqr().ln()).exp_m1();
    Ok(data.delta[0] * data.delta[1] / (bt * bt) * decay)
}

/// `Δ₁Δ₂Δ₃ / (β₁₂β₂₃β₃₁) · 2i Im (S₁₂S₂₃S₃₁)^N`.
pub fn corr_3(field: &CoefficientField, n: u32, p: [f64; 3]) -> Result<Complex64> {
    let data = PointData::new(field, &p)?;
    data.check_separated()?;
    let cycle = pow_n(data.s(0, 1), n) * pow_n(data.s(1, 2), n) * pow_n(data.s(2, 0), n);
    let den = data.beta(0, 1) * data.beta(1, 2) * data.beta(2, 0);
    Ok(data.delta[0] * data.delta[1] * data.delta[2] / den * Complex64::new(0.0, 2.0 * cycle.im))
}

/// Mixed derivative `∂_{J_1}⋯∂_{J_k} Z` at `J = 0` by central differences.
pub fn gen_func_mixed_derivative(field: &CoefficientField, n: u32, p: &[f64], h: f64) -> Result<Complex64> {
    let k = p.len();
    let mut acc = Complex64::new(0.0, 0.0);
    for mask in 0..(1usize << k) {
        let j: Vec<f64> = (0..k).map(|i| if mask >> i & 1 == 1 { -h } else { h }).collect();
        let sign = if mask.count_ones() % 2 == 1 { -1.0 } else { 1.0 };
        acc += sign * gen_func(field, n, p, &j)?;
    }
    Ok(acc / (2.0 * h).powi(k as i32))
}
