use std::f64::consts::PI;

use num_complex::Complex64;
use rustfft::FftPlanner;

use super::{require_periodic, Method, WindingResult};
use crate::coeff_model::CoefficientField;
use crate::ensemble::{combine, Realization};
use crate::error::{Error, Result};
use crate::linalg::{eigenvalues, CMatrix, Lu};

/// Companion matrices above this size are not attempted.
pub const MAX_ROOT_COUNT_DEGREE: usize = 2048;
const CIRCLE_TOL: f64 = 1e-8;

/// Fourier support of a field: indices `m_min + j·stride`, `j = 0..=steps`.
/// With `z = s^stride`, `s^{-N m_min} det K(s)` is a polynomial of degree
/// `N·steps` in `z`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct LaurentStructure {
    pub m_min: i32,
    pub stride: usize,
    pub steps: usize,
}

fn gcd(a: usize, b: usize) -> usize {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

impl LaurentStructure {
    pub fn of(field: &CoefficientField) -> LaurentStructure {
        let (m_min, m_max) = field.index_range();
        let g = field
            .a()
            .terms()
            .chain(field.b().terms())
            .map(|(m, _)| (m - m_min) as usize)
            .fold(0, gcd);
        let stride = g.max(1);
        LaurentStructure { m_min, stride, steps: (m_max - m_min) as usize / stride }
    }

    fn coefficient_matrix(&self, field: &CoefficientField, real: &Realization, j: usize) -> CMatrix {
        let m = self.m_min + (j * self.stride) as i32;
        combine(real, field.a().coeff(m), field.b().coeff(m))
    }
}

/// Winding of the gauged field relative to the raw Laurent field.
fn gauge_offset(field: &CoefficientField, n: usize) -> i64 {
    -(n as i64) * (field.gauge_total_phase() / (2.0 * PI)).round() as i64
}

fn count_inside(roots: &[Complex64], inside_small: bool) -> Result<usize> {
    let mut count = 0;
    for r in roots {
        let modulus = r.norm();
        if (modulus - 1.0).abs() < CIRCLE_TOL {
            return Err(Error::RootOnCircle { modulus });
        }
        if (modulus < 1.0) == inside_small {
            count += 1;
        }
    }
    Ok(count)
}

/// First-order size of the root displacement caused by an absolute
/// perturbation `delta` of every coefficient.
fn root_uncertainty(coeffs: &[Complex64], r: Complex64, delta: f64) -> f64 {
    let mut deriv = Complex64::new(0.0, 0.0);
    let mut scale = 0.0;
    let mut rp = 1.0;
    for (j, c) in coeffs.iter().enumerate() {
        if j > 0 {
            deriv += j as f64 * c * r.powu(j as u32 - 1);
        }
        scale += rp;
        rp *= r.norm();
    }
    delta * scale / deriv.norm()
}

/// Counts zeros of `det K(s)` inside the unit circle. The polynomial
/// coefficients come from an inverse DFT of `det K` sampled at roots of
/// unity, the zeros from companion-matrix eigenvalues.
///
/// Clustered zeros make the monomial coefficients far larger than `det K`
/// on the circle, and the scalar roots then lose all accuracy. When the
/// first-order uncertainty of any root reaches the unit circle the count is
/// taken from the block-companion linearization of the matrix polynomial
/// instead, which sees the same zeros without forming the coefficients.
pub fn winding_root_count(real: &Realization, field: &CoefficientField) -> Result<WindingResult> {
    require_periodic(field)?;
    let st = LaurentStructure::of(field);
    let n = real.n;
    let degree = n * st.steps;
    let base = n as i64 * st.m_min as i64 + gauge_offset(field, n);
    if degree > MAX_ROOT_COUNT_DEGREE {
        return Err(Error::DegreeTooLarge { degree, limit: MAX_ROOT_COUNT_DEGREE });
    }
    if degree == 0 {
        return Ok(WindingResult { w: base, method: Method::RootCount, grid_points_used: 0, refinement_depth: 0 });
    }
    let raw = field.raw();
    let m = degree + 1;
    let shift = n as f64 * st.m_min as f64;
    let samples: Vec<(f64, f64)> = (0..m)
        .map(|k| {
            let p = 2.0 * PI * k as f64 / (st.stride * m) as f64;
            let [a, b] = raw.raw_eval(p, 0);
            let ld = Lu::new(combine(real, a, b)).log_det();
            (ld.ln_abs, ld.phase - shift * p)
        })
        .collect();
    let top = samples.iter().map(|s| s.0).fold(f64::NEG_INFINITY, f64::max);
    if !top.is_finite() {
        return Err(Error::IllConditioned { cond: f64::INFINITY });
    }
    let mut buf: Vec<Complex64> =
        samples.iter().map(|&(l, ph)| Complex64::from_polar((l - top).exp(), ph)).collect();
    FftPlanner::new().plan_fft_forward(m).process(&mut buf);
    let coeffs: Vec<Complex64> = buf.iter().map(|c| c / m as f64).collect();

    let lead = coeffs[degree];
    let mut companion = CMatrix::zeros(degree, degree);
    for j in 0..degree {
        companion[(0, j)] = -coeffs[degree - 1 - j] / lead;
        if j + 1 < degree {
            companion[(j + 1, j)] = Complex64::new(1.0, 0.0);
        }
    }
    let roots = eigenvalues(companion)?;
    let coeff_norm: f64 = coeffs.iter().map(|c| c.norm()).sum();
    let delta = 8.0 * f64::EPSILON * ((m as f64).sqrt() + coeff_norm);
    let reliable = roots
        .iter()
        .all(|&r| ((r.norm() - 1.0).abs()) > 10.0 * root_uncertainty(&coeffs, r, delta));
    if !reliable {
        let w = winding_pencil(real, field)?.w;
        return Ok(WindingResult { w, method: Method::RootCount, grid_points_used: m, refinement_depth: 0 });
    }
    let inside = count_inside(&roots, true)?;
    Ok(WindingResult {
        w: base + (st.stride * inside) as i64,
        method: Method::RootCount,
        grid_points_used: m,
        refinement_depth: 0,
    })
}

/// Counts zeros of `det(Σ_j C_j z^j)` inside the unit circle through the
/// eigenvalues of a block-companion linearization. The better conditioned of
/// `C_top` and `C_0` is inverted; with `C_0` the reversed polynomial is used
/// and roots outside the circle are counted instead.
pub fn winding_pencil(real: &Realization, field: &CoefficientField) -> Result<WindingResult> {
    require_periodic(field)?;
    let st = LaurentStructure::of(field);
    let n = real.n;
    let base = n as i64 * st.m_min as i64 + gauge_offset(field, n);
    let d = st.steps;
    if d == 0 {
        return Ok(WindingResult { w: base, method: Method::Pencil, grid_points_used: 0, refinement_depth: 0 });
    }
    let c: Vec<CMatrix> = (0..=d).map(|j| st.coefficient_matrix(field, real, j)).collect();
    let lu_top = Lu::new(c[d].clone());
    let lu_low = Lu::new(c[0].clone());
    let reversed = lu_low.condition_estimate() < lu_top.condition_estimate();
    let (lu, order): (&Lu, Vec<usize>) = if reversed {
        (&lu_low, (0..=d).rev().collect())
    } else {
        (&lu_top, (0..=d).collect())
    };
    if !(lu.condition_estimate() < 1e14) {
        return Err(Error::IllConditioned { cond: lu.condition_estimate() });
    }
    // order[j] is the coefficient multiplying (the linearization variable)^j.
    let size = n * d;
    let mut comp = CMatrix::zeros(size, size);
    for j in 0..d {
        let block = -lu.solve(&c[order[d - 1 - j]]);
        comp.view_mut((0, j * n), (n, n)).copy_from(&block);
        if j + 1 < d {
            for i in 0..n {
                comp[((j + 1) * n + i, j * n + i)] = Complex64::new(1.0, 0.0);
            }
        }
    }
    let roots = eigenvalues(comp)?;
    let inside = count_inside(&roots, !reversed)?;
    Ok(WindingResult {
        w: base + (st.stride * inside) as i64,
        method: Method::Pencil,
        grid_points_used: 0,
        refinement_depth: 0,
    })
}
