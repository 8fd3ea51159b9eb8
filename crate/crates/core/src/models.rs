//! Built-in coefficient fields.

use num_complex::Complex64;

use crate::coeff_model::CoefficientField;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// `v(p) = (cos p, sin p)`.
pub fn trig() -> CoefficientField {
    CoefficientField::from_terms(
        &[(1, c(0.5, 0.0)), (-1, c(0.5, 0.0))],
        &[(1, c(0.0, -0.5)), (-1, c(0.0, 0.5))],
    )
    .expect("trig model is valid")
}

/// `v(p) = (a₁ + a₂e^{ip}, b₁ + b₂e^{ip})` with fixed generic coefficients;
/// its only parallelism curve is the diagonal and it carries a Berry phase.
pub fn fig3() -> CoefficientField {
    two_term(c(0.92, 0.82), c(0.91, -0.77), c(0.41, -0.95), c(-0.84, -0.70))
}

pub fn two_term(a1: Complex64, a2: Complex64, b1: Complex64, b2: Complex64) -> CoefficientField {
    CoefficientField::from_terms(&[(0, a1), (1, a2)], &[(0, b1), (1, b2)])
        .expect("two-term model is valid")
}

/// `v(p) = (cos 2p, sin p)`, whose parallelism curves cross at `p = π/2, 3π/2`.
pub fn crossing() -> CoefficientField {
    CoefficientField::from_terms(
        &[(2, c(0.5, 0.0)), (-2, c(0.5, 0.0))],
        &[(1, c(0.0, -0.5)), (-1, c(0.0, 0.5))],
    )
    .expect("crossing model is valid")
}

/// `v(p) = (e^{ip}, 0)`.
pub fn plane_wave() -> CoefficientField {
    CoefficientField::from_terms(&[(1, c(1.0, 0.0))], &[]).expect("plane wave is valid")
}

/// `v(p) = (1, 0)`.
pub fn constant() -> CoefficientField {
    CoefficientField::from_terms(&[(0, c(1.0, 0.0))], &[]).expect("constant field is valid")
}

pub fn by_name(name: &str) -> Option<CoefficientField> {
    match name {
        "trig" => Some(trig()),
        "fig3" => Some(fig3()),
        "crossing" => Some(crossing()),
        "plane-wave" => Some(plane_wave()),
        "constant" => Some(constant()),
        _ => None,
    }
}
