//! Integer winding number `W` of `det K(p)` around the origin for a single
//! realization, by phase unwrapping or by counting polynomial roots.

mod roots;

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::coeff_model::CoefficientField;
use crate::ensemble::{self, Realization};
use crate::error::{Error, Result};
use crate::linalg::wrap_angle;

pub use roots::{winding_pencil, winding_root_count, LaurentStructure, MAX_ROOT_COUNT_DEGREE};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    PhaseUnwrap,
    RootCount,
    /// Eigenvalues of the linearized matrix polynomial `Σ_j C_j z^j`.
    Pencil,
}

impl std::str::FromStr for Method {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "unwrap" | "phase_unwrap" => Ok(Method::PhaseUnwrap),
            "roots" | "root_count" => Ok(Method::RootCount),
            "pencil" => Ok(Method::Pencil),
            _ => Err(Error::InvalidArgument(format!("unknown winding method `{s}`"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct WindingResult {
    pub w: i64,
    pub method: Method,
    pub grid_points_used: usize,
    pub refinement_depth: usize,
}

/// Largest phase step accepted between neighboring samples.
pub const MAX_PHASE_STEP: f64 = PI / 2.0;

/// Initial grid used by production runs: `max(256, 4 N (m_max − m_min))`.
pub fn default_unwrap_grid(field: &CoefficientField, n: usize) -> usize {
    let (lo, hi) = field.index_range();
    (4 * n * (hi - lo) as usize).max(256)
}

pub const DEFAULT_MAX_DEPTH: usize = 30;

pub(crate) fn require_periodic(field: &CoefficientField) -> Result<()> {
    if field.is_periodic() {
        Ok(())
    } else {
        Err(Error::NonPeriodicField)
    }
}

#[derive(Clone, Copy)]
struct Sample {
    phase: f64,
    rate: f64,
}

struct Unwrapper<'a> {
    real: &'a Realization,
    field: &'a CoefficientField,
    max_depth: usize,
    evaluations: usize,
    deepest: usize,
}

impl Unwrapper<'_> {
    /// Phase of `det K(p)` and the modulus of its log-derivative `w(p)`.
    fn phase(&mut self, p: f64) -> Result<Sample> {
        self.evaluations += 1;
        let (ld, w) = ensemble::log_det_and_density(self.real, self.field, p);
        match w {
            Some(w) if ld.ln_abs.is_finite() && w.is_finite() => Ok(Sample { phase: ld.phase, rate: w.norm() }),
            _ => Err(Error::NonConvergent { p, max_depth: self.max_depth }),
        }
    }

    /// Phase increment over `[a, b]`. The interval is bisected while the
    /// sampled step, or `h·|w|` at either end, exceeds π/2. A zero of
    /// `det K` close to the circle turns the phase by about π within a
    /// distance of the order of its offset, yet at a few such distances
    /// `w ≈ 1/(p − p₀)` is nearly real; only the modulus reliably flags a
    /// zero hiding between two samples.
    fn increment(&mut self, a: f64, fa: Sample, b: f64, fb: Sample, depth: usize) -> Result<f64> {
        let d = wrap_angle(fb.phase - fa.phase);
        let h = b - a;
        if d.abs() <= MAX_PHASE_STEP && h * fa.rate.abs().max(fb.rate.abs()) <= MAX_PHASE_STEP {
            self.deepest = self.deepest.max(depth);
            return Ok(d);
        }
        if depth >= self.max_depth {
            return Err(Error::NonConvergent { p: 0.5 * (a + b), max_depth: self.max_depth });
        }
        let m = 0.5 * (a + b);
        let fm = self.phase(m)?;
        Ok(self.increment(a, fa, m, fm, depth + 1)? + self.increment(m, fm, b, fb, depth + 1)?)
    }
}

/// Total change of `arg det K(p)` over one period divided by 2π, using
/// LU-accumulated phases so large `N` never overflows.
pub fn winding_unwrap(
    real: &Realization,
    field: &CoefficientField,
    initial_grid: usize,
    max_depth: usize,
) -> Result<WindingResult> {
    require_periodic(field)?;
    if initial_grid < 64 {
        return Err(Error::InvalidArgument(format!(
            "unwrap grid must have at least 64 points, got {initial_grid}"
        )));
    }
    let mut u = Unwrapper { real, field, max_depth, evaluations: 0, deepest: 0 };
    let step = 2.0 * PI / initial_grid as f64;
    let first = u.phase(0.0)?;
    let mut prev = first;
    let mut total = 0.0;
    for i in 1..=initial_grid {
        let b = i as f64 * step;
        let fb = if i == initial_grid { first } else { u.phase(b)? };
        total += u.increment(b - step, prev, b, fb, 0)?;
        prev = fb;
    }
    let turns = total / (2.0 * PI);
    let w = turns.round();
    if (turns - w).abs() >= 0.1 {
        return Err(Error::Inconsistent { turns });
    }
    Ok(WindingResult {
        w: w as i64,
        method: Method::PhaseUnwrap,
        grid_points_used: u.evaluations,
        refinement_depth: u.deepest,
    })
}

/// Dispatches on `method` with production defaults.
pub fn winding_number(real: &Realization, field: &CoefficientField, method: Method) -> Result<WindingResult> {
    match method {
        Method::PhaseUnwrap => {
            winding_unwrap(real, field, default_unwrap_grid(field, real.n), DEFAULT_MAX_DEPTH)
        }
        Method::RootCount => winding_root_count(real, field),
        Method::Pencil => winding_pencil(real, field),
    }
}
