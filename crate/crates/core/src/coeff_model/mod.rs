//! The coefficient field `v(p) = (a(p), b(p))` of the two-matrix model
//! `K(p) = a(p) K₁ + b(p) K₂`, its covariance kernel, Lagrangian and Hessian,
//! and the centering gauge.

mod gauge;
mod parse;

use std::collections::BTreeMap;
use std::f64::consts::PI;

use num_complex::Complex64;
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};

pub use gauge::GaugeTable;
pub use parse::{parse_complex, parse_model, write_model, ModelFile};

pub type CVec2 = [Complex64; 2];

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };
const VALIDATION_GRID: usize = 1024;
const MIN_NORM: f64 = 1e-12;

/// `u†w`.
pub fn dot(u: &CVec2, w: &CVec2) -> Complex64 {
    u[0].conj() * w[0] + u[1].conj() * w[1]
}

/// `β(u, w) = uᵀ τ₂ w = i (u₂ w₁ − u₁ w₂)`.
pub fn beta(u: &CVec2, w: &CVec2) -> Complex64 {
    I * (u[1] * w[0] - u[0] * w[1])
}

pub fn norm_sqr(u: &CVec2) -> f64 {
    u[0].norm_sqr() + u[1].norm_sqr()
}

/// Finite Laurent series `Σ_m c_m e^{imp}`.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct LaurentSeries {
    terms: BTreeMap<i32, Complex64>,
}

impl LaurentSeries {
    /// Zero coefficients are dropped.
    pub fn from_map(terms: BTreeMap<i32, Complex64>) -> Self {
        let terms = terms.into_iter().filter(|(_, c)| *c != Complex64::new(0.0, 0.0)).collect();
        LaurentSeries { terms }
    }

    pub fn from_terms(terms: &[(i32, Complex64)]) -> Self {
        let mut map = BTreeMap::new();
        for &(m, c) in terms {
            *map.entry(m).or_insert(Complex64::new(0.0, 0.0)) += c;
        }
        Self::from_map(map)
    }

    pub fn terms(&self) -> impl Iterator<Item = (&i32, &Complex64)> {
        self.terms.iter()
    }

    pub fn coeff(&self, m: i32) -> Complex64 {
        self.terms.get(&m).copied().unwrap_or_default()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn min_index(&self) -> Option<i32> {
        self.terms.keys().next().copied()
    }

    pub fn max_index(&self) -> Option<i32> {
        self.terms.keys().next_back().copied()
    }

    /// `order`-th derivative at `p`, differentiated term by term.
    pub fn eval(&self, p: f64, order: u32) -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for (&m, &c) in &self.terms {
            let (s, co) = (m as f64 * p).sin_cos();
            let factor = (I * m as f64).powu(order);
            acc += c * factor * Complex64::new(co, s);
        }
        acc
    }
}

#[derive(Clone, Debug, PartialEq)]
struct Canonical {
    gauge: Option<GaugeTable>,
}

/// `v(p) = (a(p), b(p))` as Laurent series, optionally normalized and
/// centered. Immutable once built.
#[derive(Clone, Debug, PartialEq)]
pub struct CoefficientField {
    a: LaurentSeries,
    b: LaurentSeries,
    canonical: Option<Canonical>,
}

impl CoefficientField {
    /// Rejects fields where `v(p)` comes close to zero on a validation grid.
    pub fn new(a: LaurentSeries, b: LaurentSeries) -> Result<Self> {
        if a.is_empty() && b.is_empty() {
            return Err(Error::InvalidModel("both coefficient series are empty".into()));
        }
        for (_, c) in a.terms().chain(b.terms()) {
            if !c.re.is_finite() || !c.im.is_finite() {
                return Err(Error::InvalidModel("non-finite coefficient".into()));
            }
        }
        let field = CoefficientField { a, b, canonical: None };
        field.check_nonvanishing(VALIDATION_GRID)?;
        Ok(field)
    }

    pub fn from_terms(a: &[(i32, Complex64)], b: &[(i32, Complex64)]) -> Result<Self> {
        Self::new(LaurentSeries::from_terms(a), LaurentSeries::from_terms(b))
    }

    fn check_nonvanishing(&self, grid: usize) -> Result<()> {
        for i in 0..grid {
            let p = 2.0 * PI * (i as f64 + 0.5 * (i % 2) as f64) / grid as f64;
            let norm = norm_sqr(&self.raw_eval(p, 0)).sqrt();
            if norm < MIN_NORM {
                return Err(Error::DegenerateField { p, norm });
            }
        }
        Ok(())
    }

    pub fn a(&self) -> &LaurentSeries {
        &self.a
    }

    pub fn b(&self) -> &LaurentSeries {
        &self.b
    }

    /// Smallest and largest Fourier index over both series.
    pub fn index_range(&self) -> (i32, i32) {
        let lo = [self.a.min_index(), self.b.min_index()].into_iter().flatten().min();
        let hi = [self.a.max_index(), self.b.max_index()].into_iter().flatten().max();
        (lo.unwrap_or(0), hi.unwrap_or(0))
    }

    pub fn is_canonical(&self) -> bool {
        self.canonical.is_some()
    }

    pub fn gauge_table(&self) -> Option<&GaugeTable> {
        self.canonical.as_ref().and_then(|c| c.gauge.as_ref())
    }

    /// `φ(2π)`: zero unless a nontrivial gauge was applied.
    pub fn gauge_total_phase(&self) -> f64 {
        self.gauge_table().map_or(0.0, GaugeTable::total)
    }

    /// `B = exp(-iφ(2π))`; equal to one when no gauge is stored.
    pub fn berry_phase(&self) -> Complex64 {
        Complex64::from_polar(1.0, -self.gauge_total_phase())
    }

    /// True when the evaluated field repeats after 2π.
    pub fn is_periodic(&self) -> bool {
        (self.berry_phase() - 1.0).norm() < 1e-10
    }

    /// The Laurent series without gauge or normalization.
    pub fn raw(&self) -> CoefficientField {
        CoefficientField { a: self.a.clone(), b: self.b.clone(), canonical: None }
    }

    pub fn raw_eval(&self, p: f64, order: u32) -> CVec2 {
        [self.a.eval(p, order), self.b.eval(p, order)]
    }

    /// `v`, `v′` or `v″` at `p`. Canonical fields return the normalized and
    /// gauged vector `f(p) v(p)` and its derivatives, using the analytic
    /// log-derivative `f′/f = -v†v′/‖v‖²`.
    pub fn eval(&self, p: f64, order: u32) -> CVec2 {
        assert!(order <= 2, "derivative order above 2");
        let Some(canon) = &self.canonical else {
            return self.raw_eval(p, order);
        };
        let v = self.raw_eval(p, 0);
        let n2 = norm_sqr(&v);
        let phi = canon.gauge.as_ref().map_or(0.0, |g| g.phase_at(p));
        let h = Complex64::from_polar(1.0 / n2.sqrt(), -phi);
        if order == 0 {
            return [h * v[0], h * v[1]];
        }
        let v1 = self.raw_eval(p, 1);
        let vv1 = dot(&v, &v1);
        let lam = -vv1 / n2;
        if order == 1 {
            return [h * (v1[0] + lam * v[0]), h * (v1[1] + lam * v[1])];
        }
        let v2 = self.raw_eval(p, 2);
        let dlam = -(norm_sqr(&v1) + dot(&v, &v2)) / n2 + vv1 * (2.0 * vv1.re) / (n2 * n2);
        let c = dlam + lam * lam;
        [
            h * (v2[0] + 2.0 * lam * v1[0] + c * v[0]),
            h * (v2[1] + 2.0 * lam * v1[1] + c * v[1]),
        ]
    }

    /// `S(p, q) = v†(p) v(q)`.
    pub fn covariance(&self, p: f64, q: f64) -> Complex64 {
        dot(&self.eval(p, 0), &self.eval(q, 0))
    }

    /// `Δ(p) = β(v(p), v′(p))`.
    pub fn delta(&self, p: f64) -> Result<Complex64> {
        self.require_canonical()?;
        Ok(beta(&self.eval(p, 0), &self.eval(p, 1)))
    }

    /// `ℒ(p, q) = -ln S(p, q)` on the principal branch.
    pub fn lagrangian(&self, p: f64, q: f64) -> Result<Complex64> {
        self.require_canonical()?;
        let s = self.covariance(p, q);
        if s.norm() < 1e-14 {
            return Err(Error::BranchPoint { p, q });
        }
        Ok(-s.ln())
    }

    /// `s(p, q) = sign Re[Δ*(p) Δ(q) S(q,p) / S(p,q)]`.
    pub fn parallel_sign(&self, p: f64, q: f64) -> Result<f64> {
        let dp = self.delta(p)?;
        let dq = self.delta(q)?;
        let s = self.covariance(p, q);
        let x = dp.conj() * dq * s.conj() / s;
        Ok(if x.re >= 0.0 { 1.0 } else { -1.0 })
    }

    /// Hessian of `Re ℒ` in `(p, q)` from first and second derivatives of
    /// `S`. At a point of parallelism one eigenvalue vanishes, with the
    /// curve tangent as its eigenvector.
    pub fn hessian(&self, point: &ParallelPoint) -> Result<[[f64; 2]; 2]> {
        self.require_canonical()?;
        let (p, q) = (point.p, point.q);
        let vp = [self.eval(p, 0), self.eval(p, 1), self.eval(p, 2)];
        let vq = [self.eval(q, 0), self.eval(q, 1), self.eval(q, 2)];
        let s = dot(&vp[0], &vq[0]);
        if s.norm() < 1e-14 {
            return Err(Error::BranchPoint { p, q });
        }
        let sp = dot(&vp[1], &vq[0]);
        let sq = dot(&vp[0], &vq[1]);
        let second = |xy: Complex64, x: Complex64, y: Complex64| -((xy * s - x * y) / (s * s)).re;
        let hpp = second(dot(&vp[2], &vq[0]), sp, sp);
        let hqq = second(dot(&vp[0], &vq[2]), sq, sq);
        let hpq = second(dot(&vp[1], &vq[1]), sp, sq);
        Ok([[hpp, hpq], [hpq, hqq]])
    }

    fn require_canonical(&self) -> Result<()> {
        if self.is_canonical() {
            Ok(())
        } else {
            Err(Error::NotCanonical)
        }
    }

    /// Normalizes `v` pointwise and applies the centering gauge, tabulated on
    /// `grid_size` panels.
    pub fn canonicalize(&self, grid_size: usize) -> Result<CoefficientField> {
        if grid_size < 256 {
            return Err(Error::InvalidArgument(format!(
                "gauge grid must have at least 256 panels, got {grid_size}"
            )));
        }
        let raw = self.raw();
        raw.check_nonvanishing(grid_size)?;
        let rate = |p: f64| {
            let v = raw.raw_eval(p, 0);
            dot(&v, &raw.raw_eval(p, 1)).im / norm_sqr(&v)
        };
        let scale = (0..grid_size)
            .map(|i| rate(2.0 * PI * (i as f64 + 0.37) / grid_size as f64).abs())
            .fold(0.0, f64::max);
        let gauge = if scale < 1e-13 { None } else { Some(GaugeTable::build(grid_size, rate)) };
        Ok(CoefficientField { canonical: Some(Canonical { gauge }), ..raw })
    }

    /// Largest `|‖v‖² − 1|` and `|v†v′|` over a uniform grid.
    pub fn canonical_residuals(&self, grid: usize) -> (f64, f64) {
        let mut norm_err: f64 = 0.0;
        let mut orth_err: f64 = 0.0;
        for i in 0..grid {
            let p = 2.0 * PI * i as f64 / grid as f64;
            let v = self.eval(p, 0);
            norm_err = norm_err.max((norm_sqr(&v) - 1.0).abs());
            orth_err = orth_err.max(dot(&v, &self.eval(p, 1)).norm());
        }
        (norm_err, orth_err)
    }

    /// SHA-256 of the canonical model text, hex encoded.
    pub fn model_hash(&self) -> String {
        let digest = Sha256::digest(write_model(None, &self.raw()).as_bytes());
        digest.iter().map(|b| format!("{b:02x}")).collect()
    }
}

/// A pair `(p, q)` with `v(p) ∥ v(q)`; `phase = S(p, q)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ParallelPoint {
    pub p: f64,
    pub q: f64,
    pub phase: Complex64,
}

impl ParallelPoint {
    pub fn new(field: &CoefficientField, p: f64, q: f64) -> Result<ParallelPoint> {
        field.require_canonical()?;
        let p = p.rem_euclid(2.0 * PI);
        let q = q.rem_euclid(2.0 * PI);
        let s = field.covariance(p, q);
        let re_l = -s.norm().ln();
        if re_l > 1e-10 || (s.norm() - 1.0).abs() > 1e-8 {
            return Err(Error::NotParallel { p, q, re_l });
        }
        Ok(ParallelPoint { p, q, phase: s })
    }
}
