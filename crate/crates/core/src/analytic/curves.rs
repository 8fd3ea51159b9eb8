//! Curves on the `(p, q)` torus along which `v(p) ∥ v(q)`.
//!
//! Away from zeros of `Δ` the slope `dq/dp = s(p,q) |Δ(p)| / |Δ(q)|` is finite
//! and nonzero, so every curve is a graph over `p` that winds around the torus
//! in the `p` direction. Curves are traced with `p` as the running parameter.

use std::f64::consts::PI;
use std::io::Write;

use crate::coeff_model::{beta, CoefficientField, ParallelPoint};
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CurveOptions {
    /// Grid points per torus axis; also the number of continuation steps per
    /// period of `p`.
    pub scan_grid: usize,
    /// Hessian trace below which a point counts as multicritical.
    pub multicritical_trace: f64,
    pub closure_tol: f64,
    /// Seeds closer than this to a known curve are duplicates.
    pub dedup_distance: f64,
    pub max_windings: usize,
}

impl Default for CurveOptions {
    fn default() -> Self {
        CurveOptions {
            scan_grid: 256,
            multicritical_trace: 1e-8,
            closure_tol: 1e-6,
            dedup_distance: 1e-3,
            max_windings: 10,
        }
    }
}

/// One closed curve `Γ(t) = (p₀ + w t, q(p₀ + w t))`, `t ∈ [0, 2π)`, sampled
/// at `t_i = 2π i / M`.
#[derive(Clone, Debug, PartialEq)]
pub struct Curve {
    pub windings: usize,
    pub t: Vec<f64>,
    /// Unreduced coordinates; `p` increases monotonically, `q` is continuous.
    pub p: Vec<f64>,
    pub q: Vec<f64>,
    pub s1: Vec<f64>,
    pub s2: Vec<f64>,
    pub abs_delta_p: Vec<f64>,
    pub abs_delta_q: Vec<f64>,
    pub tangent_norm: Vec<f64>,
}

impl Curve {
    pub fn len(&self) -> usize {
        self.t.len()
    }

    pub fn is_empty(&self) -> bool {
        self.t.is_empty()
    }

    pub fn start(&self) -> (f64, f64) {
        (self.p[0], self.q[0])
    }

    fn step(&self) -> f64 {
        2.0 * PI * self.windings as f64 / self.len() as f64
    }

    /// `q` on the curve at any `p` in its range, refined to parallelism.
    pub fn q_at(&self, field: &CoefficientField, p: f64) -> Result<f64> {
        let h = self.step();
        let x = (p - self.p[0]) / h;
        let i = (x.round() as isize).rem_euclid(self.len() as isize) as usize;
        let lap = ((p - self.p[i]) / (2.0 * PI * self.windings as f64)).round();
        let dp = p - self.p[i] - lap * 2.0 * PI * self.windings as f64;
        let slope = self.s2[i] * self.abs_delta_p[i] / self.abs_delta_q[i];
        refine_q(field, p, self.q[i] + slope * dp)
    }

    /// Whether `(p, q)` lies on this curve, comparing `q` modulo 2π at the
    /// sample rows matching `p`.
    fn covers(&self, p: f64, q: f64, tol: f64) -> bool {
        self.p.iter().zip(&self.q).any(|(&cp, &cq)| {
            torus_gap(cp, p) < 1e-9 && torus_gap(cq, q) < tol
        })
    }
}

fn torus_gap(a: f64, b: f64) -> f64 {
    let d = (a - b).rem_euclid(2.0 * PI);
    d.min(2.0 * PI - d)
}

#[derive(Clone, Debug, PartialEq)]
pub struct CurveSet {
    pub curves: Vec<Curve>,
    pub scan_grid: usize,
}

impl CurveSet {
    /// Columns `curve_id, t, p, q, s1, s2, abs_delta_p, abs_delta_q,
    /// tangent_norm`, with `p` and `q` reduced to `[0, 2π)`.
    pub fn write_csv<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(out, "curve_id,t,p,q,s1,s2,abs_delta_p,abs_delta_q,tangent_norm")?;
        for (id, c) in self.curves.iter().enumerate() {
            for i in 0..c.len() {
                writeln!(
                    out,
                    "{id},{:.12},{:.12},{:.12},{},{},{:.12},{:.12},{:.12}",
                    c.t[i],
                    c.p[i].rem_euclid(2.0 * PI),
                    c.q[i].rem_euclid(2.0 * PI),
                    c.s1[i],
                    c.s2[i],
                    c.abs_delta_p[i],
                    c.abs_delta_q[i],
                    c.tangent_norm[i]
                )?;
            }
        }
        Ok(())
    }
}

/// Gauss–Newton on the complex residual `β(v(p), v(q)) = 0` in `q`.
fn refine_q(field: &CoefficientField, p: f64, q0: f64) -> Result<f64> {
    let vp = field.eval(p, 0);
    let mut q = q0;
    for _ in 0..50 {
        let r = beta(&vp, &field.eval(q, 0));
        let dr = beta(&vp, &field.eval(q, 1));
        let den = dr.norm_sqr();
        if den == 0.0 {
            break;
        }
        let dq = -(dr.conj() * r).re / den;
        q += dq;
        if dq.abs() < 1e-15 * (1.0 + q.abs()) {
            break;
        }
    }
    if re_lagrangian(field, p, q) < 1e-10 {
        Ok(q)
    } else {
        Err(Error::RefinementFailed { p, q: q0 })
    }
}

fn re_lagrangian(field: &CoefficientField, p: f64, q: f64) -> f64 {
    -field.covariance(p, q).norm().ln()
}

fn slope(field: &CoefficientField, p: f64, q: f64) -> Result<f64> {
    let dp = field.delta(p)?.norm();
    let dq = field.delta(q)?.norm();
    Ok(field.parallel_sign(p, q)? * dp / dq)
}

/// Zeros of `|Δ|` put a multicritical point on the diagonal curve; any
/// multicritical point elsewhere needs one there as well.
fn check_multicritical(field: &CoefficientField, opts: &CurveOptions) -> Result<()> {
    let m = 8 * opts.scan_grid;
    let h = 2.0 * PI / m as f64;
    let trace = |p: f64| -> f64 { 2.0 * field.delta(p).map(|d| d.norm_sqr()).unwrap_or(0.0) };
    let vals: Vec<f64> = (0..m).map(|i| trace(i as f64 * h)).collect();
    for i in 0..m {
        let (l, c, r) = (vals[(i + m - 1) % m], vals[i], vals[(i + 1) % m]);
        if c > l || c > r {
            continue;
        }
        let (mut a, mut b) = ((i as f64 - 1.0) * h, (i as f64 + 1.0) * h);
        let g = 0.5 * (5f64.sqrt() - 1.0);
        for _ in 0..80 {
            let x1 = b - g * (b - a);
            let x2 = a + g * (b - a);
            if trace(x1) < trace(x2) {
                b = x2;
            } else {
                a = x1;
            }
        }
        let t = 0.5 * (a + b);
        let tr = trace(t);
        if tr < opts.multicritical_trace {
            return Err(Error::MulticriticalPoint { t: t.rem_euclid(2.0 * PI), trace: tr });
        }
    }
    Ok(())
}

/// Partners `q` of `p` found from local minima of `|β(v(p), v(q))|²` on a
/// grid in `q`, each refined to parallelism.
fn partners(field: &CoefficientField, p: f64, grid: usize) -> Vec<f64> {
    let vp = field.eval(p, 0);
    let h = 2.0 * PI / grid as f64;
    let g: Vec<f64> = (0..grid).map(|j| beta(&vp, &field.eval(j as f64 * h, 0)).norm_sqr()).collect();
    let mut out: Vec<f64> = Vec::new();
    for j in 0..grid {
        if g[j] > g[(j + grid - 1) % grid] || g[j] > g[(j + 1) % grid] {
            continue;
        }
        if let Ok(q) = refine_q(field, p, j as f64 * h) {
            let q = q.rem_euclid(2.0 * PI);
            if !out.iter().any(|&x| torus_gap(x, q) < 1e-9) {
                out.push(q);
            }
        }
    }
    out
}

fn trace_curve(field: &CoefficientField, p0: f64, q0: f64, opts: &CurveOptions) -> Result<Curve> {
    let g = opts.scan_grid;
    let h = 2.0 * PI / g as f64;
    let mut ps = vec![p0];
    let mut qs = vec![q0];
    let (mut p, mut q) = (p0, q0);
    let mut windings = 0;
    for step in 1..=g * opts.max_windings {
        let k1 = slope(field, p, q)?;
        let k2 = slope(field, p + 0.5 * h, q + 0.5 * h * k1)?;
        let k3 = slope(field, p + 0.5 * h, q + 0.5 * h * k2)?;
        let k4 = slope(field, p + h, q + h * k3)?;
        let predicted = q + h * (k1 + 2.0 * k2 + 2.0 * k3 + k4) / 6.0;
        p = p0 + step as f64 * h;
        q = refine_q(field, p, predicted)?;
        if step % g == 0 && torus_gap(q, q0) < opts.closure_tol {
            windings = step / g;
            break;
        }
        ps.push(p);
        qs.push(q);
    }
    if windings == 0 {
        return Err(Error::NonClosure {
            p: p0,
            q: q0,
            reason: format!("no return to the start within {} periods", opts.max_windings),
        });
    }
    let m = ps.len();
    let mut curve = Curve {
        windings,
        t: (0..m).map(|i| 2.0 * PI * i as f64 / m as f64).collect(),
        p: ps,
        q: qs,
        s1: vec![1.0; m],
        s2: Vec::with_capacity(m),
        abs_delta_p: Vec::with_capacity(m),
        abs_delta_q: Vec::with_capacity(m),
        tangent_norm: Vec::with_capacity(m),
    };
    for i in 0..m {
        let (pi, qi) = (curve.p[i], curve.q[i]);
        ParallelPoint::new(field, pi, qi)?;
        let dp = field.delta(pi)?.norm();
        let dq = field.delta(qi)?.norm();
        let trace = dp * dp + dq * dq;
        if trace < opts.multicritical_trace {
            return Err(Error::MulticriticalPoint { t: curve.t[i], trace });
        }
        let s = field.parallel_sign(pi, qi)?;
        let sl = s * dp / dq;
        curve.s2.push(s);
        curve.abs_delta_p.push(dp);
        curve.abs_delta_q.push(dq);
        curve.tangent_norm.push(windings as f64 * (1.0 + sl * sl).sqrt());
    }
    Ok(curve)
}

/// Scans every grid row `p_i` for parallel partners, traces a curve from each
/// partner not yet covered, and returns the curves sorted by start point
/// (the diagonal first).
pub fn find_parallel_curves(field: &CoefficientField, opts: &CurveOptions) -> Result<CurveSet> {
    if !field.is_canonical() {
        return Err(Error::NotCanonical);
    }
    if opts.scan_grid < 128 {
        return Err(Error::InvalidArgument(format!(
            "scan grid must be at least 128, got {}",
            opts.scan_grid
        )));
    }
    check_multicritical(field, opts)?;
    let g = opts.scan_grid;
    let mut curves: Vec<Curve> = Vec::new();
    for i in 0..g {
        let p = 2.0 * PI * i as f64 / g as f64;
        for q in partners(field, p, g) {
            if curves.iter().any(|c| c.covers(p, q, opts.dedup_distance)) {
                continue;
            }
            let q_start = if torus_gap(p, q) < 1e-9 { p } else { q };
            curves.push(trace_curve(field, p, q_start, opts)?);
        }
    }
    curves.sort_by(|a, b| {
        let key = |c: &Curve| {
            let (p, q) = c.start();
            (p, (q - p).rem_euclid(2.0 * PI))
        };
        key(a).partial_cmp(&key(b)).expect("finite curve coordinates")
    });
    Ok(CurveSet { curves, scan_grid: g })
}
