use std::f64::consts::PI;

use crate::quadrature::GaussLegendre;

/// Phase `φ(p) = ∫₀ᵖ Im(v†v′)/‖v‖² dq` tabulated on a uniform grid over one
/// period. The centering factor is `f(p) = exp(-iφ(p)) / ‖v(p)‖`.
#[derive(Clone, Debug, PartialEq)]
pub struct GaugeTable {
    step: f64,
    phase: Vec<f64>,
    slope: Vec<f64>,
}

impl GaugeTable {
    /// `rate` is `φ′`, evaluated at grid points and quadrature nodes.
    pub(crate) fn build<F: Fn(f64) -> f64>(grid_size: usize, rate: F) -> GaugeTable {
        let rule = GaussLegendre::new(8);
        let step = 2.0 * PI / grid_size as f64;
        let mut phase = Vec::with_capacity(grid_size + 1);
        let mut slope = Vec::with_capacity(grid_size + 1);
        let mut acc = 0.0;
        for i in 0..=grid_size {
            let p = i as f64 * step;
            if i > 0 {
                acc += rule.integrate(p - step, p, &rate);
            }
            phase.push(acc);
            slope.push(rate(p));
        }
        GaugeTable { step, phase, slope }
    }

    pub fn grid_size(&self) -> usize {
        self.phase.len() - 1
    }

    /// `φ(2π)`; the Berry phase is `exp(-i φ(2π))`.
    pub fn total(&self) -> f64 {
        self.phase[self.phase.len() - 1]
    }

    /// Cubic Hermite interpolation, continued to all of ℝ by
    /// `φ(p + 2π) = φ(p) + φ(2π)`.
    pub fn phase_at(&self, p: f64) -> f64 {
        let period = 2.0 * PI;
        let turns = (p / period).floor();
        let r = p - turns * period;
        let n = self.grid_size();
        let x = r / self.step;
        let i = (x.floor() as usize).min(n - 1);
        let u = x - i as f64;
        let (y0, y1) = (self.phase[i], self.phase[i + 1]);
        let (m0, m1) = (self.slope[i] * self.step, self.slope[i + 1] * self.step);
        let u2 = u * u;
        let u3 = u2 * u;
        let h00 = 2.0 * u3 - 3.0 * u2 + 1.0;
        let h10 = u3 - 2.0 * u2 + u;
        let h01 = -2.0 * u3 + 3.0 * u2;
        let h11 = u3 - u2;
        turns * self.total() + h00 * y0 + h10 * m0 + h01 * y1 + h11 * m1
    }
}
