//! Dense complex kernels: LU with partial pivoting, log-determinants that do
//! not overflow at large N, a Hager-style 1-norm condition estimate and
//! eigenvalues through nalgebra's Schur decomposition.

use nalgebra::DMatrix;
use num_complex::Complex64;
use std::f64::consts::PI;

use crate::error::{Error, Result};

pub type CMatrix = DMatrix<Complex64>;

/// `P A = L U` with unit lower `L`; `perm[i]` is the row of `A` moved to row `i`.
#[derive(Clone, Debug)]
pub struct Lu {
    lu: CMatrix,
    perm: Vec<usize>,
    swaps: usize,
    norm1: f64,
}

/// `det = exp(ln_abs) * exp(i * phase)`, phase in (-π, π].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LogDet {
    pub ln_abs: f64,
    pub phase: f64,
}

impl LogDet {
    pub fn value(&self) -> Complex64 {
        Complex64::from_polar(self.ln_abs.exp(), self.phase)
    }
}

pub fn wrap_angle(x: f64) -> f64 {
    let y = (x + PI).rem_euclid(2.0 * PI) - PI;
    if y <= -PI {
        y + 2.0 * PI
    } else {
        y
    }
}

pub fn norm1(m: &CMatrix) -> f64 {
    m.column_iter()
        .map(|c| c.iter().map(|z| z.norm()).sum::<f64>())
        .fold(0.0, f64::max)
}

impl Lu {
    pub fn new(mut a: CMatrix) -> Lu {
        assert!(a.is_square(), "LU of a non-square matrix");
        let n = a.nrows();
        let norm1 = norm1(&a);
        let mut perm: Vec<usize> = (0..n).collect();
        let mut swaps = 0;
        for k in 0..n {
            let mut piv = k;
            let mut best = a[(k, k)].norm_sqr();
            for i in k + 1..n {
                let v = a[(i, k)].norm_sqr();
                if v > best {
                    best = v;
                    piv = i;
                }
            }
            if piv != k {
                a.swap_rows(k, piv);
                perm.swap(k, piv);
                swaps += 1;
            }
            let d = a[(k, k)];
            if d == Complex64::new(0.0, 0.0) {
                continue;
            }
            let inv = d.inv();
            for i in k + 1..n {
                a[(i, k)] *= inv;
            }
            for j in k + 1..n {
                let akj = a[(k, j)];
                if akj == Complex64::new(0.0, 0.0) {
                    continue;
                }
                let (left, mut right) = a.columns_range_pair_mut(k, j);
                let lcol = left.as_slice();
                let rcol = right.as_mut_slice();
                for i in k + 1..n {
                    rcol[i] -= lcol[i] * akj;
                }
            }
        }
        Lu { lu: a, perm, swaps, norm1 }
    }

    pub fn dim(&self) -> usize {
        self.lu.nrows()
    }

    pub fn is_singular(&self) -> bool {
        (0..self.dim()).any(|i| self.lu[(i, i)] == Complex64::new(0.0, 0.0))
    }

    /// Log-determinant accumulated from the diagonal of `U`.
    pub fn log_det(&self) -> LogDet {
        let mut ln_abs = 0.0;
        let mut phase = if self.swaps % 2 == 1 { PI } else { 0.0 };
        for i in 0..self.dim() {
            let d = self.lu[(i, i)];
            ln_abs += d.norm().ln();
            phase += d.arg();
        }
        LogDet { ln_abs, phase: wrap_angle(phase) }
    }

    pub fn det(&self) -> Complex64 {
        let sign = if self.swaps % 2 == 1 { -1.0 } else { 1.0 };
        (0..self.dim()).fold(Complex64::new(sign, 0.0), |acc, i| acc * self.lu[(i, i)])
    }

    /// Solves `A X = B` in place, column by column.
    pub fn solve_in_place(&self, b: &mut CMatrix) {
        let n = self.dim();
        assert_eq!(b.nrows(), n);
        let mut tmp = vec![Complex64::new(0.0, 0.0); n];
        for mut col in b.column_iter_mut() {
            for i in 0..n {
                tmp[i] = col[self.perm[i]];
            }
            for j in 0..n {
                let x = tmp[j];
                if x == Complex64::new(0.0, 0.0) {
                    continue;
                }
                let lcol = self.lu.column(j);
                for i in j + 1..n {
                    tmp[i] -= lcol[i] * x;
                }
            }
            for j in (0..n).rev() {
                tmp[j] /= self.lu[(j, j)];
                let x = tmp[j];
                let ucol = self.lu.column(j);
                for i in 0..j {
                    tmp[i] -= ucol[i] * x;
                }
            }
            for i in 0..n {
                col[i] = tmp[i];
            }
        }
    }

    pub fn solve(&self, b: &CMatrix) -> CMatrix {
        let mut x = b.clone();
        self.solve_in_place(&mut x);
        x
    }

    fn solve_vec(&self, b: &[Complex64]) -> Vec<Complex64> {
        let mut m = CMatrix::from_column_slice(b.len(), 1, b);
        self.solve_in_place(&mut m);
        m.as_slice().to_vec()
    }

    /// Solves `A^H z = c`.
    fn solve_adjoint_vec(&self, c: &[Complex64]) -> Vec<Complex64> {
        let n = self.dim();
        let mut w = c.to_vec();
        // U^H w' = c (lower triangular)
        for i in 0..n {
            let mut s = w[i];
            for j in 0..i {
                s -= self.lu[(j, i)].conj() * w[j];
            }
            w[i] = s / self.lu[(i, i)].conj();
        }
        // L^H u = w' (unit upper triangular)
        for i in (0..n).rev() {
            let mut s = w[i];
            for j in i + 1..n {
                s -= self.lu[(j, i)].conj() * w[j];
            }
            w[i] = s;
        }
        let mut z = vec![Complex64::new(0.0, 0.0); n];
        for i in 0..n {
            z[self.perm[i]] = w[i];
        }
        z
    }

    /// Estimate of `||A^{-1}||_1` (Hager/Higham power iteration on the dual norm).
    pub fn inverse_norm1_estimate(&self) -> f64 {
        let n = self.dim();
        if n == 0 {
            return 0.0;
        }
        if self.is_singular() {
            return f64::INFINITY;
        }
        let mut x = vec![Complex64::new(1.0 / n as f64, 0.0); n];
        let mut est = 0.0;
        let mut last_j = usize::MAX;
        for _ in 0..5 {
            let y = self.solve_vec(&x);
            let new_est: f64 = y.iter().map(|z| z.norm()).sum();
            if !new_est.is_finite() {
                return f64::INFINITY;
            }
            if new_est <= est {
                break;
            }
            est = new_est;
            let xi: Vec<Complex64> = y
                .iter()
                .map(|z| {
                    let r = z.norm();
                    if r > 0.0 {
                        z / r
                    } else {
                        Complex64::new(1.0, 0.0)
                    }
                })
                .collect();
            let z = self.solve_adjoint_vec(&xi);
            let (j, zmax) = z
                .iter()
                .enumerate()
                .map(|(i, v)| (i, v.norm()))
                .fold((0, -1.0), |a, b| if b.1 > a.1 { b } else { a });
            let ztx: f64 = z.iter().zip(&x).map(|(a, b)| (a.conj() * b).re).sum();
            if zmax <= ztx || j == last_j {
                break;
            }
            last_j = j;
            x = vec![Complex64::new(0.0, 0.0); n];
            x[j] = Complex64::new(1.0, 0.0);
        }
        est
    }

    /// 1-norm condition estimate `||A||_1 ||A^{-1}||_1`.
    pub fn condition_estimate(&self) -> f64 {
        self.norm1 * self.inverse_norm1_estimate()
    }
}

/// Eigenvalues of a general complex matrix.
pub fn eigenvalues(m: CMatrix) -> Result<Vec<Complex64>> {
    if m.nrows() == 0 {
        return Ok(Vec::new());
    }
    let schur = nalgebra::linalg::Schur::try_new(m, f64::EPSILON, 0).ok_or(Error::EigenFailure)?;
    let ev = schur.eigenvalues().ok_or(Error::EigenFailure)?;
    Ok(ev.iter().copied().collect())
}

/// Determinant of a small dense matrix by LU.
pub fn small_det(m: &CMatrix) -> Complex64 {
    match m.nrows() {
        0 => Complex64::new(1.0, 0.0),
        1 => m[(0, 0)],
        2 => m[(0, 0)] * m[(1, 1)] - m[(0, 1)] * m[(1, 0)],
        _ => Lu::new(m.clone()).det(),
    }
}

/// Condition number in the 1-norm via the explicit inverse; only for small k.
pub fn small_condition(m: &CMatrix) -> f64 {
    match m.clone().try_inverse() {
        Some(inv) => norm1(m) * norm1(&inv),
        None => f64::INFINITY,
    }
}
