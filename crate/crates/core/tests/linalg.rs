use std::f64::consts::PI;

use chiral_winding::linalg::{eigenvalues, small_condition, wrap_angle, CMatrix, Lu};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};

fn random_matrix(n: usize, seed: u64) -> CMatrix {
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    CMatrix::from_fn(n, n, |_, _| {
        Complex64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5)
    })
}

#[test]
fn lu_solve_recovers_rhs() {
    let a = random_matrix(12, 3);
    let b = random_matrix(12, 4);
    let x = Lu::new(a.clone()).solve(&b);
    let r = &a * &x - &b;
    assert!(r.iter().all(|z| z.norm() < 1e-11));
}

#[test]
fn log_det_matches_nalgebra() {
    let a = random_matrix(9, 5);
    let ld = Lu::new(a.clone()).log_det();
    let d = a.determinant();
    assert!((ld.value() - d).norm() < 1e-10 * d.norm());
}

#[test]
fn log_det_survives_overflowing_determinants() {
    let a = random_matrix(300, 6) * Complex64::new(1e6, 0.0);
    let ld = Lu::new(a.clone()).log_det();
    assert!(ld.ln_abs.is_finite() && ld.ln_abs > 709.0);
}

#[test]
fn condition_estimate_is_close_to_exact() {
    for seed in 0..5 {
        let a = random_matrix(10, 100 + seed);
        let exact = small_condition(&a);
        let est = Lu::new(a).condition_estimate();
        assert!(est <= exact * (1.0 + 1e-10) && est >= exact / 10.0, "{est} vs {exact}");
    }
}

#[test]
fn singular_matrix_reports_infinite_condition() {
    let mut a = random_matrix(4, 9);
    for i in 0..4 {
        a[(i, 3)] = a[(i, 0)];
    }
    let lu = Lu::new(a);
    assert!(lu.condition_estimate() > 1e12);
}

#[test]
fn eigenvalues_of_triangular() {
    let mut a = CMatrix::zeros(3, 3);
    a[(0, 0)] = Complex64::new(1.0, 1.0);
    a[(1, 1)] = Complex64::new(-2.0, 0.0);
    a[(2, 2)] = Complex64::new(0.0, 0.5);
    a[(0, 2)] = Complex64::new(3.0, 0.0);
    let mut ev = eigenvalues(a).unwrap();
    ev.sort_by(|x, y| x.re.partial_cmp(&y.re).unwrap());
    assert!((ev[0] - Complex64::new(-2.0, 0.0)).norm() < 1e-12);
    assert!((ev[2] - Complex64::new(1.0, 1.0)).norm() < 1e-12);
}

#[test]
fn wrap_angle_range() {
    assert!((wrap_angle(3.0 * PI) - PI).abs() < 1e-12);
    assert!((wrap_angle(-PI) - PI).abs() < 1e-12);
    assert!((wrap_angle(0.5) - 0.5).abs() < 1e-15);
}
