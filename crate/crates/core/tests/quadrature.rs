use std::f64::consts::PI;

use chiral_winding::quadrature::GaussLegendre;

#[test]
fn weights_sum_to_two() {
    for n in [1, 2, 5, 8, 16] {
        let gl = GaussLegendre::new(n);
        assert!((gl.weights.iter().sum::<f64>() - 2.0).abs() < 1e-13);
    }
}

#[test]
fn exact_for_polynomials_up_to_degree_2n_minus_1() {
    let gl = GaussLegendre::new(4);
    let v = gl.integrate(0.0, 2.0, |x| x.powi(7) - 3.0 * x.powi(2));
    assert!((v - (2f64.powi(8) / 8.0 - 8.0)).abs() < 1e-12);
}

#[test]
fn composite_integrates_trig() {
    let gl = GaussLegendre::new(8);
    let v = gl.integrate_composite(0.0, PI, 16, |x| x.sin());
    assert!((v - 2.0).abs() < 1e-14);
}
