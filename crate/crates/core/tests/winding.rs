use std::f64::consts::PI;

use chiral_winding::ensemble::{sample, Realization};
use chiral_winding::winding::{
    winding_number, winding_pencil, winding_root_count, winding_unwrap, LaurentStructure, Method,
};
use chiral_winding::{models, CoefficientField, Error};
use num_complex::Complex64;
use proptest::prelude::*;

fn all_methods(r: &Realization, f: &CoefficientField) -> [i64; 3] {
    [Method::PhaseUnwrap, Method::RootCount, Method::Pencil]
        .map(|m| winding_number(r, f, m).unwrap().w)
}

#[test]
fn plane_wave_winds_n_times() {
    let r = sample(16, 4);
    assert_eq!(all_methods(&r, &models::plane_wave()), [16; 3]);
}

#[test]
fn constant_field_has_zero_winding() {
    let r = sample(16, 4);
    assert_eq!(all_methods(&r, &models::constant()), [0; 3]);
}

#[test]
fn laurent_structure_uses_the_common_stride() {
    let t = LaurentStructure::of(&models::trig());
    assert_eq!((t.m_min, t.stride, t.steps), (-1, 2, 1));
    let f = LaurentStructure::of(&models::fig3());
    assert_eq!((f.m_min, f.stride, f.steps), (0, 1, 1));
    let c = LaurentStructure::of(&models::crossing());
    assert_eq!((c.m_min, c.stride, c.steps), (-2, 1, 4));
}

/// At n = 1, det K(s) = a(s) k₁ + b(s) k₂ is a scalar Laurent polynomial
/// whose zeros can be found directly.
#[test]
fn scalar_case_matches_direct_factoring() {
    let f = models::fig3();
    for seed in 0..30 {
        let r = sample(1, seed);
        let (k1, k2) = (r.k1[(0, 0)], r.k2[(0, 0)]);
        let c0 = f.a().coeff(0) * k1 + f.b().coeff(0) * k2;
        let c1 = f.a().coeff(1) * k1 + f.b().coeff(1) * k2;
        let root = -c0 / c1;
        let expected = if root.norm() < 1.0 { 1 } else { 0 };
        assert_eq!(all_methods(&r, &f), [expected; 3], "seed {seed}");
    }
}

#[test]
fn methods_agree_on_the_reference_models() {
    for f in [models::trig(), models::fig3(), models::crossing()] {
        for seed in 0..20 {
            let r = sample(8, 1000 + seed);
            let w = all_methods(&r, &f);
            assert!(w[0] == w[1] && w[1] == w[2], "{w:?}");
        }
    }
}

#[test]
fn trig_winding_has_the_parity_of_n() {
    for seed in 0..10 {
        let w = winding_number(&sample(7, seed), &models::trig(), Method::Pencil).unwrap().w;
        assert_eq!(w.rem_euclid(2), 1);
    }
}

/// This realization has a zero of `det K` just off the circle, between two
/// points of the default grid.
#[test]
fn zero_near_the_circle_is_not_skipped() {
    let r = sample(64, chiral_winding::ensemble::derive_seed(5, 83));
    assert_eq!(all_methods(&r, &models::fig3()), [34; 3]);
}

#[test]
fn unwrap_reports_its_work() {
    let r = sample(8, 2);
    let res = winding_unwrap(&r, &models::fig3(), 64, 30).unwrap();
    assert_eq!(res.method, Method::PhaseUnwrap);
    assert!(res.grid_points_used >= 64);
    assert!(matches!(winding_unwrap(&r, &models::fig3(), 10, 30), Err(Error::InvalidArgument(_))));
}

#[test]
fn gauged_field_is_refused() {
    let f = models::fig3().canonicalize(4096).unwrap();
    let r = sample(4, 0);
    assert!(matches!(winding_unwrap(&r, &f, 256, 30), Err(Error::NonPeriodicField)));
    assert!(matches!(winding_root_count(&r, &f), Err(Error::NonPeriodicField)));
    assert!(matches!(winding_pencil(&r, &f), Err(Error::NonPeriodicField)));
}

#[test]
fn periodic_canonical_field_keeps_the_raw_winding() {
    let raw = models::plane_wave();
    let canonical = raw.canonicalize(1024).unwrap();
    let r = sample(6, 3);
    // The centering gauge removes e^{ip}: det of the gauged K has zero winding.
    assert_eq!(winding_unwrap(&r, &canonical, 256, 30).unwrap().w, 0);
    assert_eq!(winding_root_count(&r, &canonical).unwrap().w, 0);
    assert_eq!(winding_pencil(&r, &canonical).unwrap().w, 0);
    assert_eq!(winding_pencil(&r, &raw).unwrap().w, 6);
}

#[test]
fn method_names_parse() {
    assert_eq!("unwrap".parse::<Method>().unwrap(), Method::PhaseUnwrap);
    assert_eq!("roots".parse::<Method>().unwrap(), Method::RootCount);
    assert_eq!("pencil".parse::<Method>().unwrap(), Method::Pencil);
    assert!("newton".parse::<Method>().is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn common_prefactor_leaves_w_unchanged(seed in 0u64..10_000, mag in 0.1f64..10.0, arg in 0.0f64..6.28) {
        let f = models::fig3();
        let r = sample(6, seed);
        let z = Complex64::from_polar(mag, arg);
        let scaled = Realization { k1: r.k1.map(|x| x * z), k2: r.k2.map(|x| x * z), ..r.clone() };
        prop_assert_eq!(all_methods(&r, &f), all_methods(&scaled, &f));
    }

    #[test]
    fn unwrap_and_root_count_agree(seed in 0u64..10_000, n in 1usize..12) {
        let r = sample(n, seed);
        for f in [models::trig(), models::fig3()] {
            let a = winding_number(&r, &f, Method::PhaseUnwrap).unwrap().w;
            let b = winding_number(&r, &f, Method::RootCount).unwrap().w;
            prop_assert_eq!(a, b);
        }
    }

    #[test]
    fn shift_of_parameter_leaves_w_unchanged(seed in 0u64..10_000, shift in 0.0f64..(2.0 * PI)) {
        // v(p + c) has the same winding as v(p).
        let f = models::fig3();
        let shifted = CoefficientField::from_terms(
            &[(0, f.a().coeff(0)), (1, f.a().coeff(1) * Complex64::from_polar(1.0, shift))],
            &[(0, f.b().coeff(0)), (1, f.b().coeff(1) * Complex64::from_polar(1.0, shift))],
        ).unwrap();
        let r = sample(5, seed);
        prop_assert_eq!(all_methods(&r, &f), all_methods(&r, &shifted));
    }
}
