use chiral_winding::analytic::corr_2;
use chiral_winding::stats::{
    compare, histogram, mc_corr, mc_winding_moments, write_histogram_csv, write_json, Artifact,
    CorrelatorEstimate, Estimate, McOptions, MomentReport, Prediction, PredictionKind, SCHEMA_VERSION,
};
use chiral_winding::winding::Method;
use chiral_winding::{models, Error, DEFAULT_GAUGE_GRID};
use num_complex::Complex64;

fn small_run(workers: usize) -> MomentReport {
    let opts = McOptions { workers, bootstrap_resamples: 200, i2: Some(1.128), ..McOptions::default() };
    mc_winding_moments(&models::trig(), 6, 200, 2024, &opts).unwrap()
}

#[test]
fn moments_are_deterministic() {
    assert_eq!(small_run(1), small_run(1));
}

#[test]
fn worker_count_does_not_change_results() {
    let one = serde_json::to_string(&small_run(1)).unwrap();
    for w in [2, 8] {
        assert_eq!(one, serde_json::to_string(&small_run(w)).unwrap(), "workers = {w}");
    }
}

#[test]
fn report_layout() {
    let r = small_run(1);
    assert_eq!(r.windings.len() + r.excluded, 200);
    assert_eq!(r.central_moments.iter().map(|m| m.order).collect::<Vec<_>>(), vec![1, 2, 3, 4, 5, 6]);
    assert_eq!(r.predicted.len(), 6);
    assert!(r.windings.iter().all(|w| w.rem_euclid(2) == 0));
    // Trig winds zero times on average.
    assert!(r.mean().abs() < 4.0 * r.central_moments[0].std_error + 1e-12);
    assert!(r.moment(2).unwrap().std_error > 0.0);
    assert_eq!(r.method, Method::Pencil);
}

#[test]
fn invalid_runs_are_refused() {
    let opts = McOptions { i2: Some(1.0), ..McOptions::default() };
    assert!(matches!(mc_winding_moments(&models::trig(), 4, 1, 0, &opts), Err(Error::InvalidArgument(_))));
    assert!(matches!(mc_winding_moments(&models::trig(), 0, 10, 0, &opts), Err(Error::InvalidArgument(_))));
    let opts = McOptions { workers: 0, ..opts };
    assert!(mc_winding_moments(&models::trig(), 4, 10, 0, &opts).is_err());
}

fn exact_prediction(r: &MomentReport) -> Prediction {
    Prediction {
        n: r.n,
        model_hash: r.model_hash.clone(),
        kind: PredictionKind::Moments { i2: r.i2, mean: r.mean() },
    }
}

#[test]
fn compare_exact_match_passes_with_zero_z() {
    let mut r = small_run(1);
    let i2 = r.i2;
    for m in r.central_moments.iter_mut().skip(1) {
        m.value = chiral_winding::analytic::predict_moments(r.n as u64, m.order, i2).leading_value;
    }
    r.skewness.value = 0.0;
    r.kurtosis.value = 3.0;
    let c = compare(Estimate::Moments(&r), &exact_prediction(&r)).unwrap();
    assert!(c.pass);
    assert!(c.verdicts.iter().all(|v| v.z == 0.0));
}

#[test]
fn compare_flags_a_five_sigma_mean() {
    let r = small_run(1);
    let mut pred = exact_prediction(&r);
    let se = r.central_moments[0].std_error;
    pred.kind = PredictionKind::Moments { i2: r.i2, mean: r.mean() + 5.0 * se };
    let c = compare(Estimate::Moments(&r), &pred).unwrap();
    assert!(!c.pass);
    let mean = c.verdicts.iter().find(|v| v.quantity == "mean").unwrap();
    assert!(!mean.pass && (mean.z + 5.0).abs() < 1e-9);
}

#[test]
fn compare_rejects_mismatched_configs() {
    let r = small_run(1);
    let mut pred = exact_prediction(&r);
    pred.n += 1;
    assert!(matches!(compare(Estimate::Moments(&r), &pred), Err(Error::MismatchedConfig(_))));
    let mut pred = exact_prediction(&r);
    pred.model_hash = "0".into();
    assert!(matches!(compare(Estimate::Moments(&r), &pred), Err(Error::MismatchedConfig(_))));
    let c = CorrelatorEstimate {
        n: r.n,
        model_hash: r.model_hash.clone(),
        points: vec![0.1],
        k: 1,
        estimate: Complex64::new(0.0, 0.0),
        std_error: 1.0,
        samples: 10,
        excluded: 0,
    };
    assert!(matches!(compare(Estimate::Correlator(&c), &exact_prediction(&r)), Err(Error::MismatchedConfig(_))));
}

#[test]
fn histogram_bins_are_unit_width_and_complete() {
    let bins = histogram(&[-2, 0, 0, 3], 0.25, 16, 1.0);
    assert_eq!(bins.len(), 6);
    assert_eq!(bins[0].bin_left, -2.5);
    assert_eq!(bins[5].bin_right, 3.5);
    assert_eq!(bins.iter().map(|b| b.count).sum::<usize>(), 4);
    assert_eq!(bins[2].count, 2);
    let mut buf = Vec::new();
    write_histogram_csv(&mut buf, &bins).unwrap();
    let text = String::from_utf8(buf).unwrap();
    assert!(text.starts_with("bin_left,bin_right,count,gaussian_pdf_value\n"));
    assert_eq!(text.lines().count(), 7);
    assert!(histogram(&[], 0.0, 4, 1.0).is_empty());
}

#[test]
fn json_artifact_carries_schema_and_run_metadata() {
    let r = small_run(1);
    let config = serde_json::json!({ "n": 6, "seed": 2024 });
    let mut buf = Vec::new();
    write_json(&mut buf, "mc_moments", &config, &r.model_hash, &r).unwrap();
    let back: Artifact<MomentReport> = serde_json::from_slice(&buf).unwrap();
    assert_eq!(back.schema_version, SCHEMA_VERSION);
    assert_eq!(back.kind, "mc_moments");
    assert_eq!(back.config, config);
    assert_eq!(back.model_hash, r.model_hash);
    assert_eq!(back.payload, r);
}

#[test]
fn one_point_density_averages_to_zero() {
    let f = models::trig().canonicalize(DEFAULT_GAUGE_GRID).unwrap();
    let c = mc_corr(&f, 4, &[0.7], 4000, 5, 1).unwrap();
    assert!(c.estimate.norm() < 4.0 * c.std_error, "{} ± {}", c.estimate, c.std_error);
}

#[test]
fn two_point_density_matches_closed_form() {
    let f = models::trig().canonicalize(DEFAULT_GAUGE_GRID).unwrap();
    let pts = [0.2, 1.3];
    let exact = corr_2(&f, 4, pts[0], pts[1]).unwrap();
    let c = mc_corr(&f, 4, &pts, 20_000, 9, 2).unwrap();
    assert!((c.estimate - exact).norm() < 4.0 * c.std_error, "{} vs {exact} ± {}", c.estimate, c.std_error);
    let pred = Prediction {
        n: 4,
        model_hash: f.model_hash(),
        kind: PredictionKind::Correlator { points: pts.to_vec(), value: exact },
    };
    let cmp = compare(Estimate::Correlator(&c), &pred).unwrap();
    assert_eq!(cmp.verdicts.len(), 1);
}

#[test]
fn correlator_order_is_limited() {
    let f = models::trig().canonicalize(DEFAULT_GAUGE_GRID).unwrap();
    assert!(mc_corr(&f, 4, &[0.1, 0.2, 0.3, 0.4, 0.5], 10, 0, 1).is_err());
    assert!(mc_corr(&f, 4, &[], 10, 0, 1).is_err());
}
