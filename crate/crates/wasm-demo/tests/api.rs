use dynrm_wasm::api::{catalogue_json, perturbation_scan, rmatrix_curve, run_suite_json, theta_curve, ENTRIES};

#[test]
fn theta_is_odd_and_periodic_up_to_sign() {
    let v = theta_curve("elliptic", 0.8, 0.0, -1.0, 1.0, 201).unwrap();
    assert_eq!(v.len(), 3 * 201);
    let at = |k: usize| (v[3 * k + 1], v[3 * k + 2]);
    assert!(at(100).0.abs() < 1e-14 && at(100).1.abs() < 1e-14);
    for k in 0..=100 {
        let (a, b) = (at(100 + k), at(100 - k));
        assert!((a.0 + b.0).abs() < 1e-12 && (a.1 + b.1).abs() < 1e-12);
    }
    // θ(u + 1) = -θ(u)
    let (a, b) = (at(0), at(200));
    assert!((a.0 + b.0).abs() < 1e-12, "{a:?} {b:?}");
    let s = theta_curve("trig", 0.8, 0.0, 0.0, 1.0, 3).unwrap();
    assert!((s[4] - 0.5f64.sin()).abs() < 1e-15);
}

#[test]
fn rational_entries_along_a_line() {
    let rows = rmatrix_curve("rational", 0.5, 0.8, 0.23, 0.3, 0.5, 2.5, 5).unwrap();
    assert_eq!(rows.len(), 5 * (1 + ENTRIES.len()));
    for r in rows.chunks(6) {
        assert!(r[1..].iter().all(|x| x.is_finite()), "{r:?}");
    }
    let elliptic = rmatrix_curve("elliptic", 0.5, 0.8, 0.23, 0.3, -2.0, 2.0, 41).unwrap();
    assert!(elliptic.chunks(6).any(|r| r[1..].iter().all(|x| x.is_finite())));
    assert!(rmatrix_curve("bogus", 0.5, 0.8, 0.23, 0.3, 0.0, 1.0, 3).is_err());
    assert!(rmatrix_curve("rational", 0.5, 0.8, 0.23, 0.3, 0.0, 1.0, 1).is_err());
}

#[test]
fn suites_from_json_params() {
    let rep: serde_json::Value =
        serde_json::from_str(&run_suite_json("qdybe", r#"{"family":"trig","n":2}"#, 5, 3, f64::NAN).unwrap()).unwrap();
    assert_eq!(rep["pass"], true);
    assert_eq!(rep["params"]["n"], "2");
    assert_eq!(rep["samples"], 5);
    assert!(run_suite_json("nope", "", 0, 1, f64::NAN).is_err());
    assert!(run_suite_json("qdybe", "[1]", 0, 1, f64::NAN).is_err());
    let cat: Vec<serde_json::Value> = serde_json::from_str(&catalogue_json()).unwrap();
    assert!(cat.len() >= 14);
}

#[test]
fn residual_grows_with_perturbation() {
    let r = perturbation_scan("qdybe", r#"{"n":"2"}"#, &[0.0, 1e-6, 1e-3], 5, 1).unwrap();
    assert!(r[0] < 1e-10 && r[1] > r[0] && r[2] > r[1], "{r:?}");
}
