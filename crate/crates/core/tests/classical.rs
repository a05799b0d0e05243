use dynrm::liealg::{
    cdybe_residual, cdybe_residual_with, cdybe_spectral_residual, classical_elliptic, classical_limit,
    classical_rational, classical_sample_config, classical_trig, classical_wave, coupling_constant,
    coupling_constant_spectral, residue_at_zero, ClassicalDynOperator, Derivative, LimitFamily,
};
use dynrm::specfun::{EllipticParams, WaveKind};
use dynrm::{DynError, C64};

fn c(x: f64) -> C64 {
    C64::new(x, 0.0)
}

fn tau() -> EllipticParams {
    EllipticParams::new(C64::new(0.0, 0.8)).unwrap()
}

#[test]
fn rational_and_trig_solve_cdybe() {
    for n in [2, 3, 4] {
        let cfg = classical_sample_config(8, 3, 1e-7);
        let r = cdybe_residual(&classical_rational(n).unwrap(), &cfg, Derivative::Fd).unwrap();
        assert!(r.pass, "rational n={n}: {}", r.residual_max);
        let a = cdybe_residual_with(&classical_rational(n).unwrap(), &cfg, Derivative::Analytic, Some(n)).unwrap();
        assert!(a.residual_max < 1e-12, "analytic n={n}: {}", a.residual_max);
        let t = cdybe_residual(&classical_trig(n).unwrap(), &cfg, Derivative::Fd).unwrap();
        assert!(t.pass, "trig n={n}: {}", t.residual_max);
    }
}

#[test]
fn elliptic_solves_spectral_cdybe() {
    for n in [2, 3] {
        let cfg = classical_sample_config(5, 17, 1e-6);
        let r = cdybe_spectral_residual(&classical_elliptic(n, tau()).unwrap(), &cfg).unwrap();
        assert!(r.pass, "elliptic n={n}: {}", r.residual_max);
        for kind in [WaveKind::Trig, WaveKind::Rational] {
            let d = cdybe_spectral_residual(&classical_wave(kind, n, None).unwrap(), &cfg).unwrap();
            assert!(d.pass, "{kind:?} n={n}: {}", d.residual_max);
        }
    }
}

#[test]
fn scaled_rational_fails_cdybe() {
    let base = classical_rational(3).unwrap();
    let inner = base.clone();
    let bad = ClassicalDynOperator::from_eval("scaled", base.data.clone(), false, move |u, l| {
        Ok(inner.eval(u, l)?.scale(&c(2.0)))
    })
    .with_poles(base.poles.clone(), Vec::new());
    let r = cdybe_residual(&bad, &classical_sample_config(4, 1, 1e-7), Derivative::Fd).unwrap();
    assert!(r.residual_max > 1e-3);
}

#[test]
fn coupling_constants() {
    let cfg = classical_sample_config(6, 2, 0.0);
    let rat = coupling_constant(&classical_rational(3).unwrap(), &cfg).unwrap();
    assert!(rat.epsilon.norm() < 1e-12);
    let trig = coupling_constant(&classical_trig(3).unwrap(), &cfg).unwrap();
    assert!((trig.epsilon - c(1.0)).norm() < 1e-12);
    let ell = coupling_constant_spectral(&classical_elliptic(3, tau()).unwrap(), C64::new(0.37, 0.05), &cfg).unwrap();
    assert!(ell.epsilon.norm() < 1e-10);
    let ell_plain = classical_elliptic(2, tau()).unwrap();
    let fixed = ClassicalDynOperator::from_eval("fixed-u", ell_plain.data.clone(), false, move |_, l| {
        ell_plain.eval(C64::new(0.37, 0.05), l)
    })
    .with_poles(classical_elliptic(2, tau()).unwrap().poles, Vec::new());
    assert!(matches!(
        coupling_constant(&fixed, &cfg),
        Err(DynError::NoCertificate(_))
    ));
}

#[test]
fn elliptic_residue_is_omega() {
    let r = classical_elliptic(3, tau()).unwrap();
    let est = residue_at_zero(&r, &[c(0.31), c(-0.12), c(-0.19)], 1e-3, 5e-4).unwrap();
    assert!(est.defect < 1e-5, "{}", est.defect);
    assert!((est.epsilon - c(1.0)).norm() < 1e-5);
}

#[test]
fn classical_limits() {
    let hbar = [1e-2, 5e-3, 2.5e-3];
    let lam = [c(0.7), c(-0.2), c(-0.5)];
    let rat = classical_limit(LimitFamily::Rational, 3, &lam, &hbar).unwrap();
    assert!(rat.errors.iter().all(|e| *e < 1e-10), "{:?}", rat.errors);
    let trig = classical_limit(LimitFamily::Trig, 3, &lam, &hbar).unwrap();
    assert!(trig.order >= 0.9, "{:?}", trig.orders);
    assert!(trig.errors[2] < 1e-2);
    let ell = classical_limit(
        LimitFamily::Elliptic {
            p: tau(),
            u: C64::new(0.3, 0.05),
        },
        2,
        &[c(0.4), c(-0.4)],
        &hbar,
    )
    .unwrap();
    assert!(ell.order >= 0.9, "{:?}", ell.orders);
    assert!(ell.extrapolated_error < 1e-3, "{}", ell.extrapolated_error);
}
