use dynrm::rmatrix::{
    assemble_plain, basic_elliptic, basic_rational, basic_trigonometric, exchange_closed_form,
    exchange_closed_form_table, spectral_degenerate,
};
use dynrm::specfun::{EllipticParams, WaveKind};
use dynrm::tensorcore::SpectralDynamicalOperator;
use dynrm::verify::{
    hecke_check, qdybe_residual, qdybe_spectral_residual, rll_residual, tensor_rep, trivial_rep, unitarity_check,
    weight_defect_sampled, SampleConfig,
};
use dynrm::{Matrix, C64};

fn c(x: f64) -> C64 {
    C64::new(x, 0.0)
}

fn tau() -> EllipticParams {
    EllipticParams::new(C64::new(0.0, 0.8)).unwrap()
}

#[test]
fn rational_and_trig_solve_qdybe() {
    for n in [2, 3] {
        let cfg = SampleConfig::new(20, 7, 1e-10);
        let r = qdybe_residual(&basic_rational(n).unwrap(), c(1.0), &cfg).unwrap();
        assert!(r.pass, "rational n={n}: {}", r.residual_max);
        let t = qdybe_residual(&basic_trigonometric(n, c(0.5)).unwrap(), c(1.0), &cfg).unwrap();
        assert!(t.pass, "trig n={n}: {}", t.residual_max);
    }
}

#[test]
fn perturbed_rational_fails_qdybe() {
    let base = basic_rational(2).unwrap();
    let inner = base.clone();
    let bad = base.with_eval("perturbed", move |l| {
        let mut m = inner.eval(l)?;
        m[(1, 2)] += 0.1;
        Ok(m)
    });
    let r = qdybe_residual(&bad, c(1.0), &SampleConfig::new(5, 3, 1e-10)).unwrap();
    assert!(r.residual_max > 1e-3);
}

#[test]
fn elliptic_and_degenerations_solve_spectral_qdybe() {
    let g = c(0.23);
    for n in [2, 3] {
        let e = qdybe_spectral_residual(
            &basic_elliptic(n, tau(), g).unwrap(),
            g,
            &SampleConfig::new(6, 11, 1e-8),
        )
        .unwrap();
        assert!(e.pass, "elliptic n={n}: {}", e.residual_max);
        for kind in [WaveKind::Trig, WaveKind::Rational] {
            let d = spectral_degenerate(kind, n, g).unwrap();
            let r = qdybe_spectral_residual(&d, g, &SampleConfig::new(6, 11, 1e-10)).unwrap();
            assert!(r.pass, "{kind:?} n={n}: {}", r.residual_max);
        }
    }
}

#[test]
fn hecke_conditions() {
    let cfg = SampleConfig::new(10, 2, 1e-9);
    assert!(hecke_check(&basic_rational(3).unwrap(), c(1.0), &cfg).unwrap().pass);
    assert!(
        hecke_check(&basic_trigonometric(3, c(0.5)).unwrap(), c(0.5), &cfg)
            .unwrap()
            .pass
    );
    let wrong = hecke_check(&basic_rational(2).unwrap(), c(2.0), &cfg).unwrap();
    assert!(wrong.residual_max > 1e-3);
}

#[test]
fn exchange_closed_form_hecke_parameter() {
    // Measured: the normalized operator R̃ satisfies (PR̃ - 1)(PR̃ + q^{-2}) = 0.
    let cfg = SampleConfig::new(10, 4, 1e-9);
    for n in [2, 3] {
        for q in [0.5, 0.8] {
            let rt = assemble_plain(&exchange_closed_form_table(n, c(q)).unwrap());
            let rep = hecke_check(&rt, c(q).powi(-2), &cfg).unwrap();
            assert!(rep.pass, "n={n} q={q}: {}", rep.residual_max);
        }
        let rt = assemble_plain(&exchange_closed_form_table(n, c(1.0)).unwrap());
        assert!(hecke_check(&rt, c(1.0), &cfg).unwrap().pass);
    }
}

#[test]
fn exchange_closed_form_solves_qdybe() {
    let cfg = SampleConfig::new(15, 9, 1e-10);
    for n in [2, 3] {
        for q in [1.0, 0.5] {
            let r = qdybe_residual(&exchange_closed_form(n, c(q)).unwrap(), c(1.0), &cfg).unwrap();
            assert!(r.pass, "n={n} q={q}: {}", r.residual_max);
        }
    }
}

#[test]
fn unitarity() {
    let g = c(0.23);
    let cfg = SampleConfig::new(10, 5, 1e-8);
    assert!(
        unitarity_check(&basic_elliptic(2, tau(), g).unwrap(), &cfg)
            .unwrap()
            .pass
    );
    let cfg = SampleConfig::new(10, 5, 1e-10);
    for kind in [WaveKind::Trig, WaveKind::Rational] {
        assert!(
            unitarity_check(&spectral_degenerate(kind, 2, g).unwrap(), &cfg)
                .unwrap()
                .pass
        );
    }
}

#[test]
fn trig_tends_to_rational() {
    let lam = [c(2.0), c(0.0)];
    let r = basic_rational(2).unwrap().eval(&lam).unwrap();
    let errs: Vec<f64> = [1e-3, 5e-4]
        .iter()
        .map(|e| {
            basic_trigonometric(2, c(1.0 + e))
                .unwrap()
                .eval(&lam)
                .unwrap()
                .max_abs_diff(&r)
        })
        .collect();
    let slope = (errs[0] / errs[1]).log2();
    assert!((slope - 1.0).abs() < 0.05, "slope {slope}");
}

#[test]
fn every_family_is_zero_weight() {
    let cfg = SampleConfig::new(20, 13, 0.0);
    for op in [
        basic_rational(3).unwrap(),
        basic_trigonometric(3, c(0.5)).unwrap(),
        exchange_closed_form(3, c(0.5)).unwrap(),
        basic_elliptic(3, tau(), c(0.23)).unwrap().at_u(C64::new(0.4, 0.05)),
    ] {
        assert_eq!(
            weight_defect_sampled(&op, &cfg).unwrap().residual_max,
            0.0,
            "{}",
            op.label
        );
    }
}

#[test]
fn representations() {
    let g = c(0.23);
    let r = basic_elliptic(2, tau(), g).unwrap();
    let cfg = SampleConfig::new(4, 21, 1e-8);
    let triv = trivial_rep(&r.first);
    assert_eq!(rll_residual(&r, &triv, g, &cfg).unwrap().residual_max, 0.0);
    let vec_rep = rll_residual(&r, &r, g, &cfg).unwrap();
    let q = qdybe_spectral_residual(&r, g, &cfg).unwrap();
    assert!(vec_rep.pass);
    assert!(q.pass);
    let rr = tensor_rep(&r, &r, g).unwrap();
    let cfg7 = SampleConfig::new(4, 21, 1e-7);
    assert!(rll_residual(&r, &rr, g, &cfg7).unwrap().pass);
    let with_trivial = tensor_rep(&r, &triv, g).unwrap();
    let u = C64::new(0.31, 0.0);
    let l = [c(0.4), c(-1.3)];
    assert!(with_trivial.eval(u, &l).unwrap().max_abs_diff(&r.eval(u, &l).unwrap()) < 1e-15);
}

#[test]
fn morphisms() {
    use dynrm::verify::morphism_check;
    let g = c(0.23);
    let r = basic_elliptic(2, tau(), g).unwrap();
    let cfg = SampleConfig::new(4, 8, 1e-10);
    let id = |_: &[C64]| Ok(Matrix::<C64>::identity(2));
    assert_eq!(morphism_check(&id, &r, &r, g, &cfg).unwrap().residual_max, 0.0);
    let scalar = |_: &[C64]| Ok(Matrix::<C64>::identity(2).scale(&c(3.5)));
    assert!(morphism_check(&scalar, &r, &r, g, &cfg).unwrap().residual_max < 1e-12);
    let diag = |l: &[C64]| Ok(Matrix::diagonal(&[l[0], c(1.0)]));
    assert!(morphism_check(&diag, &r, &r, g, &cfg).unwrap().residual_max > 1e-3);
    let _ = SpectralDynamicalOperator::from_constant_u(&basic_rational(2).unwrap());
}
