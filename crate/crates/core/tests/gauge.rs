use dynrm::gauge::{
    apply_classical, apply_quantum, exact_from_potential, is_closed, ClassicalGaugePlan, MultiplicativeTwoForm,
    Potential, PsiReading, QuantumGaugePlan,
};
use dynrm::liealg::{
    cdybe_residual, cdybe_spectral_residual, classical_elliptic, classical_rational, classical_sample_config,
    classical_trig, Derivative,
};
use dynrm::rmatrix::{
    assemble_plain, assemble_spectral, basic_elliptic_table, basic_rational_table, basic_trigonometric_table,
};
use dynrm::specfun::EllipticParams;
use dynrm::verify::{qdybe_residual, qdybe_spectral_residual, SampleConfig};
use dynrm::C64;

fn c(x: f64) -> C64 {
    C64::new(x, 0.0)
}

fn tau() -> EllipticParams {
    EllipticParams::new(C64::new(0.0, 0.8)).unwrap()
}

fn quadratic_potential(seed: u64) -> impl Fn(usize, &[C64]) -> C64 + Send + Sync + Clone {
    let k = seed as f64;
    move |a: usize, l: &[C64]| {
        let mut v = c(0.1 * (a as f64 + k));
        for (i, x) in l.iter().enumerate() {
            v += 0.05 * ((i + a) as f64 - k / 2.0) * x + 0.02 * (k - i as f64) * x * x;
        }
        v.exp()
    }
}

fn non_closed() -> MultiplicativeTwoForm {
    MultiplicativeTwoForm::from_upper(3, |a, b, l| if (a, b) == (0, 1) { l[2].exp() } else { c(1.0) })
}

#[test]
fn exact_forms_are_closed() {
    for seed in 0..5 {
        let f = exact_from_potential(3, quadratic_potential(seed), c(0.37));
        let rep = is_closed(&f, c(0.37), &SampleConfig::new(10, seed, 1e-12)).unwrap();
        assert!(rep.pass, "seed {seed}: {}", rep.residual_max);
    }
    assert!(
        is_closed(
            &MultiplicativeTwoForm::trivial(4),
            c(1.0),
            &SampleConfig::new(3, 0, 0.0)
        )
        .unwrap()
        .pass
    );
    let rep = is_closed(&non_closed(), c(1.0), &SampleConfig::new(5, 1, 1e-12)).unwrap();
    assert!(!rep.pass);
}

#[test]
fn exponential_of_product_form_is_closed() {
    // exp(λ_a λ_b) passes the closedness identity, so it cannot serve as a negative control.
    let f = MultiplicativeTwoForm::from_upper(3, |a, b, l| (l[a] * l[b]).exp());
    let rep = is_closed(&f, c(1.0), &SampleConfig::new(5, 1, 1e-12)).unwrap();
    assert!(rep.residual_max < 1e-9, "{}", rep.residual_max);
}

#[test]
fn exact_twist_preserves_qdybe() {
    let cfg = SampleConfig::new(10, 4, 1e-10);
    for n in [2, 3] {
        let form = exact_from_potential(n, quadratic_potential(2), c(1.0));
        let plan = QuantumGaugePlan::identity().with_form(form);
        let r = apply_quantum(&basic_rational_table(n).unwrap(), &plan).unwrap();
        let rep = qdybe_residual(&assemble_plain(&r), c(1.0), &cfg).unwrap();
        assert!(rep.pass, "rational n={n}: {}", rep.residual_max);
        let t = apply_quantum(&basic_trigonometric_table(n, c(0.5)).unwrap(), &plan).unwrap();
        let rep = qdybe_residual(&assemble_plain(&t), c(1.0), &cfg).unwrap();
        assert!(rep.residual_max < 10.0 * cfg.tol, "trig n={n}: {}", rep.residual_max);
    }
}

#[test]
fn non_closed_twist_breaks_qdybe() {
    let plan = QuantumGaugePlan::identity().with_form(non_closed());
    let r = apply_quantum(&basic_rational_table(3).unwrap(), &plan).unwrap();
    let rep = qdybe_residual(&assemble_plain(&r), c(1.0), &SampleConfig::new(5, 4, 1e-10)).unwrap();
    assert!(rep.residual_max > 1e-3, "{}", rep.residual_max);
}

#[test]
fn permutation_shift_scalar_preserve_qdybe() {
    let cfg = SampleConfig::new(10, 6, 1e-9);
    let plan = QuantumGaugePlan::identity()
        .with_form(exact_from_potential(3, quadratic_potential(1), c(1.0)))
        .with_permutation(vec![2, 0, 1])
        .with_shift(vec![c(0.3), c(-1.2), c(0.5)])
        .with_constant(c(-2.5));
    for t in [
        basic_rational_table(3).unwrap(),
        basic_trigonometric_table(3, c(0.7)).unwrap(),
    ] {
        let g = apply_quantum(&t, &plan).unwrap();
        let rep = qdybe_residual(&assemble_plain(&g), c(1.0), &cfg).unwrap();
        assert!(rep.pass, "{}: {}", t.label, rep.residual_max);
    }
}

#[test]
fn spectral_gauges_preserve_qdybe() {
    let g = c(0.23);
    let psi = |l: &[C64]| 0.2 * l[0] * l[1] + 0.1 * l[2] * l[2] + l[0].sin();
    let plan = QuantumGaugePlan::identity()
        .with_psi(psi, PsiReading::Corrected)
        .with_u_scale(1.7)
        .with_scalar(|u| (0.3 * u).exp())
        .with_shift(vec![c(0.1), c(0.2), c(-0.4)]);
    let t = apply_quantum(&basic_elliptic_table(3, tau(), g).unwrap(), &plan).unwrap();
    let rep = qdybe_spectral_residual(&assemble_spectral(&t), g, &SampleConfig::new(6, 3, 1e-8)).unwrap();
    assert!(rep.pass, "{}", rep.residual_max);
}

#[test]
fn verbatim_psi_reading_breaks_qdybe() {
    let g = c(0.23);
    let psi = |l: &[C64]| 0.2 * l[0] * l[1] + 0.1 * l[2] * l[2] + 0.3 * l[0] * l[0];
    let plan = QuantumGaugePlan::identity().with_psi(psi, PsiReading::Verbatim);
    let t = apply_quantum(&basic_elliptic_table(3, tau(), g).unwrap(), &plan).unwrap();
    let rep = qdybe_spectral_residual(&assemble_spectral(&t), g, &SampleConfig::new(4, 3, 1e-8)).unwrap();
    assert!(rep.residual_max > 1e-3, "{}", rep.residual_max);
}

#[test]
fn spectral_items_rejected_without_spectral_parameter() {
    let plan = QuantumGaugePlan::identity().with_u_scale(2.0);
    assert!(apply_quantum(&basic_rational_table(2).unwrap(), &plan).is_err());
    let plan = ClassicalGaugePlan::identity().with_u_scale(2.0);
    assert!(apply_classical(&classical_rational(2).unwrap(), &plan).is_err());
}

#[test]
fn classical_gauges_preserve_cdybe() {
    let cfg = classical_sample_config(6, 8, 1e-7);
    let id = apply_classical(&classical_rational(2).unwrap(), &ClassicalGaugePlan::identity()).unwrap();
    let l = [c(0.9), c(-0.3)];
    assert_eq!(id.at(&l).unwrap(), classical_rational(2).unwrap().at(&l).unwrap());
    let omega = ClassicalGaugePlan::identity()
        .with_constant_omega(vec![vec![0.0, 0.7], vec![-0.7, 0.0]])
        .unwrap();
    let r = apply_classical(&classical_rational(3).unwrap(), &omega).unwrap();
    assert!(cdybe_residual(&r, &cfg, Derivative::Fd).unwrap().pass);
    let scaled = ClassicalGaugePlan::identity().with_scale_shift(2.0, vec![c(0.0), c(0.0)]);
    let r2 = apply_classical(&classical_rational(2).unwrap(), &scaled).unwrap();
    let want = classical_rational(2)
        .unwrap()
        .at(&[c(1.8), c(-0.6)])
        .unwrap()
        .scale(&c(2.0));
    assert!(r2.at(&l).unwrap().max_abs_diff(&want) < 1e-15);
    assert!(cdybe_residual(&r2, &cfg, Derivative::Fd).unwrap().pass);
    let weyl = ClassicalGaugePlan::identity()
        .with_weyl(vec![1, 2, 0])
        .with_scale_shift(0.5, vec![c(0.2), c(0.0), c(-0.1)]);
    let r3 = apply_classical(&classical_trig(3).unwrap(), &weyl).unwrap();
    assert!(cdybe_residual(&r3, &cfg, Derivative::Fd).unwrap().pass);
}

#[test]
fn classical_spectral_gauges_preserve_cdybe() {
    let cfg = classical_sample_config(4, 9, 1e-6);
    let psi = Potential::quadratic(
        vec![0.3, -0.1, 0.2],
        vec![vec![0.2, 0.1, 0.0], vec![0.0, -0.3, 0.05], vec![0.0, 0.0, 0.1]],
    );
    let plan = ClassicalGaugePlan::identity()
        .with_psi(psi)
        .with_constant_omega(vec![vec![0.0, 0.4], vec![-0.4, 0.0]])
        .unwrap()
        .with_u_scale(1.3);
    let r = apply_classical(&classical_elliptic(3, tau()).unwrap(), &plan).unwrap();
    let rep = cdybe_spectral_residual(&r, &cfg).unwrap();
    assert!(rep.pass, "{}", rep.residual_max);
}
