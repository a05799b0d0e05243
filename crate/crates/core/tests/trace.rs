use dynrm::fusion::{fd_module, tensor, Module, RankOne};
use dynrm::scalar::{rat, Rational};
use dynrm::series::LaurentSeries;
use dynrm::trace::{
    character, commutativity_check, eigen_check, eigen_check_with, eigen_recursion, macdonald_op, psi_series, q_scalar,
    symmetry_check, tensor_product_check, trace_f, weyl_denominator, TraceNormalization,
};
use dynrm::verify::SampleConfig;
use dynrm::{Scalar, C64};
use proptest::prelude::*;

fn l(q: &Rational, m: u32) -> Module<Rational> {
    fd_module(&RankOne::quantum(q.clone()).unwrap(), m).unwrap()
}

const SAMPLES: [((i64, i64), (i64, i64)); 3] = [((1, 2), (3, 7)), ((2, 3), (5, 4)), ((3, 5), (-2, 9))];

#[test]
fn eigen_equation_holds_exactly() {
    for ((qn, qd), (sn, sd)) in SAMPLES {
        let (q, s) = (rat(qn, qd), rat(sn, sd));
        for (vm, wm) in [(0, 1), (2, 1), (2, 2)] {
            let r = eigen_check(&q, &l(&q, vm), &l(&q, wm), &s, 8).unwrap();
            assert_eq!(r.residual_max, 0.0, "V=L{vm} W=L{wm} q={q} s={s}");
            assert!(r.pass);
        }
    }
    let q = rat(1, 2);
    let r = eigen_check(&q, &l(&q, 2), &l(&q, 1), &rat(3, 7), 10).unwrap();
    assert_eq!(r.residual_max, 0.0);
}

#[test]
fn eigen_negative_control() {
    let q = rat(1, 2);
    let no_weyl = TraceNormalization {
        weyl_denominator: false,
        q_operator: true,
    };
    let r = eigen_check_with(&q, &l(&q, 2), &l(&q, 1), &rat(3, 7), 8, no_weyl).unwrap();
    assert!(r.residual_max > 1.0 && !r.pass);
    // Q(-μ-ρ) is a scalar on V[0], so dropping it leaves the equation intact
    let no_q = TraceNormalization {
        weyl_denominator: true,
        q_operator: false,
    };
    assert!(
        eigen_check_with(&q, &l(&q, 2), &l(&q, 1), &rat(3, 7), 8, no_q)
            .unwrap()
            .pass
    );
}

#[test]
fn trivial_module_closed_forms() {
    let q = rat(1, 2);
    let alg = RankOne::quantum(q.clone()).unwrap();
    let v0 = l(&q, 0);
    let f = trace_f(&alg, &v0, &rat(5, 3), 12).unwrap();
    assert_eq!(f.prefactor, (-1, 0));
    assert_eq!(f.coeffs[0], rat(1, 1));
    assert!(f.coeffs[1..].iter().all(Scalar::is_zero));
    // D_{L1} q^{-l l_μ} = (s + 1/s) q^{-l l_μ}
    let d = macdonald_op(&q, &l(&q, 1), &v0, 6).unwrap();
    let s = rat(5, 3);
    let out = d.apply(&LaurentSeries::one(), &s).unwrap();
    assert_eq!(out.coeff(0), rat(5, 3) + rat(3, 5));
    assert!((1..5).all(|k| Scalar::is_zero(&out.coeff(k))));
    assert_eq!(character(&l(&q, 1), &s).unwrap(), out.coeff(0));
}

#[test]
fn adjoint_regression_values() {
    let q = rat(1, 2);
    let alg = RankOne::quantum(q.clone()).unwrap();
    let v = l(&q, 2);
    let psi = psi_series(&alg, &v, &rat(3, 7), 3).unwrap();
    assert_eq!(
        psi.coeffs,
        vec![rat(1, 1), rat(-115, 32), rat(-607, 128), rat(-2575, 512)]
    );
    assert_eq!(q_scalar(&alg, &v, &rat(3, 7)).unwrap(), rat(155, 8));
    let d = macdonald_op(&q, &l(&q, 1), &v, 10).unwrap();
    let shifts: Vec<i64> = d.terms.iter().map(|(n, _)| *n).collect();
    assert_eq!(shifts, vec![-1, 1]);
    let down = &d.terms[0].1;
    let expect = [
        (0, rat(1, 1)),
        (2, rat(-45, 16)),
        (4, rat(-225, 64)),
        (6, rat(-945, 256)),
        (8, rat(-3825, 1024)),
    ];
    for (k, c) in expect {
        assert_eq!(down.coeff(k), c, "y^{k}");
    }
    assert!((0..9).all(|k| down.coeff(2 * k + 1) == rat(0, 1)));
    assert_eq!(d.terms[1].1, LaurentSeries::one());
    // F_{L2} at q = 1/2, q^{l_μ} = 1/2^{0.3}; the leading coefficient is 1/Q, not 1
    let cq = RankOne::quantum(C64::new(0.5, 0.0)).unwrap();
    let f = trace_f(&cq, &fd_module(&cq, 2).unwrap(), &C64::new(0.5f64.powf(0.3), 0.0), 3).unwrap();
    assert!((f.coeffs[0].re + 0.509489597462107).abs() < 1e-12);
}

#[test]
fn intertwiner_behind_psi_is_exact() {
    let q = rat(1, 2);
    let alg = RankOne::quantum(q.clone()).unwrap();
    let v = l(&q, 2);
    let phi = dynrm::fusion::verma_intertwiner(&alg, &rat(3, 7), &v, &v.unit(1), 4).unwrap();
    assert_eq!(phi.e_relation_defect(&alg, &v).unwrap(), 0.0);
    let psi0 = psi_series(&alg, &l(&q, 0), &rat(3, 7), 6).unwrap();
    assert!(psi0.coeffs.iter().all(|c| *c == rat(1, 1)));
}

#[test]
fn truncation_is_stable() {
    let q = rat(1, 2);
    let alg = RankOne::quantum(q.clone()).unwrap();
    let v = l(&q, 2);
    let f8 = trace_f(&alg, &v, &rat(3, 7), 8).unwrap();
    let f10 = trace_f(&alg, &v, &rat(3, 7), 10).unwrap();
    assert_eq!(f10.truncate(8), f8);
}

#[test]
fn order_zero_determines_trace_function() {
    let q = rat(1, 2);
    let alg = RankOne::quantum(q.clone()).unwrap();
    for (vm, wm) in [(2, 1), (2, 2)] {
        let v = l(&q, vm);
        let f = trace_f(&alg, &v, &rat(3, 7), 6).unwrap();
        let rebuilt = eigen_recursion(&q, &v, &l(&q, wm), &rat(3, 7), &f.coeffs[0], 6).unwrap();
        assert_eq!(rebuilt, f.coeffs);
    }
}

#[test]
fn difference_operators_commute_and_multiply() {
    let q = rat(1, 2);
    let s = rat(3, 7);
    let v = l(&q, 2);
    let (l1, l2) = (l(&q, 1), l(&q, 2));
    assert_eq!(commutativity_check(&q, &l1, &l2, &v, &s, 6).unwrap().residual_max, 0.0);
    assert_eq!(
        commutativity_check(&q, &l1, &l(&q, 0), &v, &s, 6).unwrap().residual_max,
        0.0
    );
    assert_eq!(tensor_product_check(&q, &l1, &l1, &v, &s, 6).unwrap().residual_max, 0.0);
    // D_{L1⊗L1} = D_{L2} + D_{L0}
    let d11 = macdonald_op(&q, &tensor(&l1, &l1), &v, 16).unwrap();
    let d2 = macdonald_op(&q, &l2, &v, 16).unwrap();
    let d0 = macdonald_op(&q, &l(&q, 0), &v, 16).unwrap();
    let g = LaurentSeries::monomial(rat(1, 1), 4, 14);
    let lhs = d11.apply(&g, &s).unwrap();
    let rhs = d2.apply(&g, &s).unwrap() + d0.apply(&g, &s).unwrap();
    assert!((0..10).all(|k| lhs.coeff(k) == rhs.coeff(k)));
}

#[test]
fn symmetry_in_lambda_and_mu() {
    let cfg = SampleConfig::new(5, 42, 1e-6);
    let r = symmetry_check(1, 0.5, 12, &cfg).unwrap();
    assert!(r.pass && r.residual_max < 1e-6, "{r:?}");
    let r0 = symmetry_check(0, 0.5, 4, &cfg).unwrap();
    assert!(r0.residual_max < 1e-12);
    assert!(symmetry_check(1, 0.7, 12, &cfg).is_err());
    let cq = RankOne::quantum(C64::new(0.5, 0.0)).unwrap();
    let v = fd_module(&cq, 2).unwrap();
    let (a, b) = (-1.37, -2.21);
    let f = |x: f64, y: f64| {
        trace_f(&cq, &v, &C64::new(0.5f64.powf(y), 0.0), 12)
            .unwrap()
            .eval(x, y, 0.5)
    };
    assert_eq!(f(a, b), f(a, b));
    assert!((f(a, b) - f(b, a)).norm() < 1e-6);
}

#[test]
fn misuse_is_rejected() {
    let q = rat(1, 2);
    let alg = RankOne::quantum(q.clone()).unwrap();
    assert!(psi_series(&alg, &l(&q, 1), &rat(3, 7), 4).is_err());
    assert!(trace_f(&RankOne::<Rational>::Classical, &l(&q, 2), &rat(3, 7), 4).is_err());
    assert!(eigen_check(&q, &l(&q, 2), &l(&q, 1), &rat(3, 7), 1).is_err());
    assert_eq!(weyl_denominator(&rat(1, 2)).unwrap(), rat(-3, 2));
    assert_eq!(
        weyl_denominator(&rat(2, 1)).unwrap(),
        -weyl_denominator(&rat(1, 2)).unwrap()
    );
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn eigen_equation_for_random_rationals(qn in 1i64..6, qd in 7i64..11, sn in 1i64..9, sd in 1i64..9) {
        let (q, s) = (rat(qn, qd), rat(sn, sd));
        prop_assume!(s != rat(1, 1));
        let r = eigen_check(&q, &l(&q, 2), &l(&q, 1), &s, 5);
        match r {
            Ok(r) => prop_assert_eq!(r.residual_max, 0.0),
            Err(e) => prop_assert!(matches!(e, dynrm::DynError::Resonance(_)), "{e}"),
        }
    }

    #[test]
    fn characters_multiply(sn in 1i64..20, sd in 1i64..20) {
        let q = rat(1, 3);
        let s = rat(sn, sd);
        let (l1, l2) = (l(&q, 1), l(&q, 2));
        let lhs = character(&tensor(&l1, &l2), &s).unwrap();
        let rhs = character(&l1, &s).unwrap() * character(&l2, &s).unwrap();
        prop_assert_eq!(lhs, rhs);
    }
}
