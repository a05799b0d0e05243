use dynrm::fusion::{
    abrr_defect, abrr_solve, closed_form_j, exchange, exchange_qdybe_defect, fd_module, fusion_via_intertwiners,
    multicomponent_j, q_operator, r0_eval, tensor, twist_defect, universal_j, universal_r_eval, verma_intertwiner,
    Module, RankOne,
};
use dynrm::rmatrix::exchange_closed_form;
use dynrm::scalar::{rat, Rational};
use dynrm::tensorcore::{embed_matrix, opposite, weight_defect_matrix};
use dynrm::{Matrix, Scalar, C64};

fn classical() -> RankOne<Rational> {
    RankOne::Classical
}

fn half() -> RankOne<Rational> {
    RankOne::quantum(rat(1, 2)).unwrap()
}

fn l(alg: &RankOne<Rational>, m: u32) -> Module<Rational> {
    fd_module(alg, m).unwrap()
}

fn is_zero(m: &Matrix<Rational>) -> bool {
    m.data().iter().all(Scalar::is_zero)
}

const LAMBDAS: [(i64, i64); 5] = [(3, 7), (-5, 11), (13, 4), (2, 9), (-17, 6)];

#[test]
fn classical_cross_oracle() {
    let c = classical();
    for (a, b) in [(1, 1), (1, 2), (2, 1), (2, 2)] {
        let (w, v) = (l(&c, a), l(&c, b));
        for (p, q) in LAMBDAS {
            let lam = rat(p, q);
            let ja = abrr_solve(&c, &w, &v, &lam).unwrap();
            assert_eq!(
                fusion_via_intertwiners(&c, &w, &v, &lam).unwrap(),
                ja,
                "intertwiners ({a},{b}) at {lam}"
            );
            assert_eq!(
                closed_form_j(&w, &v, &lam).unwrap(),
                ja,
                "closed form ({a},{b}) at {lam}"
            );
            assert_eq!(
                universal_j(&c, &w, &v, &lam).unwrap(),
                ja,
                "recursion ({a},{b}) at {lam}"
            );
            assert_eq!(abrr_defect(&c, &w, &v, &lam, &ja).unwrap(), 0.0);
        }
    }
}

#[test]
fn quantum_cross_oracle() {
    for qv in [rat(1, 2), rat(3, 5)] {
        let q = RankOne::quantum(qv).unwrap();
        for (a, b) in [(1, 1), (1, 2), (2, 1), (2, 2), (3, 1)] {
            let (w, v) = (l(&q, a), l(&q, b));
            for t in [rat(3, 7), rat(5, 2), rat(-4, 9)] {
                let ja = abrr_solve(&q, &w, &v, &t).unwrap();
                assert_eq!(fusion_via_intertwiners(&q, &w, &v, &t).unwrap(), ja, "({a},{b}) t={t}");
                assert_eq!(universal_j(&q, &w, &v, &t).unwrap(), ja, "({a},{b}) t={t}");
                assert_eq!(abrr_defect(&q, &w, &v, &t, &ja).unwrap(), 0.0);
            }
        }
    }
}

#[test]
fn fusion_is_unipotent_and_zero_weight() {
    for alg in [classical(), half()] {
        for (a, b) in [(1, 2), (2, 2), (3, 2)] {
            let (w, v) = (l(&alg, a), l(&alg, b));
            let j = abrr_solve(&alg, &w, &v, &rat(7, 3)).unwrap();
            let space = w_space(&w, &v);
            assert_eq!(weight_defect_matrix(&j, &space, &space, &[0]), 0.0);
            let dv = v.dim();
            for r in 0..j.rows() {
                for c in 0..j.cols() {
                    let raises = v.weights[r % dv] > v.weights[c % dv];
                    if r == c {
                        assert_eq!(j[(r, c)], rat(1, 1));
                    } else if !raises {
                        assert!(Scalar::is_zero(&j[(r, c)]));
                    }
                }
            }
        }
    }
}

fn w_space(w: &Module<Rational>, v: &Module<Rational>) -> dynrm::tensorcore::WeightVectorSpace {
    w.space().tensor(&v.space()).unwrap()
}

#[test]
fn universal_r_satisfies_qybe_and_intertwines_coproduct() {
    let q = half();
    for (a, b, c) in [(1, 1, 1), (1, 2, 2), (2, 1, 1)] {
        let mods = [l(&q, a), l(&q, b), l(&q, c)];
        let dims: Vec<usize> = mods.iter().map(Module::dim).collect();
        let r = |i: usize, j: usize| {
            let m = universal_r_eval(&q, &mods[i], &mods[j]).unwrap().matrix;
            embed_matrix(&m, (i, j), &dims).unwrap()
        };
        let lhs = &(&r(0, 1) * &r(0, 2)) * &r(1, 2);
        let rhs = &(&r(1, 2) * &r(0, 2)) * &r(0, 1);
        assert!(is_zero(&(&lhs - &rhs)), "QYBE on ({a},{b},{c})");
    }
    let (w, v) = (l(&q, 1), l(&q, 2));
    let r = universal_r_eval(&q, &w, &v).unwrap();
    assert!(!r.half);
    assert!(universal_r_eval(&q, &w, &w).unwrap().half);
    let (wv, vw) = (tensor(&w, &v), tensor(&v, &w));
    for (x, y) in [(&wv.e, &vw.e), (&wv.f, &vw.f)] {
        let op = opposite(y, v.dim(), w.dim());
        assert!(is_zero(&(&(&r.matrix * x) - &(&op * &r.matrix))));
    }
    let r0 = r0_eval(&q, &w, &v).unwrap();
    assert_eq!(r0[(0, 0)], rat(1, 1));
}

#[test]
fn exchange_solves_qdybe_exactly() {
    for alg in [classical(), half()] {
        for m in [1, 2] {
            let v = l(&alg, m);
            for t in [rat(3, 7), rat(11, 5)] {
                let d = exchange_qdybe_defect(&alg, &v, &t).unwrap();
                assert!(is_zero(&d), "m={m} {alg:?} at {t}");
            }
        }
    }
}

#[test]
fn twist_equation_holds_exactly() {
    for alg in [classical(), half()] {
        for (a, b, c) in [(1, 1, 1), (1, 1, 2), (2, 1, 1), (1, 2, 2), (1, 0, 1)] {
            let d = twist_defect(&alg, &l(&alg, a), &l(&alg, b), &l(&alg, c), &rat(5, 7)).unwrap();
            assert!(is_zero(&d), "({a},{b},{c}) {alg:?}");
        }
        let d = twist_defect(&alg, &l(&alg, 1), &l(&alg, 1), &l(&alg, 0), &rat(5, 7)).unwrap();
        assert!(is_zero(&d));
    }
}

#[test]
fn multicomponent_fusion() {
    let q = half();
    let t = rat(4, 7);
    let (a, b, c) = (l(&q, 1), l(&q, 2), l(&q, 1));
    assert_eq!(
        multicomponent_j(&q, &[a.clone(), b.clone()], &t).unwrap(),
        universal_j(&q, &a, &b, &t).unwrap()
    );
    let j3 = multicomponent_j(&q, &[a.clone(), b.clone(), c.clone()], &t).unwrap();
    let bc = tensor(&b, &c);
    let rhs =
        &universal_j(&q, &a, &bc, &t).unwrap() * &Matrix::identity(a.dim()).kron(&abrr_solve(&q, &b, &c, &t).unwrap());
    assert_eq!(j3, rhs);
    let triv = multicomponent_j(&q, &[a.clone(), l(&q, 0), c.clone()], &t).unwrap();
    assert_eq!(triv, universal_j(&q, &a, &c, &t).unwrap());
    assert!(multicomponent_j(&q, &[a], &t).is_err());
}

#[test]
fn verma_intertwiner_relation() {
    for alg in [classical(), half()] {
        let v = l(&alg, 2);
        let vec0 = v.unit(1);
        let phi = verma_intertwiner(&alg, &rat(7, 5), &v, &vec0, 3).unwrap();
        assert_eq!(phi.e_relation_defect(&alg, &v).unwrap(), 0.0);
        assert_eq!(phi.expectation(), &vec0[..]);
        assert_eq!(phi.nu, 0);
        let triv = l(&alg, 0);
        let p0 = verma_intertwiner(&alg, &rat(7, 5), &triv, &triv.unit(0), 3).unwrap();
        assert!(p0.coeffs[1..].iter().all(|c| Scalar::is_zero(&c[0])));
    }
    let c = classical();
    let v = l(&c, 2);
    let mixed = vec![rat(1, 1), rat(1, 1), rat(0, 1)];
    assert!(verma_intertwiner(&c, &rat(1, 3), &v, &mixed, 2).is_err());
}

#[test]
fn q_operator_on_adjoint() {
    let c = classical();
    let v = l(&c, 2);
    let lam = rat(37, 100);
    let q = q_operator(&c, &lam, &v).unwrap();
    let space = v.space();
    assert_eq!(weight_defect_matrix(&q, &space, &space, &[0]), 0.0);
    assert!(q.inverse().is_ok());
    // Q on V[0]: 1 + φ_1(0)(-e)f = 1 + 2/λ with φ_1(0) = -1/λ
    assert_eq!(q[(1, 1)], rat(1, 1) + rat(2, 1) / lam);
}

#[test]
fn exchange_matches_closed_form_for_sl2() {
    for qf in [0.5, 0.8] {
        let q = RankOne::quantum(C64::new(qf, 0.0)).unwrap();
        let v = fd_module(&q, 1).unwrap();
        let closed = exchange_closed_form(2, C64::new(qf, 0.0)).unwrap();
        for lv in [0.37, 1.3, -0.8, 2.45, -1.9] {
            let t = C64::new(qf.powf(lv), 0.0);
            let r = exchange(&q, &v, &v, &t).unwrap();
            assert!(r.half);
            let got = r.matrix.scale(&C64::new(qf.sqrt(), 0.0));
            let want = closed.eval(&[C64::new(lv, 0.0), C64::new(0.0, 0.0)]).unwrap();
            assert!(
                got.max_abs_diff(&want) < 1e-12,
                "q={qf} l={lv}: {}",
                got.max_abs_diff(&want)
            );
        }
    }
    let c = RankOne::<C64>::Classical;
    let v = fd_module(&c, 1).unwrap();
    let closed = exchange_closed_form(2, C64::new(1.0, 0.0)).unwrap();
    for lv in [0.37, 1.3, -0.8] {
        let r = exchange(&c, &v, &v, &C64::new(lv, 0.0)).unwrap();
        let want = closed.eval(&[C64::new(lv, 0.0), C64::new(0.0, 0.0)]).unwrap();
        assert!(r.matrix.max_abs_diff(&want) < 1e-12);
    }
}
