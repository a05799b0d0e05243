//! Acceptance criteria, one pass/fail line each. Run with `--nocapture` to see the table.

use dynrm::suites::{list_suites, run_suite, SuiteConfig, SuiteReport};

struct Outcome {
    id: usize,
    title: &'static str,
    lines: Vec<String>,
    pass: bool,
}

impl Outcome {
    fn new(id: usize, title: &'static str) -> Self {
        Outcome {
            id,
            title,
            lines: Vec::new(),
            pass: true,
        }
    }

    /// Records a check that must hold: `value <= bound` (or `>` when `above`).
    fn check(&mut self, what: impl Into<String>, value: f64, bound: f64, above: bool) {
        let ok = if above { value > bound } else { value <= bound };
        let rel = if above { ">" } else { "<=" };
        self.lines.push(format!(
            "    {} {}: {value:.3e} {rel} {bound:.1e}",
            if ok { "ok  " } else { "FAIL" },
            what.into()
        ));
        self.pass &= ok;
    }

    fn at_least(&mut self, what: impl Into<String>, value: f64, bound: f64) {
        let ok = value >= bound;
        self.lines.push(format!(
            "    {} {}: {value:.4} >= {bound}",
            if ok { "ok  " } else { "FAIL" },
            what.into()
        ));
        self.pass &= ok;
    }

    fn suite(&mut self, what: &str, cfg: SuiteConfig, tol: f64) -> Option<SuiteReport> {
        let cfg = cfg.tol(tol);
        match run_suite(&cfg) {
            Ok(rep) => {
                for r in &rep.reports {
                    self.check(format!("{what} [{}]", r.identity), r.residual_max, r.tol, false);
                }
                self.pass &= rep.pass;
                Some(rep)
            }
            Err(e) => {
                self.lines.push(format!("    FAIL {what}: error {e}"));
                self.pass = false;
                None
            }
        }
    }

    fn control(&mut self, what: &str, cfg: SuiteConfig, tol: f64) {
        let cfg = cfg.tol(tol);
        match run_suite(&cfg) {
            Ok(rep) => {
                self.check(format!("control {what}"), rep.residual_max, 1e3 * tol, true);
                if rep.pass {
                    self.lines.push(format!("    FAIL control {what} reported pass"));
                    self.pass = false;
                }
            }
            Err(e) => {
                self.lines.push(format!("    FAIL control {what}: error {e}"));
                self.pass = false;
            }
        }
    }
}

fn s(name: &str) -> SuiteConfig {
    SuiteConfig::new(name)
}

fn criterion_1() -> Outcome {
    let mut o = Outcome::new(1, "QDYBE, rational and trigonometric (q = 1/2), n = 2, 3, 25 samples");
    o.suite(
        "rational",
        s("qdybe").param("family", "rational").param("n", "2,3").samples(25),
        1e-10,
    );
    o.suite(
        "trig",
        s("qdybe")
            .param("family", "trig")
            .param("q", "0.5")
            .param("n", "2,3")
            .samples(25),
        1e-10,
    );
    o
}

fn criterion_2() -> Outcome {
    let mut o = Outcome::new(
        2,
        "spectral QDYBE: elliptic (τ = 0.8i, γ = 0.23) and both degenerations, n = 2, 3",
    );
    let base = |f: &str| {
        s("qdybe-spectral")
            .param("family", f)
            .param("n", "2,3")
            .param("gamma", "0.23")
    };
    o.suite("elliptic", base("elliptic").param("tau", "0.8"), 1e-8);
    o.suite("spectral-trig", base("spectral-trig"), 1e-10);
    o.suite("spectral-rational", base("spectral-rational"), 1e-10);
    o
}

fn criterion_3() -> Outcome {
    let mut o = Outcome::new(3, "Hecke condition for rational/trigonometric, unitarity for elliptic");
    o.suite("hecke rational", s("hecke").param("family", "rational"), 1e-9);
    o.suite("hecke trig", s("hecke").param("family", "trig").param("q", "0.5"), 1e-9);
    o.suite(
        "unitarity elliptic",
        s("unitarity").param("family", "elliptic").param("n", "2,3"),
        1e-8,
    );
    o
}

fn criterion_4() -> Outcome {
    let mut o = Outcome::new(
        4,
        "gauge: exact twist + shift + scalar keeps QDYBE; non-closed twist breaks it",
    );
    o.suite(
        "rational",
        s("gauge").param("family", "rational").param("n", "2,3"),
        1e-9,
    );
    match run_suite(&s("gauge").param("form", "non-closed").param("n", "3")) {
        Ok(rep) => o.check("non-closed twist", rep.residual_max, 1e-3, true),
        Err(e) => {
            o.lines.push(format!("    FAIL non-closed twist: {e}"));
            o.pass = false;
        }
    }
    o
}

fn criterion_5() -> Outcome {
    let mut o = Outcome::new(
        5,
        "CDYBE for rational and trigonometric (n = 2, 3); spectral CDYBE elliptic n = 2",
    );
    o.suite(
        "c-rational",
        s("cdybe").param("family", "c-rational").param("n", "2,3"),
        1e-7,
    );
    o.suite("c-trig", s("cdybe").param("family", "c-trig").param("n", "2,3"), 1e-7);
    o.suite(
        "c-elliptic",
        s("cdybe-spectral").param("family", "c-elliptic").param("n", "2"),
        1e-6,
    );
    o
}

fn criterion_6() -> Outcome {
    let mut o = Outcome::new(6, "coupling constants ε = 0 (rational), 1 (trig); elliptic residue Ω");
    for (fam, eps) in [("c-rational", "0"), ("c-trig", "1")] {
        if let Some(rep) = o.suite(fam, s("coupling").param("family", fam), 1e-10) {
            for r in &rep.reports {
                let got = &r.params["epsilon"];
                let ok = got
                    .parse::<f64>()
                    .map(|g| (g - eps.parse::<f64>().unwrap()).abs() < 1e-10)
                    .unwrap_or(false);
                o.lines.push(format!(
                    "    {} {fam} n={} ε = {got} (expected {eps})",
                    if ok { "ok  " } else { "FAIL" },
                    r.params["n"]
                ));
                o.pass &= ok;
            }
        }
    }
    o.suite("elliptic residue", s("residue").param("n", "2,3"), 1e-5);
    o
}

fn criterion_7() -> Outcome {
    let mut o = Outcome::new(
        7,
        "classical limits with empirical order >= 0.9, ħ = 1e-2, 5e-3, 2.5e-3",
    );
    for fam in ["rational", "trig", "elliptic"] {
        if let Ok(rep) = run_suite(&s("limits").param("family", fam)) {
            for r in rep.reports.iter().filter(|r| r.identity == "limit-order") {
                let order: f64 = r.params["order"].parse().unwrap();
                o.at_least(
                    format!("{fam} n={} order, errors {}", r.params["n"], r.params["errors"]),
                    order,
                    0.9,
                );
            }
        } else {
            o.lines.push(format!("    FAIL {fam}: error"));
            o.pass = false;
        }
    }
    o
}

fn criterion_8() -> Outcome {
    let mut o = Outcome::new(8, "ABRR exact on L1⊗L1, L2⊗L2 (classical, q = 1/2); closed form agrees");
    for q in ["classical", "1/2"] {
        for m in ["1,1", "2,2"] {
            o.suite(
                &format!("q={q} modules={m}"),
                s("abrr").param("q", q).param("modules", m),
                0.0,
            );
        }
    }
    o
}

fn criterion_9() -> Outcome {
    let mut o = Outcome::new(9, "fusion via intertwiners equals ABRR at 5 rational λ, exact");
    for q in ["classical", "1/2"] {
        for m in ["1,1", "1,2", "2,2"] {
            o.suite(
                &format!("q={q} modules={m}"),
                s("cross-oracle").param("q", q).param("modules", m).samples(5),
                0.0,
            );
        }
    }
    o
}

fn criterion_10() -> Outcome {
    let mut o = Outcome::new(
        10,
        "exchange(L1, L1) solves QDYBE exactly; matches the n = 2 closed form on 5 points",
    );
    for q in ["classical", "1/2"] {
        o.suite(
            &format!("q={q}"),
            s("exchange").param("q", q).param("modules", "1"),
            0.0,
        );
    }
    o
}

fn criterion_11() -> Outcome {
    let mut o = Outcome::new(11, "dynamical twist equation exact on (L1,L1,L1), (L1,L1,L2)");
    for q in ["classical", "1/2"] {
        for m in ["1,1,1", "1,1,2"] {
            o.suite(
                &format!("q={q} modules={m}"),
                s("twist").param("q", q).param("modules", m),
                0.0,
            );
        }
    }
    o
}

fn criterion_12() -> Outcome {
    let mut o = Outcome::new(12, "[D_L1, D_L2] = 0 and D_{L1⊗L1} = D_L1², N = 10, exact");
    o.suite(
        "V=L2",
        s("commute").param("V", "2").param("W", "1,2").param("order", "10"),
        0.0,
    );
    o
}

fn criterion_13() -> Outcome {
    let mut o = Outcome::new(
        13,
        "eigenvalue equation coefficient-wise: (L0,L1), (L2,L1), (L2,L2), q = 1/2",
    );
    o.suite(
        "V=L0 W=L1 order 16",
        s("eigen").param("V", "0").param("W", "1").param("order", "16"),
        0.0,
    );
    o.suite(
        "V=L2 W=L1,L2 order 10",
        s("eigen").param("V", "2").param("W", "1,2").param("order", "10"),
        0.0,
    );
    o
}

fn criterion_14() -> Outcome {
    let mut o = Outcome::new(
        14,
        "symmetry F(λ, μ) = F(μ, λ), V = L2, N = 12, 5 samples in |x| <= 1/4",
    );
    o.suite(
        "V=L2",
        s("symmetry").param("V", "2").param("order", "12").samples(5),
        1e-6,
    );
    o
}

fn criterion_15() -> Outcome {
    let mut o = Outcome::new(
        15,
        "negative controls exceed 1e3·tol; identical seeds give identical reports",
    );
    let float = |name: &str, eps: &str| s(name).param("perturb", eps);
    o.control("qdybe", float("qdybe", "1e-3"), 1e-10);
    o.control("qdybe-spectral", float("qdybe-spectral", "1e-3"), 1e-8);
    o.control("hecke", float("hecke", "1e-3"), 1e-9);
    o.control("unitarity", float("unitarity", "1e-3"), 1e-8);
    o.control("closedness", s("closedness").param("form", "non-closed"), 1e-12);
    o.control("gauge", s("gauge").param("form", "non-closed"), 1e-9);
    o.control("cdybe", float("cdybe", "1e-2"), 1e-7);
    o.control("cdybe-spectral", float("cdybe-spectral", "1e-2"), 1e-6);
    o.control("coupling", float("coupling", "1e-3"), 1e-10);
    o.control("residue", float("residue", "1e-1"), 1e-5);
    o.control("limits", s("limits").param("min-order", "3"), 1e-3);
    o.control("abrr", s("abrr").param("perturb", "1/1000"), 0.0);
    o.control("cross-oracle", s("cross-oracle").param("perturb", "1/1000"), 0.0);
    o.control("exchange", s("exchange").param("perturb", "1/1000"), 0.0);
    o.control("twist", s("twist").param("control", "static"), 0.0);
    o.control("eigen", s("eigen").param("control", "drop-weyl"), 0.0);
    o.control("commute", s("commute").param("perturb", "1/1000"), 0.0);
    o.control("symmetry", float("symmetry", "1e-2"), 1e-6);
    let mut same = 0;
    for info in list_suites() {
        let cfg = s(info.name).seed(20_261_017);
        let a = run_suite(&cfg).map(|r| r.to_json());
        let b = run_suite(&cfg).map(|r| r.to_json());
        match (a, b) {
            (Ok(a), Ok(b)) if a == b => same += 1,
            _ => {
                o.lines.push(format!("    FAIL determinism {}", info.name));
                o.pass = false;
            }
        }
    }
    o.lines.push(format!(
        "    {} determinism: {same}/{} suites byte-identical",
        if same == list_suites().len() { "ok  " } else { "FAIL" },
        list_suites().len()
    ));
    o
}

#[test]
fn acceptance() {
    let outcomes = [
        criterion_1(),
        criterion_2(),
        criterion_3(),
        criterion_4(),
        criterion_5(),
        criterion_6(),
        criterion_7(),
        criterion_8(),
        criterion_9(),
        criterion_10(),
        criterion_11(),
        criterion_12(),
        criterion_13(),
        criterion_14(),
        criterion_15(),
    ];
    let mut failed = Vec::new();
    for o in &outcomes {
        println!(
            "criterion {:>2}: {} {}",
            o.id,
            if o.pass { "PASS" } else { "FAIL" },
            o.title
        );
        for l in &o.lines {
            println!("{l}");
        }
        if !o.pass {
            failed.push(o.id);
        }
    }
    println!(
        "acceptance: {}/{} criteria pass",
        outcomes.len() - failed.len(),
        outcomes.len()
    );
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
