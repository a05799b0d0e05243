//! Named verification suites with string parameters, shared by the command line,
//! the acceptance test and the browser demo.

use std::cell::RefCell;
use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use rand::Rng;
use serde::Serialize;

use crate::error::{DynError, Result};
use crate::fusion::{
    abrr_defect, abrr_solve, closed_form_j, exchange, fd_module, fusion_via_intertwiners, static_twist_defect,
    twist_defect, universal_j, Module, RankOne,
};
use crate::gauge::{
    apply_quantum, exact_from_potential, is_closed, MultiplicativeTwoForm, QuantumGaugePlan, QuantumPlanSpec,
};
use crate::liealg::{
    cdybe_residual_with, cdybe_spectral_residual, classical_elliptic, classical_limit, classical_rational,
    classical_sample_config, classical_trig, classical_wave, coupling_fit, residue_at_zero, ClassicalDynOperator,
    Derivative, LimitFamily,
};
use crate::matrix::Matrix;
use crate::rmatrix::{
    assemble_plain, basic_elliptic, basic_rational, basic_rational_table, basic_trigonometric,
    basic_trigonometric_table, exchange_closed_form, exchange_closed_form_table, spectral_degenerate,
};
use crate::scalar::{rational_to_f64, Rational, Scalar, C64};
use crate::series::LaurentSeries;
use crate::specfun::{EllipticParams, WaveKind};
use crate::tensorcore::{DynamicalOperator, SpectralDynamicalOperator};
use crate::trace::{
    character, eigen_check_with, macdonald_op, operator_commutator, symmetry_check_with, tensor_product_check,
    TraceNormalization,
};
use crate::verify::{
    hecke_check, qdybe_defect_with, qdybe_residual, qdybe_spectral_residual, unitarity_check, ResidualReport,
    SampleConfig,
};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Scalar backend of a suite run.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Backend {
    Float,
    Exact,
}

impl FromStr for Backend {
    type Err = DynError;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "float" => Ok(Backend::Float),
            "exact" => Ok(Backend::Exact),
            _ => Err(DynError::Config(format!("unknown backend {s:?} (float|exact)"))),
        }
    }
}

impl fmt::Display for Backend {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Backend::Float => "float",
            Backend::Exact => "exact",
        })
    }
}

/// One suite invocation. Unset fields take the suite defaults.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct SuiteConfig {
    pub suite: String,
    pub params: BTreeMap<String, String>,
    pub samples: Option<usize>,
    pub seed: Option<u64>,
    pub tol: Option<f64>,
    pub backend: Option<Backend>,
}

impl SuiteConfig {
    pub fn new(suite: impl Into<String>) -> Self {
        SuiteConfig {
            suite: suite.into(),
            ..Default::default()
        }
    }

    pub fn param(mut self, key: &str, value: impl ToString) -> Self {
        self.params.insert(key.to_string(), value.to_string());
        self
    }

    pub fn samples(mut self, n: usize) -> Self {
        self.samples = Some(n);
        self
    }

    pub fn seed(mut self, s: u64) -> Self {
        self.seed = Some(s);
        self
    }

    pub fn tol(mut self, t: f64) -> Self {
        self.tol = Some(t);
        self
    }

    pub fn backend(mut self, b: Backend) -> Self {
        self.backend = Some(b);
        self
    }
}

pub const DEFAULT_SEED: u64 = 42;

/// Aggregated outcome of a suite; echoes the resolved configuration.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SuiteReport {
    pub suite: String,
    pub params: BTreeMap<String, String>,
    pub samples: usize,
    pub seed: u64,
    pub residual_max: f64,
    pub residual_mean: f64,
    pub tol: f64,
    pub pass: bool,
    pub backend: Backend,
    pub version: String,
    pub reports: Vec<ResidualReport>,
}

impl SuiteReport {
    pub fn exit_code(&self) -> i32 {
        if self.pass {
            0
        } else {
            1
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("reports serialize")
    }
}

/// Catalogue entry.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct SuiteInfo {
    pub name: &'static str,
    /// Command-line subcommand that runs it.
    pub command: &'static str,
    pub identity: &'static str,
    pub backends: &'static [Backend],
    pub params: &'static [&'static str],
    pub default_tol: f64,
    pub default_samples: usize,
}

const FLOAT: &[Backend] = &[Backend::Float];
const EXACT: &[Backend] = &[Backend::Exact];

static SUITES: &[SuiteInfo] = &[
    SuiteInfo {
        name: "qdybe",
        command: "verify",
        identity: "R^{12}(λ-γh^{(3)}) R^{13}(λ) R^{23}(λ-γh^{(1)}) = R^{23}(λ) R^{13}(λ-γh^{(2)}) R^{12}(λ) for rational, trigonometric and exchange families",
        backends: FLOAT,
        params: &["family", "n", "q", "perturb"],
        default_tol: 1e-10,
        default_samples: 25,
    },
    SuiteInfo {
        name: "qdybe-spectral",
        command: "verify",
        identity: "spectral QDYBE with R^{ij}(u_i - u_j) for the elliptic family and its trigonometric and rational degenerations",
        backends: FLOAT,
        params: &["family", "n", "tau", "gamma", "perturb"],
        default_tol: 1e-8,
        default_samples: 10,
    },
    SuiteInfo {
        name: "hecke",
        command: "verify",
        identity: "(PR - 1)(PR + p) = 0 with p = 1 (rational), q (trigonometric), q^{-2} (normalized exchange)",
        backends: FLOAT,
        params: &["family", "n", "q", "perturb"],
        default_tol: 1e-9,
        default_samples: 15,
    },
    SuiteInfo {
        name: "unitarity",
        command: "verify",
        identity: "R(u, λ) R^{21}(-u, λ) = 1 for spectral families",
        backends: FLOAT,
        params: &["family", "n", "tau", "gamma", "perturb"],
        default_tol: 1e-8,
        default_samples: 10,
    },
    SuiteInfo {
        name: "closedness",
        command: "gauge",
        identity: "multiplicative 2-forms built from a potential satisfy the closedness identity",
        backends: FLOAT,
        params: &["n", "gamma", "form"],
        default_tol: 1e-12,
        default_samples: 10,
    },
    SuiteInfo {
        name: "gauge",
        command: "gauge",
        identity: "exact twists, permutations, shifts and scalars map QDYBE solutions to solutions",
        backends: FLOAT,
        params: &["family", "n", "q", "plan", "form"],
        default_tol: 1e-9,
        default_samples: 15,
    },
    SuiteInfo {
        name: "cdybe",
        command: "classical",
        identity: "classical dynamical Yang-Baxter equation Σ x_i^{(1)} ∂r^{23}/∂x_i - ... + [r^{12}, r^{13}] + ... = 0",
        backends: FLOAT,
        params: &["family", "n", "deriv", "perturb"],
        default_tol: 1e-7,
        default_samples: 10,
    },
    SuiteInfo {
        name: "cdybe-spectral",
        command: "classical",
        identity: "classical dynamical Yang-Baxter equation with spectral parameter",
        backends: FLOAT,
        params: &["family", "n", "tau", "perturb"],
        default_tol: 1e-6,
        default_samples: 5,
    },
    SuiteInfo {
        name: "coupling",
        command: "classical",
        identity: "r + r^{21} = εΩ with ε = 0 (rational, elliptic) and ε = 1 (trigonometric)",
        backends: FLOAT,
        params: &["family", "n", "tau", "perturb"],
        default_tol: 1e-10,
        default_samples: 6,
    },
    SuiteInfo {
        name: "residue",
        command: "classical",
        identity: "the elliptic classical r-matrix has residue Ω at u = 0",
        backends: FLOAT,
        params: &["n", "tau", "perturb"],
        default_tol: 1e-5,
        default_samples: 3,
    },
    SuiteInfo {
        name: "limits",
        command: "limits",
        identity: "(1 - R(λ/ħ))/ħ -> r(λ) with empirical order at least 0.9",
        backends: FLOAT,
        params: &["family", "n", "tau", "hbar", "min-order"],
        default_tol: 1e-3,
        default_samples: 1,
    },
    SuiteInfo {
        name: "abrr",
        command: "fusion",
        identity: "fusion operators solve the ABRR equation; the classical closed form agrees",
        backends: EXACT,
        params: &["modules", "q", "lambda", "perturb"],
        default_tol: 0.0,
        default_samples: 5,
    },
    SuiteInfo {
        name: "cross-oracle",
        command: "fusion",
        identity: "fusion operators from intertwiner expectation values equal the ABRR and universal solutions",
        backends: EXACT,
        params: &["modules", "q", "lambda", "perturb"],
        default_tol: 0.0,
        default_samples: 5,
    },
    SuiteInfo {
        name: "exchange",
        command: "fusion",
        identity: "exchange operators R_VV(λ) solve QDYBE; on the vector module they match the closed form",
        backends: EXACT,
        params: &["modules", "q", "lambda", "perturb"],
        default_tol: 0.0,
        default_samples: 5,
    },
    SuiteInfo {
        name: "twist",
        command: "fusion",
        identity: "J^{12,3}(λ) J^{12}(λ-h^{(3)}) = J^{1,23}(λ) J^{23}(λ)",
        backends: EXACT,
        params: &["modules", "q", "lambda", "control"],
        default_tol: 0.0,
        default_samples: 5,
    },
    SuiteInfo {
        name: "eigen",
        command: "trace",
        identity: "D_W F_V(λ, μ) = χ_W(q^{-2μ}) F_V(λ, μ) coefficient-wise",
        backends: EXACT,
        params: &["V", "W", "q", "s", "order", "control"],
        default_tol: 0.0,
        default_samples: 1,
    },
    SuiteInfo {
        name: "commute",
        command: "trace",
        identity: "D_{W1} D_{W2} = D_{W2} D_{W1} and D_{W1⊗W1} = D_{W1}^2 on truncated series",
        backends: EXACT,
        params: &["V", "W", "q", "s", "order", "perturb"],
        default_tol: 0.0,
        default_samples: 1,
    },
    SuiteInfo {
        name: "symmetry",
        command: "trace",
        identity: "F_V(λ, μ) = F_V(μ, λ) for self-dual V inside |x| <= 1/4",
        backends: FLOAT,
        params: &["V", "q", "order", "perturb"],
        default_tol: 1e-6,
        default_samples: 5,
    },
];

pub fn list_suites() -> &'static [SuiteInfo] {
    SUITES
}

pub fn suite_info(name: &str) -> Result<&'static SuiteInfo> {
    SUITES
        .iter()
        .find(|s| s.name == name)
        .ok_or_else(|| DynError::Config(format!("unknown suite {name:?}")))
}

/// Parameter lookup that records the resolved value of every key it serves.
struct Params<'a> {
    raw: &'a BTreeMap<String, String>,
    resolved: RefCell<BTreeMap<String, String>>,
}

impl<'a> Params<'a> {
    fn new(info: &SuiteInfo, raw: &'a BTreeMap<String, String>) -> Result<Self> {
        if let Some(k) = raw.keys().find(|k| !info.params.contains(&k.as_str())) {
            return Err(DynError::Config(format!(
                "suite {} does not take parameter {k:?} (accepted: {})",
                info.name,
                info.params.join(", ")
            )));
        }
        Ok(Params {
            raw,
            resolved: RefCell::new(BTreeMap::new()),
        })
    }

    fn str(&self, key: &str, default: &str) -> String {
        let v = self.raw.get(key).cloned().unwrap_or_else(|| default.to_string());
        self.resolved.borrow_mut().insert(key.to_string(), v.clone());
        v
    }

    fn get<T: FromStr>(&self, key: &str, default: &str) -> Result<T> {
        let v = self.str(key, default);
        v.trim()
            .parse()
            .map_err(|_| DynError::Config(format!("invalid value {v:?} for {key}")))
    }

    fn list<T: FromStr>(&self, key: &str, default: &str) -> Result<Vec<T>> {
        let v = self.str(key, default);
        v.split(',')
            .map(|x| {
                x.trim()
                    .parse()
                    .map_err(|_| DynError::Config(format!("invalid entry {x:?} in {key}")))
            })
            .collect()
    }

    fn rational(&self, key: &str, default: &str) -> Result<Rational> {
        parse_rational(&self.str(key, default))
    }

    fn rationals(&self, key: &str, default: &str) -> Result<Vec<Rational>> {
        self.str(key, default).split(',').map(parse_rational).collect()
    }
}

/// `"3/7"`, `"-2"` or a terminating decimal such as `"0.25"`.
pub fn parse_rational(s: &str) -> Result<Rational> {
    let s = s.trim();
    let bad = || DynError::Config(format!("invalid rational {s:?}"));
    if let Ok(r) = Rational::from_str(s) {
        return Ok(r);
    }
    let (int, frac) = s.split_once('.').ok_or_else(bad)?;
    if frac.is_empty() || !frac.chars().all(|c| c.is_ascii_digit()) || frac.len() > 18 {
        return Err(bad());
    }
    let den = 10i64.pow(frac.len() as u32);
    let whole = format!("{int}{frac}");
    let num = Rational::from_str(&whole).map_err(|_| bad())?;
    Ok(num * Rational::from_ratio(1, den))
}

fn c(x: f64) -> C64 {
    C64::new(x, 0.0)
}

struct Run<'a> {
    p: Params<'a>,
    samples: usize,
    seed: u64,
    tol: f64,
}

impl Run<'_> {
    fn sample_cfg(&self) -> SampleConfig {
        SampleConfig::new(self.samples, self.seed, self.tol)
    }

    fn perturb(&self) -> Result<f64> {
        self.p.get("perturb", "0")
    }
}

/// Runs one suite. Configuration errors, resonances and unknown names are `Err`.
pub fn run_suite(cfg: &SuiteConfig) -> Result<SuiteReport> {
    let info = suite_info(&cfg.suite)?;
    let backend = cfg.backend.unwrap_or(info.backends[0]);
    if !info.backends.contains(&backend) {
        return Err(DynError::Config(format!(
            "suite {} does not support the {backend} backend",
            info.name
        )));
    }
    let run = Run {
        p: Params::new(info, &cfg.params)?,
        samples: cfg.samples.unwrap_or(info.default_samples),
        seed: cfg.seed.unwrap_or(DEFAULT_SEED),
        tol: cfg.tol.unwrap_or(info.default_tol),
    };
    if run.samples == 0 {
        return Err(DynError::NoSamples(0));
    }
    let reports = match info.name {
        "qdybe" => suite_qdybe(&run)?,
        "qdybe-spectral" => suite_qdybe_spectral(&run)?,
        "hecke" => suite_hecke(&run)?,
        "unitarity" => suite_unitarity(&run)?,
        "closedness" => suite_closedness(&run)?,
        "gauge" => suite_gauge(&run)?,
        "cdybe" => suite_cdybe(&run)?,
        "cdybe-spectral" => suite_cdybe_spectral(&run)?,
        "coupling" => suite_coupling(&run)?,
        "residue" => suite_residue(&run)?,
        "limits" => suite_limits(&run)?,
        "abrr" => suite_abrr(&run)?,
        "cross-oracle" => suite_cross_oracle(&run)?,
        "exchange" => suite_exchange(&run)?,
        "twist" => suite_twist(&run)?,
        "eigen" => suite_eigen(&run)?,
        "commute" => suite_commute(&run)?,
        "symmetry" => suite_symmetry(&run)?,
        other => return Err(DynError::Config(format!("suite {other} has no runner"))),
    };
    let residual_max = reports.iter().map(|r| r.residual_max).fold(0.0, f64::max);
    let mut means: Vec<f64> = reports.iter().map(|r| r.residual_mean).collect();
    means.sort_by(f64::total_cmp);
    let residual_mean = means.iter().sum::<f64>() / means.len().max(1) as f64;
    let pass = !reports.is_empty() && reports.iter().all(|r| r.pass);
    let params = run.p.resolved.into_inner();
    Ok(SuiteReport {
        suite: info.name.to_string(),
        params,
        samples: reports.iter().map(|r| r.samples).sum(),
        seed: run.seed,
        residual_max,
        residual_mean,
        tol: run.tol,
        pass,
        backend,
        version: VERSION.to_string(),
        reports,
    })
}

fn perturbed_plain(op: DynamicalOperator, eps: f64) -> DynamicalOperator {
    if eps == 0.0 {
        return op;
    }
    let inner = op.clone();
    op.with_eval(format!("{} (perturbed)", op.label), move |l| {
        let mut m = inner.eval(l)?;
        m[(1, 2)] += eps;
        Ok(m)
    })
}

fn perturbed_spectral(op: SpectralDynamicalOperator, eps: f64) -> SpectralDynamicalOperator {
    if eps == 0.0 {
        return op;
    }
    let inner = op.clone();
    op.with_eval(format!("{} (perturbed)", op.label), move |u, l| {
        let mut m = inner.eval(u, l)?;
        m[(1, 2)] += eps;
        Ok(m)
    })
}

fn perturbed_classical(op: ClassicalDynOperator, eps: f64) -> ClassicalDynOperator {
    if eps == 0.0 {
        return op;
    }
    let inner = op.clone();
    ClassicalDynOperator::from_eval(
        format!("{} (perturbed)", op.label),
        op.data.clone(),
        op.spectral,
        move |u, l| {
            let mut m = inner.eval(u, l)?;
            m[(1, 2)] += eps;
            Ok(m)
        },
    )
    .with_poles(op.poles.clone(), op.u_poles.clone())
}

fn rescaled_classical(op: ClassicalDynOperator, eps: f64) -> ClassicalDynOperator {
    if eps == 0.0 {
        return op;
    }
    let inner = op.clone();
    ClassicalDynOperator::from_eval(
        format!("{} (rescaled)", op.label),
        op.data.clone(),
        op.spectral,
        move |u, l| Ok(inner.eval(u, l)?.scale(&c(1.0 + eps))),
    )
    .with_poles(op.poles.clone(), op.u_poles.clone())
}

fn elliptic_params(run: &Run) -> Result<EllipticParams> {
    let t: f64 = run.p.get("tau", "0.8")?;
    if t <= 0.0 {
        return Err(DynError::Config(
            "tau is the imaginary part of the modulus and must be positive".into(),
        ));
    }
    EllipticParams::new(C64::new(0.0, t))
}

fn sizes(run: &Run, default: &str) -> Result<Vec<usize>> {
    let ns: Vec<usize> = run.p.list("n", default)?;
    if ns.iter().any(|&n| n < 2) {
        return Err(DynError::Config("n must be at least 2".into()));
    }
    Ok(ns)
}

fn float_q(run: &Run) -> Result<f64> {
    let q: f64 = run.p.get("q", "0.5")?;
    if q <= 0.0 || q == 1.0 {
        return Err(DynError::Config("q must be positive and different from 1".into()));
    }
    Ok(q)
}

/// Exchange operators also accept the classical point `q = 1`.
fn exchange_q(run: &Run) -> Result<f64> {
    let q: f64 = run.p.get("q", "0.5")?;
    if q <= 0.0 {
        return Err(DynError::Config("q must be positive".into()));
    }
    Ok(q)
}

fn suite_qdybe(run: &Run) -> Result<Vec<ResidualReport>> {
    let family = run.p.str("family", "rational");
    let eps = run.perturb()?;
    let mut out = Vec::new();
    for n in sizes(run, "2,3")? {
        let op = match family.as_str() {
            "rational" => basic_rational(n)?,
            "trig" => basic_trigonometric(n, c(float_q(run)?))?,
            "exchange" => exchange_closed_form(n, c(exchange_q(run)?))?,
            f => {
                return Err(DynError::Config(format!(
                    "qdybe family must be rational|trig|exchange, got {f}"
                )))
            }
        };
        let op = perturbed_plain(op, eps);
        out.push(
            qdybe_residual(&op, c(1.0), &run.sample_cfg())?
                .with_param("n", n)
                .with_param("family", &family),
        );
    }
    Ok(out)
}

fn spectral_family(run: &Run, family: &str, n: usize, gamma: C64) -> Result<SpectralDynamicalOperator> {
    match family {
        "elliptic" => basic_elliptic(n, elliptic_params(run)?, gamma),
        "spectral-trig" => spectral_degenerate(WaveKind::Trig, n, gamma),
        "spectral-rational" => spectral_degenerate(WaveKind::Rational, n, gamma),
        f => Err(DynError::Config(format!(
            "spectral family must be elliptic|spectral-trig|spectral-rational, got {f}"
        ))),
    }
}

fn suite_qdybe_spectral(run: &Run) -> Result<Vec<ResidualReport>> {
    let family = run.p.str("family", "elliptic");
    let gamma = c(run.p.get("gamma", "0.23")?);
    let eps = run.perturb()?;
    let mut out = Vec::new();
    for n in sizes(run, "2,3")? {
        let op = perturbed_spectral(spectral_family(run, &family, n, gamma)?, eps);
        out.push(
            qdybe_spectral_residual(&op, gamma, &run.sample_cfg())?
                .with_param("n", n)
                .with_param("family", &family),
        );
    }
    Ok(out)
}

fn suite_hecke(run: &Run) -> Result<Vec<ResidualReport>> {
    let family = run.p.str("family", "rational");
    let eps = run.perturb()?;
    let mut out = Vec::new();
    for n in sizes(run, "2,3")? {
        let (op, p) = match family.as_str() {
            "rational" => (basic_rational(n)?, c(1.0)),
            "trig" => {
                let q = float_q(run)?;
                (basic_trigonometric(n, c(q))?, c(q))
            }
            "exchange" => {
                let q = exchange_q(run)?;
                (assemble_plain(&exchange_closed_form_table(n, c(q))?), c(q).powi(-2))
            }
            f => {
                return Err(DynError::Config(format!(
                    "hecke family must be rational|trig|exchange, got {f}"
                )))
            }
        };
        let op = perturbed_plain(op, eps);
        out.push(
            hecke_check(&op, p, &run.sample_cfg())?
                .with_param("n", n)
                .with_param("hecke_parameter", p.re),
        );
    }
    Ok(out)
}

fn suite_unitarity(run: &Run) -> Result<Vec<ResidualReport>> {
    let family = run.p.str("family", "elliptic");
    let gamma = c(run.p.get("gamma", "0.23")?);
    let eps = run.perturb()?;
    let mut out = Vec::new();
    for n in sizes(run, "2")? {
        let op = perturbed_spectral(spectral_family(run, &family, n, gamma)?, eps);
        out.push(
            unitarity_check(&op, &run.sample_cfg())?
                .with_param("n", n)
                .with_param("family", &family),
        );
    }
    Ok(out)
}

fn default_potential(n: usize) -> impl Fn(usize, &[C64]) -> C64 + Send + Sync + Clone {
    move |a: usize, l: &[C64]| {
        let mut v = c(0.1 * (a as f64 + 1.0));
        for (i, x) in l.iter().enumerate().take(n) {
            v += 0.05 * ((i + a) as f64 - 0.5) * x + 0.02 * (1.0 - i as f64) * x * x;
        }
        v.exp()
    }
}

fn non_closed_form(n: usize) -> Result<MultiplicativeTwoForm> {
    if n < 3 {
        return Err(DynError::Config("a non-closed 2-form needs n >= 3".into()));
    }
    Ok(MultiplicativeTwoForm::from_upper(n, |a, b, l| {
        if (a, b) == (0, 1) {
            l[2].exp()
        } else {
            c(1.0)
        }
    }))
}

fn twist_form(run: &Run, n: usize, gamma: C64) -> Result<MultiplicativeTwoForm> {
    match run.p.str("form", "exact").as_str() {
        "exact" => Ok(exact_from_potential(n, default_potential(n), gamma)),
        "non-closed" => non_closed_form(n),
        f => Err(DynError::Config(format!("form must be exact|non-closed, got {f}"))),
    }
}

fn suite_closedness(run: &Run) -> Result<Vec<ResidualReport>> {
    let gamma = c(run.p.get("gamma", "0.37")?);
    let mut out = Vec::new();
    for n in sizes(run, "3")? {
        let f = twist_form(run, n, gamma)?;
        out.push(is_closed(&f, gamma, &run.sample_cfg())?.with_param("n", n));
    }
    Ok(out)
}

fn suite_gauge(run: &Run) -> Result<Vec<ResidualReport>> {
    let family = run.p.str("family", "rational");
    let plan_json = run.p.str("plan", "");
    let mut out = Vec::new();
    for n in sizes(run, "3")? {
        let table = match family.as_str() {
            "rational" => basic_rational_table(n)?,
            "trig" => basic_trigonometric_table(n, c(float_q(run)?))?,
            f => return Err(DynError::Config(format!("gauge family must be rational|trig, got {f}"))),
        };
        let plan = if plan_json.is_empty() {
            let shift = (0..n).map(|i| c(0.3 - 0.7 * i as f64)).collect();
            QuantumGaugePlan::identity()
                .with_form(twist_form(run, n, c(1.0))?)
                .with_shift(shift)
                .with_constant(c(-2.5))
        } else {
            QuantumPlanSpec::parse(&plan_json)?.build(n, c(1.0))?
        };
        let g = apply_quantum(&table, &plan)?;
        out.push(qdybe_residual(&assemble_plain(&g), c(1.0), &run.sample_cfg())?.with_param("n", n));
    }
    Ok(out)
}

fn classical_family(run: &Run, family: &str, n: usize) -> Result<ClassicalDynOperator> {
    match family {
        "c-rational" => classical_rational(n),
        "c-trig" => classical_trig(n),
        "c-elliptic" => classical_elliptic(n, elliptic_params(run)?),
        "c-spectral-trig" => classical_wave(WaveKind::Trig, n, None),
        "c-spectral-rational" => classical_wave(WaveKind::Rational, n, None),
        f => Err(DynError::Config(format!("unknown classical family {f}"))),
    }
}

fn suite_cdybe(run: &Run) -> Result<Vec<ResidualReport>> {
    let family = run.p.str("family", "c-rational");
    if !matches!(family.as_str(), "c-rational" | "c-trig") {
        return Err(DynError::Config(format!(
            "cdybe family must be c-rational|c-trig, got {family}"
        )));
    }
    let deriv: Derivative = run.p.get("deriv", "fd")?;
    let eps = run.perturb()?;
    let mut out = Vec::new();
    for n in sizes(run, "2,3")? {
        let r = perturbed_classical(classical_family(run, &family, n)?, eps);
        let cfg = classical_sample_config(run.samples, run.seed, run.tol);
        let rational_n = (family == "c-rational").then_some(n);
        out.push(
            cdybe_residual_with(&r, &cfg, deriv, rational_n)?
                .with_param("n", n)
                .with_param("family", &family),
        );
    }
    Ok(out)
}

fn suite_cdybe_spectral(run: &Run) -> Result<Vec<ResidualReport>> {
    let family = run.p.str("family", "c-elliptic");
    if !matches!(
        family.as_str(),
        "c-elliptic" | "c-spectral-trig" | "c-spectral-rational"
    ) {
        return Err(DynError::Config(format!(
            "spectral cdybe family must be c-elliptic|c-spectral-trig|c-spectral-rational, got {family}"
        )));
    }
    let eps = run.perturb()?;
    let mut out = Vec::new();
    for n in sizes(run, "2")? {
        let r = perturbed_classical(classical_family(run, &family, n)?, eps);
        let cfg = classical_sample_config(run.samples, run.seed, run.tol);
        out.push(
            cdybe_spectral_residual(&r, &cfg)?
                .with_param("n", n)
                .with_param("family", &family),
        );
    }
    Ok(out)
}

fn suite_coupling(run: &Run) -> Result<Vec<ResidualReport>> {
    let family = run.p.str("family", "c-trig");
    let eps = run.perturb()?;
    let (expected, u) = match family.as_str() {
        "c-rational" => (0.0, None),
        "c-trig" => (1.0, None),
        "c-elliptic" => (0.0, Some(C64::new(0.37, 0.05))),
        f => {
            return Err(DynError::Config(format!(
                "coupling family must be c-rational|c-trig|c-elliptic, got {f}"
            )))
        }
    };
    let mut out = Vec::new();
    for n in sizes(run, "2,3")? {
        let r = perturbed_classical(classical_family(run, &family, n)?, eps);
        let cfg = classical_sample_config(run.samples, run.seed, run.tol);
        let fit = coupling_fit(&r, u, &cfg)?;
        let residual = fit.defect.max((fit.epsilon - c(expected)).norm());
        out.push(
            ResidualReport::from_residuals("coupling", &[residual], run.seed, run.tol, "float")?
                .with_param("n", n)
                .with_param("epsilon", format!("{:.12}", fit.epsilon.re))
                .with_param("expected_epsilon", expected)
                .with_param("defect", format!("{:e}", fit.defect)),
        );
    }
    Ok(out)
}

fn suite_residue(run: &Run) -> Result<Vec<ResidualReport>> {
    let eps = run.perturb()?;
    let mut out = Vec::new();
    for n in sizes(run, "2,3")? {
        let r = rescaled_classical(classical_elliptic(n, elliptic_params(run)?)?, eps);
        let mut rng = SampleConfig::new(run.samples, run.seed, run.tol).rng();
        let mut res = Vec::new();
        for _ in 0..run.samples {
            let lam = loop {
                let l: Vec<f64> = (0..n).map(|_| rng.random_range(-0.5..0.5)).collect();
                let far = (0..n).all(|a| (a + 1..n).all(|b| (l[a] - l[b]).abs() > 0.1));
                if far {
                    break l;
                }
            };
            let lam: Vec<C64> = lam.into_iter().map(c).collect();
            let est = residue_at_zero(&r, &lam, 1e-3, 5e-4)?;
            res.push(est.defect.max((est.epsilon - c(1.0)).norm()));
        }
        out.push(ResidualReport::from_residuals("residue", &res, run.seed, run.tol, "float")?.with_param("n", n));
    }
    Ok(out)
}

fn limit_lambda(n: usize) -> Vec<C64> {
    match n {
        2 => vec![c(0.4), c(-0.4)],
        3 => vec![c(0.7), c(-0.2), c(-0.5)],
        _ => (0..n).map(|a| c(0.7 - 0.45 * a as f64)).collect(),
    }
}

fn suite_limits(run: &Run) -> Result<Vec<ResidualReport>> {
    let family = run.p.str("family", "trig");
    let hbar: Vec<f64> = run.p.list("hbar", "0.01,0.005,0.0025")?;
    let min_order: f64 = run.p.get("min-order", "0.9")?;
    let mut out = Vec::new();
    for n in sizes(run, if family == "elliptic" { "2" } else { "2,3" })? {
        let fam = match family.as_str() {
            "rational" => LimitFamily::Rational,
            "trig" => LimitFamily::Trig,
            "elliptic" => LimitFamily::Elliptic {
                p: elliptic_params(run)?,
                u: C64::new(0.3, 0.05),
            },
            f => {
                return Err(DynError::Config(format!(
                    "limit family must be rational|trig|elliptic, got {f}"
                )))
            }
        };
        let cert = classical_limit(fam, n, &limit_lambda(n), &hbar)?;
        let deficit = (min_order - cert.order).max(0.0);
        let orders: Vec<String> = cert.orders.iter().map(|o| format!("{o:.4}")).collect();
        let errors: Vec<String> = cert.errors.iter().map(|e| format!("{e:.3e}")).collect();
        out.push(
            ResidualReport::from_residuals("limit-order", &[deficit], run.seed, 0.0, "float")?
                .with_param("n", n)
                .with_param("family", &family)
                .with_param("order", format!("{:.4}", cert.order))
                .with_param("orders", orders.join(","))
                .with_param("errors", errors.join(",")),
        );
        out.push(
            ResidualReport::from_residuals(
                "limit-extrapolation",
                &[cert.extrapolated_error],
                run.seed,
                run.tol,
                "float",
            )?
            .with_param("n", n)
            .with_param("family", &family),
        );
    }
    Ok(out)
}

fn exact_alg(run: &Run) -> Result<RankOne<Rational>> {
    match run.p.str("q", "1/2").as_str() {
        "classical" | "1" => Ok(RankOne::Classical),
        s => RankOne::quantum(parse_rational(s)?),
    }
}

fn modules(run: &Run, alg: &RankOne<Rational>, default: &str) -> Result<Vec<Module<Rational>>> {
    run.p
        .list::<u32>("modules", default)?
        .into_iter()
        .map(|m| fd_module(alg, m))
        .collect()
}

const DEFAULT_LAMBDAS: &str = "3/7,-5/11,13/4,2/9,-17/6";

fn lambdas(run: &Run) -> Result<Vec<Rational>> {
    let mut l = run.p.rationals("lambda", DEFAULT_LAMBDAS)?;
    l.truncate(run.samples);
    Ok(l)
}

fn perturb_exact(run: &Run) -> Result<Rational> {
    run.p.rational("perturb", "0")
}

fn bump(m: &Matrix<Rational>, eps: &Rational) -> Matrix<Rational> {
    let mut out = m.clone();
    if !Scalar::is_zero(eps) {
        let (r, k) = (out.rows() - 1, 0);
        out[(r, k)] = out[(r, k)].clone() + eps.clone();
    }
    out
}

fn exact_report(identity: &str, res: &[f64], run: &Run) -> Result<ResidualReport> {
    ResidualReport::from_residuals(identity, res, run.seed, run.tol, "exact")
}

fn pair(mods: &[Module<Rational>]) -> Result<(&Module<Rational>, &Module<Rational>)> {
    match mods {
        [w, v] => Ok((w, v)),
        _ => Err(DynError::Config(
            "fusion checks take two modules, e.g. modules=1,2".into(),
        )),
    }
}

fn alg_label(alg: &RankOne<Rational>) -> String {
    match alg {
        RankOne::Classical => "classical".into(),
        RankOne::Quantum { q } => q.to_string(),
    }
}

fn suite_abrr(run: &Run) -> Result<Vec<ResidualReport>> {
    let alg = exact_alg(run)?;
    let mods = modules(run, &alg, "1,1")?;
    let (w, v) = pair(&mods)?;
    let eps = perturb_exact(run)?;
    let lams = lambdas(run)?;
    let mut res = Vec::new();
    let mut closed = Vec::new();
    for lam in &lams {
        let j = bump(&abrr_solve(&alg, w, v, lam)?, &eps);
        res.push(abrr_defect(&alg, w, v, lam, &j)?);
        if alg.is_classical() {
            closed.push((&closed_form_j(w, v, lam)? - &j).max_abs());
        }
    }
    let mut out = vec![exact_report("abrr", &res, run)?
        .with_param("modules", format!("{},{}", w.label, v.label))
        .with_param("q", alg_label(&alg))];
    if alg.is_classical() {
        out.push(exact_report("abrr-closed-form", &closed, run)?);
    }
    Ok(out)
}

fn suite_cross_oracle(run: &Run) -> Result<Vec<ResidualReport>> {
    let alg = exact_alg(run)?;
    let mods = modules(run, &alg, "1,2")?;
    let (w, v) = pair(&mods)?;
    let eps = perturb_exact(run)?;
    let mut inter = Vec::new();
    let mut univ = Vec::new();
    for lam in &lambdas(run)? {
        let a = abrr_solve(&alg, w, v, lam)?;
        let b = bump(&fusion_via_intertwiners(&alg, w, v, lam)?, &eps);
        inter.push((&a - &b).max_abs());
        univ.push((&a - &universal_j(&alg, w, v, lam)?).max_abs());
    }
    Ok(vec![
        exact_report("intertwiners-vs-abrr", &inter, run)?
            .with_param("modules", format!("{},{}", w.label, v.label))
            .with_param("q", alg_label(&alg)),
        exact_report("universal-vs-abrr", &univ, run)?,
    ])
}

fn suite_exchange(run: &Run) -> Result<Vec<ResidualReport>> {
    let alg = exact_alg(run)?;
    let ms: Vec<u32> = run.p.list("modules", "1")?;
    let eps = perturb_exact(run)?;
    let lams = lambdas(run)?;
    let mut out = Vec::new();
    for m in ms {
        let v = fd_module(&alg, m)?;
        let space = v.space();
        let mut res = Vec::new();
        for lam in &lams {
            let d = qdybe_defect_with(
                |l: &Rational| Ok(bump(&exchange(&alg, &v, &v, l)?.matrix, &eps)),
                lam,
                &space,
                |l: &Rational, wt: &Vec<i64>| alg.shift_lam(l, -wt[0]),
            )?;
            res.push(d.max_abs());
        }
        out.push(
            exact_report("exchange-qdybe", &res, run)?
                .with_param("module", &v.label)
                .with_param("q", alg_label(&alg)),
        );
        if m == 1 {
            out.push(exchange_vs_closed_form(&alg, run)?);
        }
    }
    Ok(out)
}

/// Fusion-built `R_{L1 L1}` times `q^{1/2}` against the closed form at `λ = (l, 0)`, `t = q^l`.
fn exchange_vs_closed_form(alg: &RankOne<Rational>, run: &Run) -> Result<ResidualReport> {
    let qf = alg.q().map(rational_to_f64).unwrap_or(1.0);
    let falg = if alg.is_classical() {
        RankOne::Classical
    } else {
        RankOne::quantum(c(qf))?
    };
    let v = fd_module(&falg, 1)?;
    let closed = exchange_closed_form(2, c(qf))?;
    let mut res = Vec::new();
    for l in [0.37, 1.3, -0.8, 2.45, -1.9] {
        let coord = if alg.is_classical() { c(l) } else { c(qf.powf(l)) };
        let r = exchange(&falg, &v, &v, &coord)?;
        let got = if r.half {
            r.matrix.scale(&c(qf.sqrt()))
        } else {
            r.matrix
        };
        let want = closed.eval(&[c(l), c(0.0)])?;
        res.push(got.max_abs_diff(&want));
    }
    Ok(
        ResidualReport::from_residuals("exchange-vs-closed-form", &res, run.seed, 1e-12, "float")?
            .with_param("grid", "l in {0.37,1.3,-0.8,2.45,-1.9}, λ = (l, 0)"),
    )
}

fn suite_twist(run: &Run) -> Result<Vec<ResidualReport>> {
    let alg = exact_alg(run)?;
    let mods = modules(run, &alg, "1,1,2")?;
    let [a, b, cc] = &mods[..] else {
        return Err(DynError::Config(
            "twist check takes three modules, e.g. modules=1,1,2".into(),
        ));
    };
    let control = run.p.str("control", "none");
    let mut res = Vec::new();
    for lam in &lambdas(run)? {
        let d = match control.as_str() {
            "none" => twist_defect(&alg, a, b, cc, lam)?,
            "static" => static_twist_defect(&alg, a, b, cc, lam)?,
            f => return Err(DynError::Config(format!("twist control must be none|static, got {f}"))),
        };
        res.push(d.max_abs());
    }
    Ok(vec![exact_report("twist", &res, run)?
        .with_param("modules", format!("{},{},{}", a.label, b.label, cc.label))
        .with_param("q", alg_label(&alg))])
}

fn trace_q(run: &Run) -> Result<Rational> {
    let q = run.p.rational("q", "1/2")?;
    if Scalar::is_zero(&q) || q == Rational::from_i64(1) || q == Rational::from_i64(-1) {
        return Err(DynError::Config("trace suites need q different from 0 and ±1".into()));
    }
    Ok(q)
}

fn trace_order(run: &Run) -> Result<usize> {
    let n: usize = run.p.get("order", "10")?;
    if n < 2 {
        return Err(DynError::Config("order must be at least 2".into()));
    }
    Ok(n)
}

fn even_module(run: &Run, alg: &RankOne<Rational>, default: &str) -> Result<Module<Rational>> {
    let m: u32 = run.p.get("V", default)?;
    if !m.is_multiple_of(2) {
        return Err(DynError::Config(format!(
            "V = L_{m} has no zero weight; use an even highest weight"
        )));
    }
    fd_module(alg, m)
}

fn suite_eigen(run: &Run) -> Result<Vec<ResidualReport>> {
    let q = trace_q(run)?;
    let alg = RankOne::quantum(q.clone())?;
    let v = even_module(run, &alg, "2")?;
    let s = run.p.rational("s", "3/7")?;
    let order = trace_order(run)?;
    let norm = match run.p.str("control", "none").as_str() {
        "none" => TraceNormalization::default(),
        "drop-weyl" => TraceNormalization {
            weyl_denominator: false,
            q_operator: true,
        },
        "drop-q" => TraceNormalization {
            weyl_denominator: true,
            q_operator: false,
        },
        f => {
            return Err(DynError::Config(format!(
                "eigen control must be none|drop-weyl|drop-q, got {f}"
            )))
        }
    };
    let mut out = Vec::new();
    for wm in run.p.list::<u32>("W", "1,2")? {
        let w = fd_module(&alg, wm)?;
        let mut r = eigen_check_with(&q, &v, &w, &s, order, norm)?;
        r.tol = run.tol;
        r.pass = r.residual_max <= run.tol;
        out.push(r.with_param("character", character(&w, &s)?));
    }
    Ok(out)
}

fn suite_commute(run: &Run) -> Result<Vec<ResidualReport>> {
    let q = trace_q(run)?;
    let alg = RankOne::quantum(q.clone())?;
    let v = even_module(run, &alg, "2")?;
    let s = run.p.rational("s", "3/7")?;
    let order = trace_order(run)?;
    let ws: Vec<u32> = run.p.list("W", "1,2")?;
    let [m1, m2] = ws[..] else {
        return Err(DynError::Config("commute takes two modules, e.g. W=1,2".into()));
    };
    let eps = perturb_exact(run)?;
    let (w1, w2) = (fd_module(&alg, m1)?, fd_module(&alg, m2)?);
    let prec = 4 * order + 8;
    let mut d1 = macdonald_op(&q, &w1, &v, prec)?;
    let d2 = macdonald_op(&q, &w2, &v, prec)?;
    if !Scalar::is_zero(&eps) {
        let a = &mut d1.terms[0].1;
        *a = a.clone() + LaurentSeries::monomial(eps.clone(), 2, prec as i64);
    }
    let comm = operator_commutator(&d1, &d2, &s, order.min(8))?;
    let mut out = vec![exact_report("commutator", &comm, run)?
        .with_param("W1", &w1.label)
        .with_param("W2", &w2.label)
        .with_param("V", &v.label)];
    let mut t = tensor_product_check(&q, &w1, &w1, &v, &s, order.min(8))?;
    t.tol = run.tol;
    t.pass = t.residual_max <= run.tol;
    out.push(t);
    Ok(out)
}

fn suite_symmetry(run: &Run) -> Result<Vec<ResidualReport>> {
    let m: u32 = run.p.get("V", "2")?;
    if !m.is_multiple_of(2) {
        return Err(DynError::Config("symmetry needs V = L_{2k}".into()));
    }
    let q = float_q(run)?;
    let order: usize = run.p.get("order", "12")?;
    let eps = run.perturb()?;
    Ok(vec![symmetry_check_with(m / 2, q, order, &run.sample_cfg(), eps)?])
}
