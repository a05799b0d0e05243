//! `sl_n` structure data, classical dynamical r-matrices, CDYBE residuals,
//! coupling constants and classical limits of the quantum families.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use serde::Serialize;

use crate::error::{DynError, Result};
use crate::matrix::Matrix;
use crate::rmatrix::{basic_elliptic, basic_rational, basic_trigonometric};
use crate::scalar::{rat, Rational, Scalar, C64};
use crate::specfun::{wave, wave_d, EllipticParams, WaveKind};
use crate::tensorcore::{embed_matrix, embed_single, opposite, PoleHyperplane, WeightVectorSpace};
use crate::verify::{sample_lambda, sample_spectral, shift_set, ResidualReport, SampleConfig};

fn c(x: f64) -> C64 {
    C64::new(x, 0.0)
}

/// Matrix unit `E_ab` of size `n`.
pub fn unit<S: Scalar>(n: usize, a: usize, b: usize) -> Matrix<S> {
    let mut m = Matrix::zeros(n, n);
    m[(a, b)] = S::one();
    m
}

/// `a∧b := a⊗b - b⊗a`.
pub fn wedge<S: Scalar>(a: &Matrix<S>, b: &Matrix<S>) -> Matrix<S> {
    &a.kron(b) - &b.kron(a)
}

#[derive(Clone, Debug)]
pub struct SimpleLieData {
    pub n: usize,
    /// Orthonormal Cartan basis `x_i`, `Tr(x_i x_j) = δ_ij`.
    pub cartan: Vec<Matrix<C64>>,
    /// Roots `α = ε_a - ε_b` stored as `(a, b)` with root vector `E_ab`.
    pub roots: Vec<(usize, usize)>,
    pub omega: Matrix<C64>,
    pub rho: Vec<f64>,
}

impl SimpleLieData {
    pub fn new(n: usize) -> Result<Self> {
        if n < 2 {
            return Err(DynError::Config(format!("sl_n needs n ≥ 2, got {n}")));
        }
        let mut cartan: Vec<Vec<f64>> = Vec::new();
        for k in 0..n - 1 {
            let mut v = vec![0.0; n];
            v[k] = 1.0;
            v[k + 1] = -1.0;
            for x in &cartan {
                let dot: f64 = x.iter().zip(&v).map(|(a, b)| a * b).sum();
                for (vi, xi) in v.iter_mut().zip(x) {
                    *vi -= dot * xi;
                }
            }
            let norm = v.iter().map(|a| a * a).sum::<f64>().sqrt();
            cartan.push(v.iter().map(|a| a / norm).collect());
        }
        let cartan: Vec<Matrix<C64>> = cartan
            .iter()
            .map(|d| Matrix::diagonal(&d.iter().map(|&x| c(x)).collect::<Vec<_>>()))
            .collect();
        let mut roots = Vec::new();
        for a in 0..n {
            for b in 0..n {
                if a != b {
                    roots.push((a, b));
                }
            }
        }
        let omega = Self::omega_exact_n(n).map(|r| c(crate::scalar::rational_to_f64(r)));
        let rho = (0..n).map(|a| (n as f64 - 1.0) / 2.0 - a as f64).collect();
        Ok(SimpleLieData {
            n,
            cartan,
            roots,
            omega,
            rho,
        })
    }

    /// `Ω` in exact arithmetic: `Σ_a E_aa⊗E_aa - (1/n) 1⊗1 + Σ_{a≠b} E_ab⊗E_ba`.
    pub fn omega_exact(&self) -> Matrix<Rational> {
        Self::omega_exact_n(self.n)
    }

    fn omega_exact_n(n: usize) -> Matrix<Rational> {
        let id = Matrix::<Rational>::identity(n);
        let mut o = id.kron(&id).scale(&rat(-1, n as i64));
        for a in 0..n {
            for b in 0..n {
                o = &o + &unit::<Rational>(n, a, b).kron(&unit(n, b, a));
            }
        }
        o
    }

    /// Direction in λ-coordinates of the Cartan element `x_i`.
    pub fn direction(&self, i: usize) -> Vec<f64> {
        (0..self.n).map(|k| self.cartan[i][(k, k)].re).collect()
    }

    pub fn root_vector(&self, a: usize, b: usize) -> Matrix<C64> {
        unit(self.n, a, b)
    }

    /// `Σ_i x_i ⊗ x_i`.
    pub fn cartan_casimir(&self) -> Matrix<C64> {
        let d = self.n * self.n;
        self.cartan.iter().fold(Matrix::zeros(d, d), |acc, x| &acc + &x.kron(x))
    }

    /// Positive roots `a < b`.
    pub fn positive_roots(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.roots.iter().copied().filter(|(a, b)| a < b)
    }
}

pub fn sl_data(n: usize) -> Result<SimpleLieData> {
    SimpleLieData::new(n)
}

/// Cartan/root split `r = Σ S_ij x_i⊗x_j + Σ_α φ_α e_α⊗e_{-α}`.
#[derive(Clone, Debug, PartialEq)]
pub struct SplitValue {
    pub s: Vec<Vec<C64>>,
    pub phi: BTreeMap<(usize, usize), C64>,
}

pub type SplitEval = Arc<dyn Fn(C64, &[C64]) -> Result<SplitValue> + Send + Sync>;
pub type ClassicalEval = Arc<dyn Fn(C64, &[C64]) -> Result<Matrix<C64>> + Send + Sync>;

/// `λ ↦ r(λ)` (or `(u, λ) ↦ r(u, λ)`) in the defining representation of `sl_n`.
#[derive(Clone)]
pub struct ClassicalDynOperator {
    pub label: String,
    pub data: Arc<SimpleLieData>,
    pub spectral: bool,
    pub poles: Vec<PoleHyperplane>,
    pub u_poles: Vec<PoleHyperplane>,
    eval: ClassicalEval,
    split: Option<SplitEval>,
}

impl fmt::Debug for ClassicalDynOperator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ClassicalDynOperator")
            .field("label", &self.label)
            .field("n", &self.data.n)
            .field("spectral", &self.spectral)
            .field("split", &self.split.is_some())
            .finish_non_exhaustive()
    }
}

impl ClassicalDynOperator {
    pub fn from_eval(
        label: impl Into<String>,
        data: Arc<SimpleLieData>,
        spectral: bool,
        eval: impl Fn(C64, &[C64]) -> Result<Matrix<C64>> + Send + Sync + 'static,
    ) -> Self {
        ClassicalDynOperator {
            label: label.into(),
            data,
            spectral,
            poles: Vec::new(),
            u_poles: Vec::new(),
            eval: Arc::new(eval),
            split: None,
        }
    }

    /// Operator defined by its Cartan/root split.
    pub fn from_split(
        label: impl Into<String>,
        data: Arc<SimpleLieData>,
        spectral: bool,
        split: impl Fn(C64, &[C64]) -> Result<SplitValue> + Send + Sync + 'static,
    ) -> Self {
        let split: SplitEval = Arc::new(split);
        let (d2, sp) = (data.clone(), split.clone());
        ClassicalDynOperator {
            label: label.into(),
            data,
            spectral,
            poles: Vec::new(),
            u_poles: Vec::new(),
            eval: Arc::new(move |u, l| Ok(assemble_split(&d2, &sp(u, l)?))),
            split: Some(split),
        }
    }

    pub fn with_poles(mut self, poles: Vec<PoleHyperplane>, u_poles: Vec<PoleHyperplane>) -> Self {
        self.poles = poles;
        self.u_poles = u_poles;
        self
    }

    pub fn n(&self) -> usize {
        self.data.n
    }

    pub fn eval(&self, u: C64, lambda: &[C64]) -> Result<Matrix<C64>> {
        if lambda.len() != self.n() {
            return Err(DynError::Dimension(format!(
                "λ has {} coordinates, need {}",
                lambda.len(),
                self.n()
            )));
        }
        let m = (self.eval)(u, lambda)?;
        if !m.is_finite() {
            return Err(DynError::Pole(format!("{} at λ = {lambda:?}", self.label)));
        }
        Ok(m)
    }

    /// Non-spectral evaluation.
    pub fn at(&self, lambda: &[C64]) -> Result<Matrix<C64>> {
        self.eval(c(0.0), lambda)
    }

    pub fn split(&self, u: C64, lambda: &[C64]) -> Option<Result<SplitValue>> {
        self.split.as_ref().map(|s| s(u, lambda))
    }

    pub fn has_split(&self) -> bool {
        self.split.is_some()
    }
}

pub fn assemble_split(data: &SimpleLieData, v: &SplitValue) -> Matrix<C64> {
    let n = data.n;
    let mut r = Matrix::zeros(n * n, n * n);
    for (i, xi) in data.cartan.iter().enumerate() {
        for (j, xj) in data.cartan.iter().enumerate() {
            if v.s[i][j] != c(0.0) {
                r = &r + &xi.kron(xj).scale(&v.s[i][j]);
            }
        }
    }
    for (&(a, b), &p) in &v.phi {
        r[(a * n + b, b * n + a)] += p;
    }
    r
}

fn root_pairing(lambda: &[C64], a: usize, b: usize) -> C64 {
    lambda[a] - lambda[b]
}

fn root_poles(n: usize, period: Option<f64>) -> Vec<PoleHyperplane> {
    let mut out = Vec::new();
    for a in 0..n {
        for b in a + 1..n {
            out.push(PoleHyperplane::difference(n, a, b, 0.0, period));
        }
    }
    out
}

fn diag_s(k: usize, v: C64) -> Vec<Vec<C64>> {
    (0..k)
        .map(|i| (0..k).map(|j| if i == j { v } else { c(0.0) }).collect())
        .collect()
}

/// `r(λ) = Σ_{α>0} e_α∧e_{-α}/(λ,α)`; as a split, `φ_α = 1/(λ,α)` for every root.
pub fn classical_rational(n: usize) -> Result<ClassicalDynOperator> {
    let data = Arc::new(sl_data(n)?);
    let k = n - 1;
    let roots = data.roots.clone();
    Ok(
        ClassicalDynOperator::from_split("c-rational", data, false, move |_, l| {
            Ok(SplitValue {
                s: diag_s(k, c(0.0)),
                phi: roots
                    .iter()
                    .map(|&(a, b)| ((a, b), 1.0 / root_pairing(l, a, b)))
                    .collect(),
            })
        })
        .with_poles(root_poles(n, None), Vec::new()),
    )
}

/// Analytic `∂_d r` for [`classical_rational`]: coefficient `-(d,α)/(λ,α)²`.
pub fn classical_rational_derivative(n: usize, lambda: &[C64], d: &[f64]) -> Matrix<C64> {
    let mut r = Matrix::zeros(n * n, n * n);
    for a in 0..n {
        for b in 0..n {
            if a != b {
                let la = root_pairing(lambda, a, b);
                r[(a * n + b, b * n + a)] = -(d[a] - d[b]) / (la * la);
            }
        }
    }
    r
}

/// `r(λ) = Ω/2 + Σ_{α>0} (1/2) coth((λ,α)/2) e_α∧e_{-α}`.
pub fn classical_trig(n: usize) -> Result<ClassicalDynOperator> {
    let data = Arc::new(sl_data(n)?);
    let k = n - 1;
    let roots = data.roots.clone();
    Ok(ClassicalDynOperator::from_split("c-trig", data, false, move |_, l| {
        Ok(SplitValue {
            s: diag_s(k, c(0.5)),
            phi: roots
                .iter()
                .map(|&(a, b)| {
                    let x = root_pairing(l, a, b) / 2.0;
                    ((a, b), 0.5 + 0.5 * x.cosh() / x.sinh())
                })
                .collect(),
        })
    })
    .with_poles(root_poles(n, None), Vec::new()))
}

/// `r(u,λ) = (w'(u)/w(u)) Σ x_i⊗x_i + Σ_α w(u+(λ,α)) w'(0) / (w((λ,α)) w(u)) e_α⊗e_{-α}`
/// with `w = θ`, `sin` or the identity.
pub fn classical_wave(kind: WaveKind, n: usize, p: Option<EllipticParams>) -> Result<ClassicalDynOperator> {
    let data = Arc::new(sl_data(n)?);
    wave(kind, c(0.5), p.as_ref())?;
    let k = n - 1;
    let roots = data.roots.clone();
    let w = move |x: C64| wave(kind, x, p.as_ref()).expect("checked");
    let wd = move |x: C64| wave_d(kind, x, p.as_ref()).expect("checked");
    let wd0 = wd(c(0.0));
    let period = match kind {
        WaveKind::Elliptic => Some(1.0),
        WaveKind::Trig => Some(std::f64::consts::PI),
        WaveKind::Rational => None,
    };
    let label = match kind {
        WaveKind::Elliptic => "c-elliptic",
        WaveKind::Trig => "c-elliptic-sin",
        WaveKind::Rational => "c-elliptic-linear",
    };
    Ok(ClassicalDynOperator::from_split(label, data, true, move |u, l| {
        Ok(SplitValue {
            s: diag_s(k, wd(u) / w(u)),
            phi: roots
                .iter()
                .map(|&(a, b)| {
                    let la = root_pairing(l, a, b);
                    ((a, b), w(u + la) * wd0 / (w(la) * w(u)))
                })
                .collect(),
        })
    })
    .with_poles(
        root_poles(n, period),
        vec![PoleHyperplane {
            alpha: vec![1.0],
            offset: 0.0,
            period,
        }],
    ))
}

pub fn classical_elliptic(n: usize, p: EllipticParams) -> Result<ClassicalDynOperator> {
    classical_wave(WaveKind::Elliptic, n, Some(p))
}

/// How `∂r/∂x_i` is computed.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Derivative {
    /// Central differences with step `1e-5` and one Richardson step.
    Fd,
    /// Closed form; available for the rational family only.
    Analytic,
}

impl FromStr for Derivative {
    type Err = DynError;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "fd" => Ok(Derivative::Fd),
            "analytic" => Ok(Derivative::Analytic),
            _ => Err(DynError::Config(format!("unknown derivative mode {s:?}"))),
        }
    }
}

const FD_STEP: f64 = 1e-5;

/// Directional derivative of `f` at `λ` along `d`.
pub fn directional_fd(f: &dyn Fn(&[C64]) -> Result<Matrix<C64>>, lambda: &[C64], d: &[f64]) -> Result<Matrix<C64>> {
    let at = |h: f64| -> Result<Matrix<C64>> {
        let p: Vec<C64> = lambda.iter().zip(d).map(|(l, di)| l + h * di).collect();
        let m: Vec<C64> = lambda.iter().zip(d).map(|(l, di)| l - h * di).collect();
        Ok((&f(&p)? - &f(&m)?).scale(&c(1.0 / (2.0 * h))))
    };
    let d1 = at(FD_STEP)?;
    let d2 = at(FD_STEP / 2.0)?;
    Ok(&d2.scale(&c(4.0 / 3.0)) - &d1.scale(&c(1.0 / 3.0)))
}

/// Left side of the (spectral) CDYBE at one point; `us = None` for the plain equation.
pub fn cdybe_defect(
    r: &ClassicalDynOperator,
    lambda: &[C64],
    us: Option<[C64; 3]>,
    deriv: Derivative,
    rational_n: Option<usize>,
) -> Result<f64> {
    let data = &r.data;
    let n = data.n;
    let dims = [n, n, n];
    let (u12, u13, u23) = match us {
        Some(u) => (u[0] - u[1], u[0] - u[2], u[1] - u[2]),
        None => (c(0.0), c(0.0), c(0.0)),
    };
    let d = |u: C64, dir: &[f64]| -> Result<Matrix<C64>> {
        match deriv {
            Derivative::Fd => directional_fd(&|l| r.eval(u, l), lambda, dir),
            Derivative::Analytic => {
                let n =
                    rational_n.ok_or_else(|| DynError::Config(format!("no analytic derivative for {}", r.label)))?;
                Ok(classical_rational_derivative(n, lambda, dir))
            }
        }
    };
    let mut total = Matrix::zeros(n * n * n, n * n * n);
    for (i, x) in data.cartan.iter().enumerate() {
        let dir = data.direction(i);
        let t1 = &embed_single(x, 0, &dims)? * &embed_matrix(&d(u23, &dir)?, (1, 2), &dims)?;
        let t2 = &embed_single(x, 1, &dims)? * &embed_matrix(&d(u13, &dir)?, (0, 2), &dims)?;
        let t3 = &embed_single(x, 2, &dims)? * &embed_matrix(&d(u12, &dir)?, (0, 1), &dims)?;
        total = &(&(&total + &t1) - &t2) + &t3;
    }
    let r12 = embed_matrix(&r.eval(u12, lambda)?, (0, 1), &dims)?;
    let r13 = embed_matrix(&r.eval(u13, lambda)?, (0, 2), &dims)?;
    let r23 = embed_matrix(&r.eval(u23, lambda)?, (1, 2), &dims)?;
    total = &total + &r12.commutator(&r13);
    total = &total + &r12.commutator(&r23);
    total = &total + &r13.commutator(&r23);
    Ok(total.max_abs())
}

/// Sampling defaults for the classical checks: finite differences need the poles
/// to stay well away from the step, so the margin is wider than for the quantum checks.
pub fn classical_sample_config(samples: usize, seed: u64, tol: f64) -> SampleConfig {
    let mut cfg = SampleConfig::new(samples, seed, tol);
    cfg.margin = 0.05;
    cfg
}

pub fn cdybe_residual(r: &ClassicalDynOperator, cfg: &SampleConfig, deriv: Derivative) -> Result<ResidualReport> {
    cdybe_residual_with(r, cfg, deriv, None)
}

/// As [`cdybe_residual`]; `rational_n` enables the analytic derivative of the rational family.
pub fn cdybe_residual_with(
    r: &ClassicalDynOperator,
    cfg: &SampleConfig,
    deriv: Derivative,
    rational_n: Option<usize>,
) -> Result<ResidualReport> {
    let v = WeightVectorSpace::gl_vector(r.n());
    let shifts = shift_set(&[&v]);
    let mut rng = cfg.rng();
    let mut res = Vec::new();
    for _ in 0..cfg.samples {
        let l = sample_lambda(&mut rng, r.n(), cfg, &r.poles, &shifts[..1], c(0.0))?;
        res.push(cdybe_defect(r, &l, None, deriv, rational_n)?);
    }
    Ok(
        ResidualReport::from_residuals("cdybe", &res, cfg.seed, cfg.tol, "float")?
            .with_param("family", &r.label)
            .with_param("derivative", format!("{deriv:?}").to_lowercase()),
    )
}

pub fn cdybe_spectral_residual(r: &ClassicalDynOperator, cfg: &SampleConfig) -> Result<ResidualReport> {
    let v = WeightVectorSpace::gl_vector(r.n());
    let shifts = shift_set(&[&v]);
    let mut rng = cfg.rng();
    let mut res = Vec::new();
    for _ in 0..cfg.samples {
        let l = sample_lambda(&mut rng, r.n(), cfg, &r.poles, &shifts[..1], c(0.0))?;
        let us = sample_spectral(&mut rng, 3, cfg, &r.u_poles)?;
        res.push(cdybe_defect(r, &l, Some([us[0], us[1], us[2]]), Derivative::Fd, None)?);
    }
    Ok(
        ResidualReport::from_residuals("cdybe-spectral", &res, cfg.seed, cfg.tol, "float")?
            .with_param("family", &r.label),
    )
}

/// Least-squares `ε` with `r + r^{21} ≈ εΩ` and the attained defect.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CouplingCertificate {
    pub epsilon: C64,
    pub defect: f64,
}

pub const COUPLING_THRESHOLD: f64 = 1e-10;

fn fit_coupling(omega: &Matrix<C64>, sums: &[Matrix<C64>]) -> Result<CouplingCertificate> {
    let fit = best_coupling(omega, sums);
    if fit.defect < COUPLING_THRESHOLD {
        Ok(fit)
    } else {
        Err(DynError::NoCertificate(format!(
            "r + r21 is not proportional to Ω (defect {:.3e}, best ε = {})",
            fit.defect, fit.epsilon
        )))
    }
}

fn best_coupling(omega: &Matrix<C64>, sums: &[Matrix<C64>]) -> CouplingCertificate {
    let mut num = c(0.0);
    let mut den = 0.0;
    for s in sums {
        for (o, x) in omega.data().iter().zip(s.data()) {
            num += o.conj() * x;
            den += o.norm_sqr();
        }
    }
    let epsilon = num / den;
    let defect = sums
        .iter()
        .map(|s| s.max_abs_diff(&omega.scale(&epsilon)))
        .fold(0.0, f64::max);
    CouplingCertificate { epsilon, defect }
}

pub fn coupling_constant(r: &ClassicalDynOperator, cfg: &SampleConfig) -> Result<CouplingCertificate> {
    fit_coupling(&r.data.omega, &coupling_sums(r, None, cfg)?)
}

/// Coupling fit of `r(u,λ) + r^{21}(-u,λ)` at a fixed `u`.
pub fn coupling_constant_spectral(r: &ClassicalDynOperator, u: C64, cfg: &SampleConfig) -> Result<CouplingCertificate> {
    fit_coupling(&r.data.omega, &coupling_sums(r, Some(u), cfg)?)
}

/// Best `ε` and its defect without the certification threshold.
pub fn coupling_fit(r: &ClassicalDynOperator, u: Option<C64>, cfg: &SampleConfig) -> Result<CouplingCertificate> {
    Ok(best_coupling(&r.data.omega, &coupling_sums(r, u, cfg)?))
}

fn coupling_sums(r: &ClassicalDynOperator, u: Option<C64>, cfg: &SampleConfig) -> Result<Vec<Matrix<C64>>> {
    let n = r.n();
    let v = WeightVectorSpace::gl_vector(n);
    let shifts = shift_set(&[&v]);
    let mut rng = cfg.rng();
    let mut sums = Vec::new();
    for _ in 0..cfg.samples {
        let l = sample_lambda(&mut rng, n, cfg, &r.poles, &shifts[..1], c(0.0))?;
        sums.push(match u {
            None => {
                let m = r.at(&l)?;
                &m + &opposite(&m, n, n)
            }
            Some(u) => &r.eval(u, &l)? + &opposite(&r.eval(-u, &l)?, n, n),
        });
    }
    Ok(sums)
}

/// Residue of `r(u,λ)` at `u = 0` from `u·r(u,λ)` at two points, linearly extrapolated.
#[derive(Clone, Debug)]
pub struct ResidueEstimate {
    pub residue: Matrix<C64>,
    pub epsilon: C64,
    pub defect: f64,
}

pub fn residue_at_zero(r: &ClassicalDynOperator, lambda: &[C64], u1: f64, u2: f64) -> Result<ResidueEstimate> {
    let f = |u: f64| -> Result<Matrix<C64>> { Ok(r.eval(c(u), lambda)?.scale(&c(u))) };
    let (a, b) = (f(u1)?, f(u2)?);
    // linear extrapolation to u = 0
    let w1 = c(u2 / (u2 - u1));
    let w2 = c(u1 / (u1 - u2));
    let residue = &a.scale(&w1) + &b.scale(&w2);
    let cert = fit_coupling_unchecked(&r.data.omega, &residue);
    Ok(ResidueEstimate {
        defect: residue.max_abs_diff(&r.data.omega.scale(&cert)),
        residue,
        epsilon: cert,
    })
}

fn fit_coupling_unchecked(omega: &Matrix<C64>, m: &Matrix<C64>) -> C64 {
    let mut num = c(0.0);
    let mut den = 0.0;
    for (o, x) in omega.data().iter().zip(m.data()) {
        num += o.conj() * x;
        den += o.norm_sqr();
    }
    num / den
}

/// Quantum families with a classical limit.
#[derive(Clone, Copy, Debug)]
pub enum LimitFamily {
    /// `R(λ/ħ)` of the rational family against `classical_rational`.
    Rational,
    /// `R(λ/ħ)` of the trigonometric family at `q = e^ħ` against `classical_trig`.
    Trig,
    /// Elliptic family with step `γ = ħ` at fixed `u` against `classical_elliptic`.
    Elliptic { p: EllipticParams, u: C64 },
}

impl LimitFamily {
    pub fn name(&self) -> &'static str {
        match self {
            LimitFamily::Rational => "rational",
            LimitFamily::Trig => "trig",
            LimitFamily::Elliptic { .. } => "elliptic",
        }
    }
}

/// Projects an operator on `C^n⊗C^n` to `sl_n⊗sl_n` and removes the antisymmetric
/// Cartan⊗Cartan part, which is invisible to the dynamical equations.
pub fn sl_projection(data: &SimpleLieData, m: &Matrix<C64>) -> Matrix<C64> {
    let n = data.n;
    let nn = n * n;
    // coefficient of E_ik ⊗ E_jl is m[(i*n+j, k*n+l)]; index pairs (i,k), (j,l)
    let mut coef = Matrix::<C64>::zeros(nn, nn);
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                for l in 0..n {
                    coef[(i * n + k, j * n + l)] = m[(i * n + j, k * n + l)];
                }
            }
        }
    }
    let mut p = Matrix::<C64>::identity(nn);
    for a in 0..n {
        for b in 0..n {
            p[(a * n + a, b * n + b)] -= c(1.0 / n as f64);
        }
    }
    let mut coef = &(&p * &coef) * &p.transpose();
    let xs: Vec<Vec<C64>> = data
        .cartan
        .iter()
        .map(|x| (0..nn).map(|idx| x[(idx / n, idx % n)]).collect())
        .collect();
    let k = xs.len();
    let mut cs = vec![vec![c(0.0); k]; k];
    for a in 0..k {
        for b in 0..k {
            let mut s = c(0.0);
            for p1 in 0..nn {
                for p2 in 0..nn {
                    s += xs[a][p1] * coef[(p1, p2)] * xs[b][p2];
                }
            }
            cs[a][b] = s;
        }
    }
    for a in 0..k {
        for b in 0..k {
            let anti = (cs[a][b] - cs[b][a]) / 2.0;
            for p1 in 0..nn {
                for p2 in 0..nn {
                    coef[(p1, p2)] -= anti * xs[a][p1] * xs[b][p2];
                }
            }
        }
    }
    let mut out = Matrix::zeros(nn, nn);
    for i in 0..n {
        for j in 0..n {
            for k2 in 0..n {
                for l in 0..n {
                    out[(i * n + j, k2 * n + l)] = coef[(i * n + k2, j * n + l)];
                }
            }
        }
    }
    out
}

#[derive(Clone, Debug, Serialize)]
pub struct LimitCertificate {
    pub family: String,
    pub hbar: Vec<f64>,
    /// `‖P(D(ħ)) - P(r)‖` for each `ħ`, `P` the projection of [`sl_projection`].
    pub errors: Vec<f64>,
    /// Empirical orders between consecutive `ħ`; infinite when both errors are at rounding level.
    pub orders: Vec<f64>,
    pub order: f64,
    /// Error of the polynomial extrapolation of `D(ħ)` to `ħ = 0`.
    pub extrapolated_error: f64,
    #[serde(skip)]
    pub estimate: Matrix<C64>,
}

/// Errors below this are treated as rounding noise when computing orders.
pub const EXACT_LIMIT_FLOOR: f64 = 1e-10;

pub fn classical_limit(family: LimitFamily, n: usize, lambda: &[C64], hbar: &[f64]) -> Result<LimitCertificate> {
    if hbar.len() < 2 || hbar.windows(2).any(|w| w[1] >= w[0]) || hbar.iter().any(|h| *h <= 0.0) {
        return Err(DynError::Config(
            "ħ list must be positive and strictly decreasing".into(),
        ));
    }
    let data = sl_data(n)?;
    let target = match family {
        LimitFamily::Rational => classical_rational(n)?.at(lambda)?,
        LimitFamily::Trig => classical_trig(n)?.at(lambda)?,
        LimitFamily::Elliptic { p, u } => classical_elliptic(n, p)?.eval(u, lambda)?,
    };
    let target = sl_projection(&data, &target);
    let id = Matrix::<C64>::identity(n * n);
    let mut ds = Vec::new();
    for &h in hbar {
        let scaled: Vec<C64> = lambda.iter().map(|l| l / h).collect();
        let r = match family {
            LimitFamily::Rational => basic_rational(n)?.eval(&scaled)?,
            LimitFamily::Trig => basic_trigonometric(n, c(h.exp()))?.eval(&scaled)?,
            LimitFamily::Elliptic { p, u } => basic_elliptic(n, p, c(h))?.eval(u, lambda)?,
        };
        ds.push(sl_projection(&data, &(&id - &r).scale(&c(1.0 / h))));
    }
    let errors: Vec<f64> = ds.iter().map(|d| d.max_abs_diff(&target)).collect();
    let orders: Vec<f64> = errors
        .windows(2)
        .zip(hbar.windows(2))
        .map(|(e, h)| {
            if e[0] < EXACT_LIMIT_FLOOR && e[1] < EXACT_LIMIT_FLOOR {
                f64::INFINITY
            } else {
                (e[0] / e[1]).ln() / (h[0] / h[1]).ln()
            }
        })
        .collect();
    let order = orders.iter().copied().fold(f64::INFINITY, f64::min);
    let mut extrapolated = Matrix::zeros(n * n, n * n);
    for (k, d) in ds.iter().enumerate() {
        let mut w = 1.0;
        for (j, hj) in hbar.iter().enumerate() {
            if j != k {
                w *= hj / (hj - hbar[k]);
            }
        }
        extrapolated = &extrapolated + &d.scale(&c(w));
    }
    Ok(LimitCertificate {
        family: family.name().to_string(),
        hbar: hbar.to_vec(),
        extrapolated_error: extrapolated.max_abs_diff(&target),
        errors,
        orders,
        order,
        estimate: ds.pop().expect("nonempty"),
    })
}
