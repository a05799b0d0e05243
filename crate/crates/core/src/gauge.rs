//! Gauge transformations of quantum and classical dynamical r-matrices and
//! the closedness predicate for multiplicative 2-forms.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use serde::Deserialize;

use crate::error::{DynError, Result};
use crate::liealg::{ClassicalDynOperator, SplitValue};
use crate::matrix::Matrix;
use crate::rmatrix::AlphaBetaTable;
use crate::scalar::C64;
use crate::tensorcore::PoleHyperplane;
use crate::verify::{ResidualReport, SampleConfig};

use rand::Rng;

fn c(x: f64) -> C64 {
    C64::new(x, 0.0)
}

pub type FormFn = Arc<dyn Fn(usize, usize, &[C64]) -> C64 + Send + Sync>;
pub type PotentialFn = Arc<dyn Fn(usize, &[C64]) -> C64 + Send + Sync>;
pub type ScalarFn = Arc<dyn Fn(&[C64]) -> C64 + Send + Sync>;
pub type VectorFn = Arc<dyn Fn(&[C64]) -> Vec<C64> + Send + Sync>;
pub type HessianFn = Arc<dyn Fn(&[C64]) -> Vec<Vec<C64>> + Send + Sync>;

/// `φ_ab(λ)` for `a ≠ b`.
#[derive(Clone)]
pub struct MultiplicativeTwoForm {
    pub n: usize,
    phi: FormFn,
}

impl fmt::Debug for MultiplicativeTwoForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("MultiplicativeTwoForm")
            .field("n", &self.n)
            .finish_non_exhaustive()
    }
}

impl MultiplicativeTwoForm {
    /// Uses `f` as given for every ordered pair.
    pub fn from_fn(n: usize, f: impl Fn(usize, usize, &[C64]) -> C64 + Send + Sync + 'static) -> Self {
        MultiplicativeTwoForm { n, phi: Arc::new(f) }
    }

    /// `f` is consulted for `a < b`; `φ_ba = φ_ab^{-1}`.
    pub fn from_upper(n: usize, f: impl Fn(usize, usize, &[C64]) -> C64 + Send + Sync + 'static) -> Self {
        Self::from_fn(n, move |a, b, l| if a < b { f(a, b, l) } else { 1.0 / f(b, a, l) })
    }

    pub fn trivial(n: usize) -> Self {
        Self::from_fn(n, |_, _, _| c(1.0))
    }

    pub fn eval(&self, a: usize, b: usize, lambda: &[C64]) -> C64 {
        (self.phi)(a, b, lambda)
    }
}

fn shifted(lambda: &[C64], gamma: C64, idx: &[usize]) -> Vec<C64> {
    let mut l = lambda.to_vec();
    for &i in idx {
        l[i] -= gamma;
    }
    l
}

fn sample_box(rng: &mut impl Rng, n: usize, cfg: &SampleConfig) -> Vec<C64> {
    (0..n)
        .map(|_| c(rng.random_range(-cfg.half_width..cfg.half_width)))
        .collect()
}

/// Sampled closedness: `max |LHS/RHS - 1|` over triples, together with the antisymmetry defect.
pub fn is_closed(phi: &MultiplicativeTwoForm, gamma: C64, cfg: &SampleConfig) -> Result<ResidualReport> {
    let n = phi.n;
    let mut rng = cfg.rng();
    let mut res = Vec::with_capacity(cfg.samples);
    for _ in 0..cfg.samples {
        let l = sample_box(&mut rng, n, cfg);
        let mut worst: f64 = 0.0;
        for a in 0..n {
            for b in 0..n {
                if a == b {
                    continue;
                }
                let (p, q) = (phi.eval(a, b, &l), phi.eval(b, a, &l));
                if p.norm() == 0.0 || q.norm() == 0.0 || !p.is_finite() || !q.is_finite() {
                    return Err(DynError::Domain(format!("φ_{a}{b} vanishes or blows up at {l:?}")));
                }
                worst = worst.max((p * q - 1.0).norm());
                for cc in 0..n {
                    if cc == a || cc == b {
                        continue;
                    }
                    let lhs = p * phi.eval(b, cc, &l) * phi.eval(cc, a, &l);
                    let rhs = phi.eval(a, b, &shifted(&l, gamma, &[cc]))
                        * phi.eval(b, cc, &shifted(&l, gamma, &[a]))
                        * phi.eval(cc, a, &shifted(&l, gamma, &[b]));
                    if rhs.norm() == 0.0 {
                        return Err(DynError::Domain(format!("φ vanishes at a shift of {l:?}")));
                    }
                    worst = worst.max((lhs / rhs - 1.0).norm());
                }
            }
        }
        res.push(worst);
    }
    Ok(
        ResidualReport::from_residuals("closed-2-form", &res, cfg.seed, cfg.tol, "float")?
            .with_param("n", n)
            .with_param("gamma", gamma.re),
    )
}

/// `φ_ab(λ) = ξ_a(λ) ξ_b(λ-γω_a) / (ξ_a(λ-γω_b) ξ_b(λ))`.
pub fn exact_from_potential(
    n: usize,
    xi: impl Fn(usize, &[C64]) -> C64 + Send + Sync + 'static,
    gamma: C64,
) -> MultiplicativeTwoForm {
    MultiplicativeTwoForm::from_fn(n, move |a, b, l| {
        xi(a, l) * xi(b, &shifted(l, gamma, &[a])) / (xi(a, &shifted(l, gamma, &[b])) * xi(b, l))
    })
}

/// How the `ψ` transformation of spectral R-matrices is read.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PsiReading {
    /// Diagonal entries pick up `e^{u(ψ - 2ψ(λ-γω_a) + ψ(λ-2γω_a))}`, `α_ab` the symmetric
    /// second difference and `β_ab` the second difference centred on `b`.
    #[default]
    Corrected,
    /// `α_ab` takes the second difference centred on `a`, `β_ab` the symmetric one,
    /// diagonal untouched. Does not preserve QDYBE.
    Verbatim,
}

impl FromStr for PsiReading {
    type Err = DynError;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "corrected" => Ok(PsiReading::Corrected),
            "verbatim" => Ok(PsiReading::Verbatim),
            _ => Err(DynError::Config(format!("unknown ψ reading {s:?}"))),
        }
    }
}

#[derive(Clone, Default)]
pub struct QuantumGaugePlan {
    pub form: Option<MultiplicativeTwoForm>,
    /// `permutation[a]` is the image of index `a`.
    pub permutation: Option<Vec<usize>>,
    pub shift: Option<Vec<C64>>,
    pub scalar: Option<Arc<dyn Fn(C64) -> C64 + Send + Sync>>,
    pub psi: Option<ScalarFn>,
    pub psi_reading: PsiReading,
    pub u_scale: Option<f64>,
}

impl fmt::Debug for QuantumGaugePlan {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("QuantumGaugePlan")
            .field("form", &self.form.is_some())
            .field("permutation", &self.permutation)
            .field("shift", &self.shift)
            .field("scalar", &self.scalar.is_some())
            .field("psi", &self.psi.is_some())
            .field("psi_reading", &self.psi_reading)
            .field("u_scale", &self.u_scale)
            .finish()
    }
}

impl QuantumGaugePlan {
    pub fn identity() -> Self {
        Self::default()
    }

    pub fn with_form(mut self, form: MultiplicativeTwoForm) -> Self {
        self.form = Some(form);
        self
    }

    pub fn with_permutation(mut self, p: Vec<usize>) -> Self {
        self.permutation = Some(p);
        self
    }

    pub fn with_shift(mut self, nu: Vec<C64>) -> Self {
        self.shift = Some(nu);
        self
    }

    pub fn with_constant(mut self, k: C64) -> Self {
        self.scalar = Some(Arc::new(move |_| k));
        self
    }

    pub fn with_scalar(mut self, f: impl Fn(C64) -> C64 + Send + Sync + 'static) -> Self {
        self.scalar = Some(Arc::new(f));
        self
    }

    pub fn with_psi(mut self, psi: impl Fn(&[C64]) -> C64 + Send + Sync + 'static, reading: PsiReading) -> Self {
        self.psi = Some(Arc::new(psi));
        self.psi_reading = reading;
        self
    }

    pub fn with_u_scale(mut self, b: f64) -> Self {
        self.u_scale = Some(b);
        self
    }
}

fn check_permutation(p: &[usize], n: usize) -> Result<()> {
    let mut seen = vec![false; n];
    if p.len() != n {
        return Err(DynError::Config(format!(
            "permutation has {} entries, need {n}",
            p.len()
        )));
    }
    for &x in p {
        if x >= n || seen[x] {
            return Err(DynError::Config(format!("{p:?} is not a permutation of 0..{n}")));
        }
        seen[x] = true;
    }
    Ok(())
}

fn relabel_poles(poles: &[PoleHyperplane], perm: &[usize]) -> Vec<PoleHyperplane> {
    poles
        .iter()
        .map(|h| PoleHyperplane {
            alpha: (0..perm.len()).map(|cc| h.alpha[perm[cc]]).collect(),
            offset: h.offset,
            period: h.period,
        })
        .collect()
}

/// Poles of `λ ↦ f(aλ - ν)` given the poles of `f`.
fn affine_poles(poles: &[PoleHyperplane], a: f64, nu: &[C64]) -> Vec<PoleHyperplane> {
    poles
        .iter()
        .map(|h| {
            let an: f64 = h.alpha.iter().zip(nu).map(|(x, v)| x * v.re).sum();
            PoleHyperplane {
                alpha: h.alpha.clone(),
                offset: (h.offset + an) / a,
                period: h.period.map(|p| p / a.abs()),
            }
        })
        .collect()
}

/// Applies twist, `ψ`, permutation, shift, `u`-scale and scalar, in that order.
pub fn apply_quantum(t: &AlphaBetaTable, plan: &QuantumGaugePlan) -> Result<AlphaBetaTable> {
    let n = t.n;
    let gamma = t.step;
    let mut out = t.clone();
    if !t.spectral && (plan.psi.is_some() || plan.u_scale.is_some()) {
        return Err(DynError::Config(format!(
            "{} has no spectral parameter; ψ and u-scale need one",
            t.label
        )));
    }
    if let Some(form) = &plan.form {
        if form.n != n {
            return Err(DynError::Dimension(format!(
                "form of rank {} on a rank-{n} table",
                form.n
            )));
        }
        let (alpha, form) = (out.alpha.clone(), form.clone());
        out.alpha = Arc::new(move |a, b, u, l| alpha(a, b, u, l) * form.eval(a, b, l));
    }
    if let Some(psi) = &plan.psi {
        let psi = psi.clone();
        let reading = plan.psi_reading;
        let p = move |l: &[C64], idx: &[usize]| psi(&shifted(l, gamma, idx));
        let p = Arc::new(p);
        let (alpha, beta, diag) = (out.alpha.clone(), out.beta.clone(), out.diagonal.clone());
        let pa = p.clone();
        out.alpha = Arc::new(move |a, b, u, l| {
            let e = match reading {
                PsiReading::Corrected => pa(l, &[]) - pa(l, &[a]) - pa(l, &[b]) + pa(l, &[a, b]),
                PsiReading::Verbatim => pa(l, &[]) - 2.0 * pa(l, &[a]) + pa(l, &[a, b]),
            };
            alpha(a, b, u, l) * (u * e).exp()
        });
        let pb = p.clone();
        out.beta = Arc::new(move |a, b, u, l| {
            let e = match reading {
                PsiReading::Corrected => pb(l, &[]) - 2.0 * pb(l, &[b]) + pb(l, &[a, b]),
                PsiReading::Verbatim => pb(l, &[]) - pb(l, &[a]) - pb(l, &[b]) + pb(l, &[a, b]),
            };
            beta(a, b, u, l) * (u * e).exp()
        });
        if reading == PsiReading::Corrected {
            out.diagonal = Some(Arc::new(move |a, u, l| {
                let d = diag.as_ref().map_or(c(1.0), |d| d(a, u, l));
                d * (u * (p(l, &[]) - 2.0 * p(l, &[a]) + p(l, &[a, a]))).exp()
            }));
        }
    }
    if let Some(perm) = &plan.permutation {
        check_permutation(perm, n)?;
        let perm = perm.clone();
        let to_mu = {
            let perm = perm.clone();
            move |l: &[C64]| {
                let mut mu = vec![c(0.0); l.len()];
                for (cc, x) in l.iter().enumerate() {
                    mu[perm[cc]] = *x;
                }
                mu
            }
        };
        let to_mu = Arc::new(to_mu);
        let (alpha, beta, diag) = (out.alpha.clone(), out.beta.clone(), out.diagonal.clone());
        let (p1, m1) = (perm.clone(), to_mu.clone());
        out.alpha = Arc::new(move |a, b, u, l| alpha(p1[a], p1[b], u, &m1(l)));
        let (p2, m2) = (perm.clone(), to_mu.clone());
        out.beta = Arc::new(move |a, b, u, l| beta(p2[a], p2[b], u, &m2(l)));
        if let Some(d) = diag {
            let p3 = perm.clone();
            out.diagonal = Some(Arc::new(move |a, u, l| d(p3[a], u, &to_mu(l))));
        }
        out.poles = relabel_poles(&out.poles, &perm);
    }
    if let Some(nu) = &plan.shift {
        if nu.len() != n {
            return Err(DynError::Dimension(format!("shift has {} entries, need {n}", nu.len())));
        }
        let nu = nu.clone();
        let sh = Arc::new(move |l: &[C64]| l.iter().zip(&nu).map(|(x, v)| x - v).collect::<Vec<_>>());
        let (alpha, beta, diag) = (out.alpha.clone(), out.beta.clone(), out.diagonal.clone());
        let s1 = sh.clone();
        out.alpha = Arc::new(move |a, b, u, l| alpha(a, b, u, &s1(l)));
        let s2 = sh.clone();
        out.beta = Arc::new(move |a, b, u, l| beta(a, b, u, &s2(l)));
        if let Some(d) = diag {
            out.diagonal = Some(Arc::new(move |a, u, l| d(a, u, &sh(l))));
        }
        out.poles = affine_poles(&out.poles, 1.0, plan.shift.as_ref().expect("set"));
    }
    if let Some(b) = plan.u_scale {
        if b == 0.0 {
            return Err(DynError::Config("u-scale must be nonzero".into()));
        }
        let (alpha, beta, diag, scalar) = (
            out.alpha.clone(),
            out.beta.clone(),
            out.diagonal.clone(),
            out.scalar.clone(),
        );
        out.alpha = Arc::new(move |a, bb, u, l| alpha(a, bb, u * b, l));
        out.beta = Arc::new(move |a, bb, u, l| beta(a, bb, u * b, l));
        if let Some(d) = diag {
            out.diagonal = Some(Arc::new(move |a, u, l| d(a, u * b, l)));
        }
        if let Some(s) = scalar {
            out.scalar = Some(Arc::new(move |u| s(u * b)));
        }
        out.u_poles = affine_poles(&out.u_poles, b, &[c(0.0)]);
    }
    if let Some(k) = &plan.scalar {
        let (k, prev) = (k.clone(), out.scalar.clone());
        out.scalar = Some(Arc::new(move |u| prev.as_ref().map_or(c(1.0), |s| s(u)) * k(u)));
    }
    out.label = format!("{}+gauge", t.label);
    Ok(out)
}

/// `ψ` with its gradient and Hessian in λ-coordinates.
#[derive(Clone)]
pub struct Potential {
    pub value: ScalarFn,
    pub gradient: VectorFn,
    pub hessian: HessianFn,
}

impl fmt::Debug for Potential {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("Potential")
    }
}

impl Potential {
    /// `ψ(λ) = l·λ + λᵀQλ`.
    pub fn quadratic(linear: Vec<f64>, quad: Vec<Vec<f64>>) -> Self {
        let n = linear.len();
        let sym: Vec<Vec<f64>> = (0..n)
            .map(|i| (0..n).map(|j| quad[i][j] + quad[j][i]).collect())
            .collect();
        let (l1, q1) = (linear.clone(), quad);
        let (l2, s2, s3) = (linear, sym.clone(), sym);
        Potential {
            value: Arc::new(move |x| {
                let mut v = c(0.0);
                for i in 0..x.len() {
                    v += l1[i] * x[i];
                    for j in 0..x.len() {
                        v += q1[i][j] * x[i] * x[j];
                    }
                }
                v
            }),
            gradient: Arc::new(move |x| {
                (0..x.len())
                    .map(|i| c(l2[i]) + (0..x.len()).map(|j| s2[i][j] * x[j]).sum::<C64>())
                    .collect()
            }),
            hessian: Arc::new(move |_| s3.iter().map(|r| r.iter().map(|&v| c(v)).collect()).collect()),
        }
    }

    pub fn eval(&self, x: &[C64]) -> C64 {
        (self.value)(x)
    }
}

/// Constant or λ-dependent closed form `ω = Σ C_ij x_i∧x_j` in the orthonormal Cartan basis.
pub type TwoFormFn = Arc<dyn Fn(&[C64]) -> Vec<Vec<C64>> + Send + Sync>;

#[derive(Clone, Default)]
pub struct ClassicalGaugePlan {
    pub omega: Option<TwoFormFn>,
    pub scale: Option<f64>,
    pub shift: Option<Vec<C64>>,
    /// Weyl group element as a permutation of `0..n`.
    pub weyl: Option<Vec<usize>>,
    pub u_scale: Option<f64>,
    pub psi: Option<Potential>,
}

impl fmt::Debug for ClassicalGaugePlan {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ClassicalGaugePlan")
            .field("omega", &self.omega.is_some())
            .field("scale", &self.scale)
            .field("shift", &self.shift)
            .field("weyl", &self.weyl)
            .field("u_scale", &self.u_scale)
            .field("psi", &self.psi.is_some())
            .finish()
    }
}

impl ClassicalGaugePlan {
    pub fn identity() -> Self {
        Self::default()
    }

    pub fn with_constant_omega(mut self, cij: Vec<Vec<f64>>) -> Result<Self> {
        for (i, row) in cij.iter().enumerate() {
            for (j, v) in row.iter().enumerate() {
                if (v + cij[j][i]).abs() > 0.0 {
                    return Err(DynError::Config(format!("C must be antisymmetric, C_{i}{j} = {v}")));
                }
            }
        }
        let m: Vec<Vec<C64>> = cij.iter().map(|r| r.iter().map(|&v| c(v)).collect()).collect();
        self.omega = Some(Arc::new(move |_| m.clone()));
        Ok(self)
    }

    pub fn with_omega(mut self, f: impl Fn(&[C64]) -> Vec<Vec<C64>> + Send + Sync + 'static) -> Self {
        self.omega = Some(Arc::new(f));
        self
    }

    pub fn with_scale_shift(mut self, a: f64, nu: Vec<C64>) -> Self {
        self.scale = Some(a);
        self.shift = Some(nu);
        self
    }

    pub fn with_weyl(mut self, w: Vec<usize>) -> Self {
        self.weyl = Some(w);
        self
    }

    pub fn with_u_scale(mut self, b: f64) -> Self {
        self.u_scale = Some(b);
        self
    }

    pub fn with_psi(mut self, psi: Potential) -> Self {
        self.psi = Some(psi);
        self
    }
}

/// Applies `ω`, `ψ`, Weyl element, `(a, ν)` and `u`-scale, in that order.
pub fn apply_classical(r: &ClassicalDynOperator, plan: &ClassicalGaugePlan) -> Result<ClassicalDynOperator> {
    let n = r.n();
    let data = r.data.clone();
    if !r.spectral && (plan.psi.is_some() || plan.u_scale.is_some()) {
        return Err(DynError::Config(format!(
            "{} has no spectral parameter; ψ and u-scale need one",
            r.label
        )));
    }
    let mut cur = r.clone();
    if plan.omega.is_some() || plan.psi.is_some() {
        if !cur.has_split() {
            return Err(DynError::Config(format!(
                "{} is not given in Cartan/root split form",
                r.label
            )));
        }
        let base = cur.clone();
        let omega = plan.omega.clone();
        let psi = plan.psi.clone();
        let d2 = data.clone();
        let split = move |u: C64, l: &[C64]| -> Result<SplitValue> {
            let mut v = base.split(u, l).expect("has split")?;
            let k = v.s.len();
            if let Some(om) = &omega {
                let cij = om(l);
                for i in 0..k {
                    for j in 0..k {
                        v.s[i][j] += cij[i][j] - cij[j][i];
                    }
                }
            }
            if let Some(p) = &psi {
                let h = (p.hessian)(l);
                let g = (p.gradient)(l);
                let dirs: Vec<Vec<f64>> = (0..k).map(|i| d2.direction(i)).collect();
                for i in 0..k {
                    for j in 0..k {
                        let mut s = c(0.0);
                        for x in 0..l.len() {
                            for y in 0..l.len() {
                                s += dirs[i][x] * h[x][y] * dirs[j][y];
                            }
                        }
                        v.s[i][j] += u * s;
                    }
                }
                for ((a, b), phi) in v.phi.iter_mut() {
                    *phi *= (u * (g[*a] - g[*b])).exp();
                }
            }
            Ok(v)
        };
        let (poles, u_poles) = (cur.poles.clone(), cur.u_poles.clone());
        cur = ClassicalDynOperator::from_split(format!("{}+gauge", r.label), data.clone(), r.spectral, split)
            .with_poles(poles, u_poles);
    }
    if let Some(w) = &plan.weyl {
        check_permutation(w, n)?;
        let base = cur.clone();
        let w = w.clone();
        let mut p = Matrix::<C64>::zeros(n, n);
        for (a, &x) in w.iter().enumerate() {
            p[(x, a)] = c(1.0);
        }
        let pp = p.kron(&p);
        let ppt = pp.transpose();
        let w2 = w.clone();
        let eval = move |u: C64, l: &[C64]| -> Result<Matrix<C64>> {
            // (σ⁻¹λ)_a = λ_{σ(a)}
            let mu: Vec<C64> = (0..l.len()).map(|a| l[w2[a]]).collect();
            Ok(&(&pp * &base.eval(u, &mu)?) * &ppt)
        };
        let poles = cur
            .poles
            .iter()
            .map(|h| {
                let mut alpha = vec![0.0; n];
                for a in 0..n {
                    alpha[w[a]] = h.alpha[a];
                }
                PoleHyperplane {
                    alpha,
                    offset: h.offset,
                    period: h.period,
                }
            })
            .collect();
        let u_poles = cur.u_poles.clone();
        cur = ClassicalDynOperator::from_eval(format!("{}+gauge", r.label), data.clone(), r.spectral, eval)
            .with_poles(poles, u_poles);
    }
    if plan.scale.is_some() || plan.shift.is_some() {
        let a = plan.scale.unwrap_or(1.0);
        if a == 0.0 {
            return Err(DynError::Config("scale must be nonzero".into()));
        }
        let nu = plan.shift.clone().unwrap_or_else(|| vec![c(0.0); n]);
        if nu.len() != n {
            return Err(DynError::Dimension(format!("shift has {} entries, need {n}", nu.len())));
        }
        let base = cur.clone();
        let nu2 = nu.clone();
        let eval = move |u: C64, l: &[C64]| -> Result<Matrix<C64>> {
            let x: Vec<C64> = l.iter().zip(&nu2).map(|(li, v)| a * li - v).collect();
            Ok(base.eval(u, &x)?.scale(&c(a)))
        };
        let poles = affine_poles(&cur.poles, a, &nu);
        let u_poles = cur.u_poles.clone();
        cur = ClassicalDynOperator::from_eval(format!("{}+gauge", r.label), data.clone(), r.spectral, eval)
            .with_poles(poles, u_poles);
    }
    if let Some(b) = plan.u_scale {
        if b == 0.0 {
            return Err(DynError::Config("u-scale must be nonzero".into()));
        }
        let base = cur.clone();
        let eval = move |u: C64, l: &[C64]| base.eval(u * b, l);
        let u_poles = affine_poles(&cur.u_poles, b, &[c(0.0)]);
        let poles = cur.poles.clone();
        cur = ClassicalDynOperator::from_eval(format!("{}+gauge", r.label), data, r.spectral, eval)
            .with_poles(poles, u_poles);
    }
    Ok(cur)
}

/// `ψ(λ) = l·λ + λᵀQλ` as written in a JSON plan.
#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QuadraticSpec {
    #[serde(default)]
    pub linear: Vec<f64>,
    #[serde(default)]
    pub quadratic: Vec<Vec<f64>>,
}

impl QuadraticSpec {
    fn potential(&self, n: usize) -> Result<Potential> {
        let linear = if self.linear.is_empty() {
            vec![0.0; n]
        } else {
            self.linear.clone()
        };
        let quad = if self.quadratic.is_empty() {
            vec![vec![0.0; n]; n]
        } else {
            self.quadratic.clone()
        };
        if linear.len() != n || quad.len() != n || quad.iter().any(|r| r.len() != n) {
            return Err(DynError::Config(format!("quadratic potential must have rank {n}")));
        }
        Ok(Potential::quadratic(linear, quad))
    }
}

/// JSON description of a [`QuantumGaugePlan`]; permutations are 1-based.
///
/// `potential[a]` describes `log ξ_a`, and the twist is the exact form built from it.
#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QuantumPlanSpec {
    #[serde(default)]
    pub potential: Option<Vec<QuadraticSpec>>,
    #[serde(default)]
    pub permutation: Option<Vec<usize>>,
    #[serde(default)]
    pub shift: Option<Vec<f64>>,
    #[serde(default)]
    pub scalar: Option<f64>,
    #[serde(default)]
    pub psi: Option<QuadraticSpec>,
    #[serde(default)]
    pub psi_reading: PsiReading,
    #[serde(default)]
    pub b: Option<f64>,
}

fn one_based(p: &[usize]) -> Result<Vec<usize>> {
    p.iter()
        .map(|&x| {
            x.checked_sub(1)
                .ok_or_else(|| DynError::Config("permutations are 1-based".into()))
        })
        .collect()
}

impl QuantumPlanSpec {
    pub fn parse(json: &str) -> Result<Self> {
        serde_json::from_str(json).map_err(|e| DynError::Config(format!("gauge plan: {e}")))
    }

    pub fn build(&self, n: usize, gamma: C64) -> Result<QuantumGaugePlan> {
        let mut plan = QuantumGaugePlan::identity();
        if let Some(pots) = &self.potential {
            if pots.len() != n {
                return Err(DynError::Config(format!("need {n} potentials, got {}", pots.len())));
            }
            let logs = pots.iter().map(|p| p.potential(n)).collect::<Result<Vec<_>>>()?;
            plan = plan.with_form(exact_from_potential(n, move |a, l| logs[a].eval(l).exp(), gamma));
        }
        if let Some(p) = &self.permutation {
            plan = plan.with_permutation(one_based(p)?);
        }
        if let Some(s) = &self.shift {
            plan = plan.with_shift(s.iter().map(|&x| c(x)).collect());
        }
        if let Some(k) = self.scalar {
            if k == 0.0 {
                return Err(DynError::Config("scalar must be nonzero".into()));
            }
            plan = plan.with_constant(c(k));
        }
        if let Some(psi) = &self.psi {
            let p = psi.potential(n)?;
            plan = plan.with_psi(move |l| p.eval(l), self.psi_reading);
        }
        if let Some(b) = self.b {
            plan = plan.with_u_scale(b);
        }
        Ok(plan)
    }
}

/// JSON description of a [`ClassicalGaugePlan`]; `omega` is a constant antisymmetric matrix.
#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ClassicalPlanSpec {
    #[serde(default)]
    pub omega: Option<Vec<Vec<f64>>>,
    #[serde(default)]
    pub scale: Option<f64>,
    #[serde(default)]
    pub shift: Option<Vec<f64>>,
    #[serde(default)]
    pub weyl: Option<Vec<usize>>,
    #[serde(default)]
    pub b: Option<f64>,
    #[serde(default)]
    pub psi: Option<QuadraticSpec>,
}

impl ClassicalPlanSpec {
    pub fn parse(json: &str) -> Result<Self> {
        serde_json::from_str(json).map_err(|e| DynError::Config(format!("gauge plan: {e}")))
    }

    pub fn build(&self, n: usize) -> Result<ClassicalGaugePlan> {
        let mut plan = ClassicalGaugePlan::identity();
        if let Some(om) = &self.omega {
            if om.len() != n - 1 || om.iter().any(|r| r.len() != n - 1) {
                return Err(DynError::Config(format!("omega must be {0}x{0}", n - 1)));
            }
            plan = plan.with_constant_omega(om.clone())?;
        }
        if self.scale.is_some() || self.shift.is_some() {
            let nu = self.shift.clone().unwrap_or_else(|| vec![0.0; n]);
            plan = plan.with_scale_shift(self.scale.unwrap_or(1.0), nu.iter().map(|&x| c(x)).collect());
        }
        if let Some(w) = &self.weyl {
            plan = plan.with_weyl(one_based(w)?);
        }
        if let Some(b) = self.b {
            plan = plan.with_u_scale(b);
        }
        if let Some(p) = &self.psi {
            plan = plan.with_psi(p.potential(n)?);
        }
        Ok(plan)
    }
}
