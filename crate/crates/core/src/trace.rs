//! Rank-one trace functions `Ψ_V`, `F_V`, the Macdonald-type operators `D_W`, and
//! coefficient-wise checks of their eigenvalue equation, commutativity and symmetry.
//!
//! Rank-one coordinates: `λ = l ω`, `μ = l_μ ω`, so `q^{2(λ,μ)} = q^{l l_μ}`,
//! `x = q^{-2l}` and `ρ` shifts `l_μ -> -l_μ - 1`. Exact checks work in `y = q^{-l}`.

use rand::Rng;
use serde::Serialize;

use crate::error::{DynError, Result};
use crate::fusion::{exchange, fd_module, q_operator, verma_intertwiner, Module, RankOne};
use crate::matrix::Matrix;
use crate::scalar::{rational_to_f64, Rational, Scalar, C64};
use crate::series::LaurentSeries;
use crate::verify::{ResidualReport, SampleConfig};

/// `q^{a·l·l_μ + b·l} · Σ_m c_m x^m` truncated after `x^order`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FormalTraceSeries<S> {
    /// `(a, b)` in the prefactor exponent.
    pub prefactor: (i64, i64),
    pub coeffs: Vec<S>,
    pub order: usize,
}

impl<S: Scalar> FormalTraceSeries<S> {
    pub fn new(prefactor: (i64, i64), mut coeffs: Vec<S>, order: usize) -> Self {
        coeffs.resize(order + 1, S::zero());
        FormalTraceSeries {
            prefactor,
            coeffs,
            order,
        }
    }

    /// Product of the series parts; prefactor exponents add.
    pub fn mul(&self, other: &Self) -> Self {
        let order = self.order.min(other.order);
        let mut out = vec![S::zero(); order + 1];
        for (i, a) in self.coeffs.iter().enumerate().take(order + 1) {
            for (j, b) in other.coeffs.iter().enumerate().take(order + 1 - i) {
                out[i + j] = out[i + j].clone() + a.clone() * b.clone();
            }
        }
        let p = (
            self.prefactor.0 + other.prefactor.0,
            self.prefactor.1 + other.prefactor.1,
        );
        FormalTraceSeries::new(p, out, order)
    }

    pub fn scale(&self, c: &S) -> Self {
        let coeffs = self.coeffs.iter().map(|a| a.clone() * c.clone()).collect();
        FormalTraceSeries::new(self.prefactor, coeffs, self.order)
    }

    pub fn truncate(&self, order: usize) -> Self {
        let order = order.min(self.order);
        FormalTraceSeries::new(self.prefactor, self.coeffs[..=order].to_vec(), order)
    }

    pub fn max_coeff(&self) -> f64 {
        self.coeffs.iter().map(Scalar::magnitude).fold(0.0, f64::max)
    }

    /// Series part as a truncated series in `y`, `x = y²`.
    fn in_y(&self) -> LaurentSeries
    where
        S: Into<Rational>,
    {
        let mut v = vec![<Rational as Scalar>::zero(); 2 * self.order + 1];
        for (k, c) in self.coeffs.iter().enumerate() {
            v[2 * k] = c.clone().into();
        }
        LaurentSeries::from_coeffs(v, 2 * self.order + 2)
    }
}

impl FormalTraceSeries<C64> {
    /// Numeric value at real `l`, `l_μ`.
    pub fn eval(&self, l: f64, l_mu: f64, q: f64) -> C64 {
        let x = q.powf(-2.0 * l);
        let mut acc = C64::new(0.0, 0.0);
        for c in self.coeffs.iter().rev() {
            acc = acc * x + c;
        }
        let e = self.prefactor.0 as f64 * l * l_mu + self.prefactor.1 as f64 * l;
        acc * q.powf(e)
    }
}

fn zero_weight_index<S: Scalar>(v: &Module<S>) -> Result<usize> {
    match v.weight_space(0)[..] {
        [i] => Ok(i),
        _ => Err(DynError::Config(format!(
            "{} must have a one-dimensional zero weight space",
            v.label
        ))),
    }
}

fn require_quantum<S: Scalar>(alg: &RankOne<S>) -> Result<S> {
    alg.q()
        .cloned()
        .ok_or_else(|| DynError::Config("trace functions need a quantum parameter".into()))
}

fn inverse<S: Scalar>(x: &S, what: &str) -> Result<S> {
    x.inv().ok_or_else(|| DynError::Resonance(what.to_string()))
}

/// `Ψ_V(λ, μ) = Tr|_{M_μ}(Φ_μ q^{2λ̄})` with `⟨Φ⟩` the unit vector of `V[0]` and
/// `t_mu = q^{l_μ}`. Prefactor `q^{l l_μ}`.
pub fn psi_series<S: Scalar>(alg: &RankOne<S>, v: &Module<S>, t_mu: &S, order: usize) -> Result<FormalTraceSeries<S>> {
    let q = require_quantum(alg)?;
    let i0 = zero_weight_index(v)?;
    let dv = v.dim();
    let phi = verma_intertwiner(alg, t_mu, v, &v.unit(i0), dv)?;
    let q2 = q.clone() * q;
    let ti = inverse(t_mu, "Verma coordinate")?;
    // K⁻¹ on f^a x_μ.
    let mut kinv = vec![ti];
    for a in 0..order {
        kinv.push(kinv[a].clone() * q2.clone());
    }
    let levels = order + 1;
    let mut state = vec![vec![S::zero(); dv]; levels];
    for (j, vj) in phi.coeffs.iter().enumerate().take(levels) {
        state[j] = vj.clone();
    }
    let mut coeffs = Vec::with_capacity(levels);
    for k in 0..levels {
        coeffs.push(state[k][i0].clone());
        if k == order {
            break;
        }
        let mut next = vec![vec![S::zero(); dv]; levels];
        for a in 0..levels {
            let fv = v.f.apply(&state[a]);
            for i in 0..dv {
                next[a][i] = next[a][i].clone() + kinv[a].clone() * fv[i].clone();
                if a + 1 < levels {
                    next[a + 1][i] = next[a + 1][i].clone() + state[a][i].clone();
                }
            }
        }
        state = next;
    }
    Ok(FormalTraceSeries::new((1, 0), coeffs, order))
}

/// `δ_q(λ) = q^l - q^{-l}` at `t = q^l`.
pub fn weyl_denominator<S: Scalar>(t: &S) -> Result<S> {
    Ok(t.clone() - inverse(t, "t = 0")?)
}

/// Value of `Q(μ)` on `V[0]`, `t_mu = q^{l_μ}`.
pub fn q_scalar<S: Scalar>(alg: &RankOne<S>, v: &Module<S>, t_mu: &S) -> Result<S> {
    let i0 = zero_weight_index(v)?;
    Ok(q_operator(alg, t_mu, v)?[(i0, i0)].clone())
}

/// Which normalizing factors enter `F_V`; dropping one gives a negative control.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct TraceNormalization {
    pub weyl_denominator: bool,
    pub q_operator: bool,
}

impl Default for TraceNormalization {
    fn default() -> Self {
        TraceNormalization {
            weyl_denominator: true,
            q_operator: true,
        }
    }
}

/// `F_V(λ, μ) = δ_q(λ) Ψ_V(λ, -μ-ρ) Q(-μ-ρ)⁻¹` with `s = q^{l_μ}`. Prefactor `q^{-l l_μ}`.
pub fn trace_f<S: Scalar>(alg: &RankOne<S>, v: &Module<S>, s: &S, order: usize) -> Result<FormalTraceSeries<S>> {
    trace_f_with(alg, v, s, order, TraceNormalization::default())
}

pub fn trace_f_with<S: Scalar>(
    alg: &RankOne<S>,
    v: &Module<S>,
    s: &S,
    order: usize,
    norm: TraceNormalization,
) -> Result<FormalTraceSeries<S>> {
    let q = require_quantum(alg)?;
    let t = inverse(&(q * s.clone()), "q^{l_μ} = 0")?;
    let psi = psi_series(alg, v, &t, order)?;
    let mut f = psi.clone();
    f.prefactor = (-1, -1);
    if norm.weyl_denominator {
        let mut w = vec![S::zero(); order + 1];
        w[0] = S::one();
        if order > 0 {
            w[1] = -S::one();
        }
        f = f.mul(&FormalTraceSeries::new((0, 1), w, order));
    }
    if norm.q_operator {
        let qs = q_scalar(alg, v, &t)?;
        f = f.scale(&inverse(&qs, "Q(-μ-ρ) vanishes on V[0]")?);
    }
    Ok(f)
}

/// `χ_W(q^{-2μ̄}) = Σ_m s^{-m}` over the weights of `W`, `s = q^{l_μ}`.
pub fn character<S: Scalar>(w: &Module<S>, s: &S) -> Result<S> {
    let mut acc = S::zero();
    for &m in &w.weights {
        acc = acc + s.powi(-m).ok_or_else(|| DynError::Domain("s = 0".into()))?;
    }
    Ok(acc)
}

/// `(D f)(λ) = Σ_ν a_ν(λ) f(λ + ν)` with coefficients expanded in `y = q^{-l}`.
#[derive(Clone, Debug, PartialEq)]
pub struct ShiftDifferenceOperator {
    pub q: Rational,
    /// `(ν, a_ν)` with `ν` the shift of `l`.
    pub terms: Vec<(i64, LaurentSeries)>,
}

impl ShiftDifferenceOperator {
    /// Applies to `q^{-l l_μ} g(y)` and returns the new series part; `s = q^{l_μ}`.
    pub fn apply(&self, g: &LaurentSeries, s: &Rational) -> Result<LaurentSeries> {
        let mut acc = LaurentSeries::zero();
        for (nu, a) in &self.terms {
            let qs = Scalar::powi(&self.q, -nu).ok_or_else(|| DynError::Domain("q = 0".into()))?;
            let ss = Scalar::powi(s, -nu).ok_or_else(|| DynError::Domain("s = 0".into()))?;
            acc = acc + a.clone() * g.rescale(&qs).scale(&ss);
        }
        Ok(acc)
    }

    /// Valuation floor of the coefficients and the smallest absolute precision.
    pub fn precision(&self) -> Option<i64> {
        self.terms.iter().filter_map(|(_, a)| a.abs_prec()).min()
    }
}

fn lift(m: &Module<Rational>) -> Module<LaurentSeries> {
    let c = |x: &Rational| LaurentSeries::constant(x.clone());
    Module {
        label: m.label.clone(),
        weights: m.weights.clone(),
        e: m.e.map(c),
        f: m.f.map(c),
        k: m.k.iter().map(c).collect(),
    }
}

/// `D_W` acting on `V[0]`-valued functions: coefficient of the shift `ν` is the trace of
/// `R_WV(-λ-ρ)` over `W[ν] ⊗ V[0]`. `prec` is the `y`-precision of the coefficients.
pub fn macdonald_op(
    q: &Rational,
    w: &Module<Rational>,
    v: &Module<Rational>,
    prec: usize,
) -> Result<ShiftDifferenceOperator> {
    let alg = RankOne::quantum(LaurentSeries::constant(q.clone()))?;
    let i0 = zero_weight_index(v)?;
    let (wl, vl) = (lift(w), lift(v));
    let qi = Scalar::inv(q).ok_or_else(|| DynError::Config("q = 0".into()))?;
    let t = LaurentSeries::var(prec).scale(&qi);
    let r = exchange(&alg, &wl, &vl, &t)?;
    if r.half {
        return Err(DynError::Config("exchange operator carries a half power of q".into()));
    }
    let dv = v.dim();
    let mut terms: Vec<(i64, LaurentSeries)> = Vec::new();
    for (a, &nu) in w.weights.iter().enumerate() {
        let idx = a * dv + i0;
        let entry = r.matrix[(idx, idx)].clone();
        match terms.iter_mut().find(|(n, _)| *n == nu) {
            Some((_, c)) => *c = c.clone() + entry,
            None => terms.push((nu, entry)),
        }
    }
    terms.sort_by_key(|(n, _)| *n);
    Ok(ShiftDifferenceOperator { q: q.clone(), terms })
}

fn exact_alg(q: &Rational) -> Result<RankOne<Rational>> {
    RankOne::quantum(q.clone())
}

fn y_precision(order: usize, w: &Module<Rational>) -> usize {
    let span = w.weights.iter().map(|m| m.unsigned_abs() as usize).max().unwrap_or(0);
    2 * order + 2 * span + 4
}

fn coefficient_residuals(lhs: &LaurentSeries, rhs: &LaurentSeries, upto: i64) -> Result<Vec<f64>> {
    let known = [lhs.abs_prec(), rhs.abs_prec()]
        .into_iter()
        .flatten()
        .min()
        .unwrap_or(i64::MAX);
    if known <= upto {
        return Err(DynError::Config(format!(
            "series known only below y^{known}, comparison needs y^{upto}"
        )));
    }
    let low = lhs.valuation().unwrap_or(0).min(rhs.valuation().unwrap_or(0)).min(0);
    Ok((low..=upto)
        .map(|k| (lhs.coeff(k) - rhs.coeff(k)).magnitude())
        .collect())
}

/// Coefficient-wise `D_W F_V = χ_W(q^{-2μ̄}) F_V` through `x^{order-2}`.
pub fn eigen_check(
    q: &Rational,
    v: &Module<Rational>,
    w: &Module<Rational>,
    s: &Rational,
    order: usize,
) -> Result<ResidualReport> {
    eigen_check_with(q, v, w, s, order, TraceNormalization::default())
}

pub fn eigen_check_with(
    q: &Rational,
    v: &Module<Rational>,
    w: &Module<Rational>,
    s: &Rational,
    order: usize,
    norm: TraceNormalization,
) -> Result<ResidualReport> {
    if order < 2 {
        return Err(DynError::Config("eigen check needs order >= 2".into()));
    }
    let f = trace_f_with(&exact_alg(q)?, v, s, order, norm)?;
    let d = macdonald_op(q, w, v, y_precision(order, w))?;
    let g = f.in_y();
    // prefactor q^{-l l_μ - b l} acts like l_μ -> l_μ + b under the shifts
    let s_eff = s.clone() * Scalar::powi(q, f.prefactor.1).ok_or_else(|| DynError::Config("q = 0".into()))?;
    let lhs = d.apply(&g, &s_eff)?;
    let rhs = g.scale(&character(w, s)?);
    let res = coefficient_residuals(&lhs, &rhs, 2 * (order as i64 - 2) + 1)?;
    Ok(ResidualReport::from_residuals("eigen", &res, 0, 0.0, "exact")?
        .with_param("V", &v.label)
        .with_param("W", &w.label)
        .with_param("q", q)
        .with_param("q^l_mu", s)
        .with_param("order", order))
}

/// `F_V` coefficients rebuilt from `d_0` by solving the eigen equation order by order.
pub fn eigen_recursion(
    q: &Rational,
    v: &Module<Rational>,
    w: &Module<Rational>,
    s: &Rational,
    d0: &Rational,
    order: usize,
) -> Result<Vec<Rational>> {
    let d = macdonald_op(q, w, v, y_precision(order, w))?;
    let chi = character(w, s)?;
    for (_, a) in &d.terms {
        if a.valuation().is_some_and(|v| v < 0) {
            return Err(DynError::Config("operator coefficient has a pole at x = 0".into()));
        }
    }
    let mut coeffs = vec![d0.clone()];
    for k in 1..=order {
        // coefficient of y^{2k} in D(y^{2k}) - χ y^{2k} multiplies the unknown
        let prec = 2 * k as i64 + 1;
        let mono = LaurentSeries::monomial(<Rational as Scalar>::one(), 2 * k as i64, prec);
        let diag = d.apply(&mono, s)?.coeff(2 * k as i64) - chi.clone();
        let known: Vec<Rational> = coeffs
            .iter()
            .cloned()
            .chain(std::iter::once(<Rational as Scalar>::zero()))
            .collect();
        let partial = FormalTraceSeries::new((0, 0), known, k).in_y();
        let rest = d.apply(&partial, s)?.coeff(2 * k as i64) - partial.scale(&chi).coeff(2 * k as i64);
        let inv =
            Scalar::inv(&diag).ok_or_else(|| DynError::Resonance(format!("eigen recursion resonant at x^{k}")))?;
        coeffs.push(-(rest * inv));
    }
    Ok(coeffs)
}

fn monomial_residuals(
    lhs: impl Fn(&LaurentSeries) -> Result<LaurentSeries>,
    rhs: impl Fn(&LaurentSeries) -> Result<LaurentSeries>,
    order: usize,
    prec: usize,
) -> Result<Vec<f64>> {
    let upto = 2 * (order as i64 - 2) + 1;
    let mut res = Vec::new();
    for k in 0..=order {
        let g = LaurentSeries::monomial(<Rational as Scalar>::one(), 2 * k as i64, prec as i64);
        let r = coefficient_residuals(&lhs(&g)?, &rhs(&g)?, upto)?;
        res.push(r.into_iter().fold(0.0, f64::max));
    }
    Ok(res)
}

/// Coefficient mismatches of `D1 D2 - D2 D1` on the monomials `x^m`, `m <= order`.
pub fn operator_commutator(
    d1: &ShiftDifferenceOperator,
    d2: &ShiftDifferenceOperator,
    s: &Rational,
    order: usize,
) -> Result<Vec<f64>> {
    if order < 2 {
        return Err(DynError::Config("commutator needs order >= 2".into()));
    }
    let prec = d1
        .precision()
        .into_iter()
        .chain(d2.precision())
        .min()
        .unwrap_or(i64::MAX);
    let prec = prec.clamp(0, 4 * order as i64 + 8) as usize;
    monomial_residuals(
        |g| d1.apply(&d2.apply(g, s)?, s),
        |g| d2.apply(&d1.apply(g, s)?, s),
        order,
        prec,
    )
}

/// `[D_{W1}, D_{W2}] = 0` on the monomials `x^m`, `m <= order`, through `x^{order-2}`.
pub fn commutativity_check(
    q: &Rational,
    w1: &Module<Rational>,
    w2: &Module<Rational>,
    v: &Module<Rational>,
    s: &Rational,
    order: usize,
) -> Result<ResidualReport> {
    if order < 2 {
        return Err(DynError::Config("commutativity check needs order >= 2".into()));
    }
    let prec = y_precision(order, w1) + y_precision(order, w2);
    let d1 = macdonald_op(q, w1, v, prec)?;
    let d2 = macdonald_op(q, w2, v, prec)?;
    let res = operator_commutator(&d1, &d2, s, order)?;
    Ok(ResidualReport::from_residuals("commute", &res, 0, 0.0, "exact")?
        .with_param("W1", &w1.label)
        .with_param("W2", &w2.label)
        .with_param("V", &v.label)
        .with_param("order", order))
}

/// `D_{W1⊗W2} = D_{W1} D_{W2}` on monomials through `x^{order-2}`.
pub fn tensor_product_check(
    q: &Rational,
    w1: &Module<Rational>,
    w2: &Module<Rational>,
    v: &Module<Rational>,
    s: &Rational,
    order: usize,
) -> Result<ResidualReport> {
    if order < 2 {
        return Err(DynError::Config("tensor check needs order >= 2".into()));
    }
    let w12 = crate::fusion::tensor(w1, w2);
    let prec = y_precision(order, w1) + y_precision(order, w2);
    let d1 = macdonald_op(q, w1, v, prec)?;
    let d2 = macdonald_op(q, w2, v, prec)?;
    let d12 = macdonald_op(q, &w12, v, prec)?;
    let res = monomial_residuals(|g| d12.apply(g, s), |g| d1.apply(&d2.apply(g, s)?, s), order, prec)?;
    Ok(ResidualReport::from_residuals("tensor_product", &res, 0, 0.0, "exact")?
        .with_param("W1", &w1.label)
        .with_param("W2", &w2.label)
        .with_param("V", &v.label)
        .with_param("order", order))
}

/// Smallest distance of a symmetry sample from the resonant integers.
pub const SYMMETRY_MARGIN: f64 = 0.05;

/// `F_V(μ, λ) = F_V(λ, μ)` at random real `l, l_μ ∈ [-3, -1]` for `V = L_{2k}`.
///
/// The residual bound is `tol` plus the truncation tail `(1/4)^{N+1}/(3/4) · max|c_m|`.
pub fn symmetry_check(k: u32, q: f64, order: usize, cfg: &SampleConfig) -> Result<ResidualReport> {
    symmetry_check_with(k, q, order, cfg, 0.0)
}

/// [`symmetry_check`] with `F_V(λ, μ)` multiplied by `1 + perturb`.
pub fn symmetry_check_with(k: u32, q: f64, order: usize, cfg: &SampleConfig, perturb: f64) -> Result<ResidualReport> {
    if !(0.0 < q && q < 1.0) {
        return Err(DynError::Config("symmetry check needs real q in (0, 1)".into()));
    }
    let x_max = q.powf(2.0);
    if x_max > 0.25 + 1e-12 {
        return Err(DynError::Domain(format!(
            "q = {q} puts x = q^2 outside |x| <= 1/4 at l = -1"
        )));
    }
    let alg = RankOne::quantum(C64::new(q, 0.0))?;
    let v = fd_module(&alg, 2 * k)?;
    let mut rng = cfg.rng();
    let mut draw = || loop {
        let l: f64 = rng.random_range(-3.0..-1.0);
        if (l - l.round()).abs() >= SYMMETRY_MARGIN {
            return l;
        }
    };
    let mut res = Vec::with_capacity(cfg.samples);
    let mut tail: f64 = 0.0;
    for _ in 0..cfg.samples {
        let (l, m) = (draw(), draw());
        let f_lm = trace_f(&alg, &v, &C64::new(q.powf(m), 0.0), order)?;
        let f_ml = trace_f(&alg, &v, &C64::new(q.powf(l), 0.0), order)?;
        let bound = 0.25f64.powi(order as i32 + 1) / 0.75;
        tail = tail.max(bound * f_lm.max_coeff().max(f_ml.max_coeff()));
        res.push((f_lm.eval(l, m, q) * (1.0 + perturb) - f_ml.eval(m, l, q)).norm());
    }
    let mut report = ResidualReport::from_residuals("symmetry", &res, cfg.seed, cfg.tol + tail, "float")?;
    report = report
        .with_param("V", &v.label)
        .with_param("q", q)
        .with_param("order", order)
        .with_param("tail_bound", format!("{tail:e}"));
    Ok(report)
}

/// Exact coefficients as floats, for display.
pub fn coeffs_f64(f: &FormalTraceSeries<Rational>) -> Vec<f64> {
    f.coeffs.iter().map(rational_to_f64).collect()
}

/// Diagonal `V[0]` entries of `R_WV(-λ-ρ)` as a matrix over `y`, for inspection.
pub fn exchange_at_dual(
    q: &Rational,
    w: &Module<Rational>,
    v: &Module<Rational>,
    prec: usize,
) -> Result<Matrix<LaurentSeries>> {
    let alg = RankOne::quantum(LaurentSeries::constant(q.clone()))?;
    let qi = Scalar::inv(q).ok_or_else(|| DynError::Config("q = 0".into()))?;
    let t = LaurentSeries::var(prec).scale(&qi);
    Ok(exchange(&alg, &lift(w), &lift(v), &t)?.matrix)
}
