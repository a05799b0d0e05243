//! Residual engines for the quantum identities: QDYBE with and without spectral
//! parameter, Hecke condition, unitarity, the RLL relation, tensor products of
//! representations and morphisms.

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{DynError, Result};
use crate::matrix::Matrix;
use crate::scalar::{Scalar, C64};
use crate::tensorcore::{
    additive_shift, dynamical_eval, dynamical_eval_spectral, dynamical_eval_with, flip_matrix, DynamicalOperator,
    PoleHyperplane, SpectralDynamicalOperator, Weight, WeightVectorSpace,
};

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ResidualReport {
    pub identity: String,
    pub samples: usize,
    pub seed: u64,
    pub residual_max: f64,
    pub residual_mean: f64,
    pub tol: f64,
    pub pass: bool,
    pub params: BTreeMap<String, String>,
    pub backend: String,
}

impl ResidualReport {
    /// Summarizes per-sample residuals. The mean is accumulated in sorted order so the
    /// report does not depend on the order in which samples were evaluated.
    pub fn from_residuals(
        identity: impl Into<String>,
        residuals: &[f64],
        seed: u64,
        tol: f64,
        backend: &str,
    ) -> Result<Self> {
        if residuals.is_empty() {
            return Err(DynError::NoSamples(0));
        }
        let mut sorted = residuals.to_vec();
        sorted.sort_by(|a, b| a.total_cmp(b));
        let residual_max = if residuals.iter().any(|r| r.is_nan()) {
            f64::NAN
        } else {
            *sorted.last().expect("nonempty")
        };
        let residual_mean = sorted.iter().sum::<f64>() / sorted.len() as f64;
        Ok(ResidualReport {
            identity: identity.into(),
            samples: residuals.len(),
            seed,
            residual_max,
            residual_mean,
            tol,
            pass: residual_max <= tol,
            params: BTreeMap::new(),
            backend: backend.to_string(),
        })
    }

    /// Single exact residual (no sampling).
    pub fn exact(identity: impl Into<String>, residual: f64, tol: f64) -> Self {
        Self::from_residuals(identity, &[residual], 0, tol, "exact").expect("one residual")
    }

    pub fn with_param(mut self, key: &str, value: impl ToString) -> Self {
        self.params.insert(key.to_string(), value.to_string());
        self
    }

    pub fn with_params(mut self, params: &BTreeMap<String, String>) -> Self {
        self.params.extend(params.clone());
        self
    }
}

/// Seeded sampling policy.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SampleConfig {
    pub samples: usize,
    pub seed: u64,
    pub tol: f64,
    /// Minimal distance to declared pole hyperplanes.
    pub margin: f64,
    /// λ is drawn from `[-half_width, half_width]^n`.
    pub half_width: f64,
}

impl SampleConfig {
    pub fn new(samples: usize, seed: u64, tol: f64) -> Self {
        SampleConfig {
            samples,
            seed,
            tol,
            margin: 0.05,
            half_width: 5.0,
        }
    }

    pub fn rng(&self) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(self.seed)
    }
}

impl Default for SampleConfig {
    fn default() -> Self {
        SampleConfig::new(20, 42, 1e-10)
    }
}

const MAX_ATTEMPTS_PER_SAMPLE: usize = 200;

/// Draws λ avoiding every pole hyperplane at all shifts `λ - γ w`, `w ∈ shifts`.
pub fn sample_lambda(
    rng: &mut ChaCha8Rng,
    n: usize,
    cfg: &SampleConfig,
    poles: &[PoleHyperplane],
    shifts: &[Weight],
    gamma: C64,
) -> Result<Vec<C64>> {
    for _ in 0..MAX_ATTEMPTS_PER_SAMPLE {
        let l: Vec<C64> = (0..n)
            .map(|_| C64::new(rng.random_range(-cfg.half_width..cfg.half_width), 0.0))
            .collect();
        let ok = shifts.iter().all(|w| {
            let s = additive_shift(&l, w, gamma);
            poles.iter().all(|p| p.distance(&s) >= cfg.margin)
        });
        if ok {
            return Ok(l);
        }
    }
    Err(DynError::NoSamples(MAX_ATTEMPTS_PER_SAMPLE))
}

/// Spectral points `u_i ∈ [0.1, 0.9] + 0.05i` whose differences avoid the `u` poles.
pub fn sample_spectral(
    rng: &mut ChaCha8Rng,
    count: usize,
    cfg: &SampleConfig,
    u_poles: &[PoleHyperplane],
) -> Result<Vec<C64>> {
    for _ in 0..MAX_ATTEMPTS_PER_SAMPLE {
        let us: Vec<C64> = (0..count).map(|_| C64::new(rng.random_range(0.1..0.9), 0.05)).collect();
        let mut args = Vec::new();
        if count == 1 {
            args.push(us[0]);
            args.push(-us[0]);
        }
        for i in 0..count {
            for j in i + 1..count {
                args.push(us[i] - us[j]);
                args.push(us[j] - us[i]);
            }
        }
        let ok = args
            .iter()
            .all(|u| u_poles.iter().all(|p| p.distance(&[*u]) >= cfg.margin));
        if ok {
            return Ok(us);
        }
    }
    Err(DynError::NoSamples(MAX_ATTEMPTS_PER_SAMPLE))
}

/// All single-leg weights of the given spaces together with zero.
pub fn shift_set(spaces: &[&WeightVectorSpace]) -> Vec<Weight> {
    let rank = spaces[0].rank();
    let mut out = vec![vec![0; rank]];
    for s in spaces {
        for w in s.weights() {
            if !out.contains(w) {
                out.push(w.clone());
            }
        }
    }
    out
}

/// `R12(λ-h3) R13(λ) R23(λ-h1) - R23(λ) R13(λ-h2) R12(λ)` for any backend and shift rule.
pub fn qdybe_defect_with<L, S: Scalar>(
    f: impl Fn(&L) -> Result<Matrix<S>>,
    lambda: &L,
    space: &WeightVectorSpace,
    shift: impl Fn(&L, &Weight) -> L + Copy,
) -> Result<Matrix<S>> {
    let spaces = [space.clone(), space.clone(), space.clone()];
    let ev = |legs, spec: &[(usize, i64)]| dynamical_eval_with(&f, lambda, legs, spec, &spaces, shift);
    let lhs = &(&ev((0, 1), &[(2, 1)])? * &ev((0, 2), &[])?) * &ev((1, 2), &[(0, 1)])?;
    let rhs = &(&ev((1, 2), &[])? * &ev((0, 2), &[(1, 1)])?) * &ev((0, 1), &[])?;
    Ok(&lhs - &rhs)
}

fn square_space(first: &WeightVectorSpace, second: &WeightVectorSpace, what: &str) -> Result<WeightVectorSpace> {
    if first != second {
        return Err(DynError::Dimension(format!("{what} needs an operator on V⊗V")));
    }
    Ok(first.clone())
}

/// QDYBE defect at one point.
pub fn qdybe_defect(r: &DynamicalOperator, lambda: &[C64], gamma: C64) -> Result<f64> {
    let v = square_space(&r.first, &r.second, "QDYBE")?;
    let spaces = [v.clone(), v.clone(), v];
    let ev = |legs, spec: &[(usize, i64)]| dynamical_eval(r, lambda, legs, spec, &spaces, gamma);
    let lhs = &(&ev((0, 1), &[(2, 1)])? * &ev((0, 2), &[])?) * &ev((1, 2), &[(0, 1)])?;
    let rhs = &(&ev((1, 2), &[])? * &ev((0, 2), &[(1, 1)])?) * &ev((0, 1), &[])?;
    Ok(lhs.max_abs_diff(&rhs))
}

/// Spectral QDYBE defect at `(u_1, u_2, u_3; λ)`.
pub fn qdybe_spectral_defect(r: &SpectralDynamicalOperator, us: &[C64], lambda: &[C64], gamma: C64) -> Result<f64> {
    let v = square_space(&r.first, &r.second, "QDYBE")?;
    let spaces = [v.clone(), v.clone(), v];
    let (u12, u13, u23) = (us[0] - us[1], us[0] - us[2], us[1] - us[2]);
    let ev = |u, legs, spec: &[(usize, i64)]| dynamical_eval_spectral(r, u, lambda, legs, spec, &spaces, gamma);
    let lhs = &(&ev(u12, (0, 1), &[(2, 1)])? * &ev(u13, (0, 2), &[])?) * &ev(u23, (1, 2), &[(0, 1)])?;
    let rhs = &(&ev(u23, (1, 2), &[])? * &ev(u13, (0, 2), &[(1, 1)])?) * &ev(u12, (0, 1), &[])?;
    Ok(lhs.max_abs_diff(&rhs))
}

fn collect(
    identity: &str,
    cfg: &SampleConfig,
    backend: &str,
    mut one: impl FnMut(&mut ChaCha8Rng) -> Result<f64>,
) -> Result<ResidualReport> {
    if cfg.samples == 0 {
        return Err(DynError::Config("samples must be at least 1".into()));
    }
    let mut rng = cfg.rng();
    let mut res = Vec::with_capacity(cfg.samples);
    for _ in 0..cfg.samples {
        res.push(one(&mut rng)?);
    }
    Ok(
        ResidualReport::from_residuals(identity, &res, cfg.seed, cfg.tol, backend)?
            .with_param("samples_margin", cfg.margin),
    )
}

pub fn qdybe_residual(r: &DynamicalOperator, gamma: C64, cfg: &SampleConfig) -> Result<ResidualReport> {
    let shifts = shift_set(&[&r.first]);
    Ok(collect("qdybe", cfg, "float", |rng| {
        let l = sample_lambda(rng, r.rank(), cfg, &r.poles, &shifts, gamma)?;
        qdybe_defect(r, &l, gamma)
    })?
    .with_param("family", &r.label))
}

pub fn qdybe_spectral_residual(
    r: &SpectralDynamicalOperator,
    gamma: C64,
    cfg: &SampleConfig,
) -> Result<ResidualReport> {
    let shifts = shift_set(&[&r.first]);
    Ok(collect("qdybe-spectral", cfg, "float", |rng| {
        let l = sample_lambda(rng, r.rank(), cfg, &r.poles, &shifts, gamma)?;
        let us = sample_spectral(rng, 3, cfg, &r.u_poles)?;
        qdybe_spectral_defect(r, &us, &l, gamma)
    })?
    .with_param("family", &r.label))
}

/// `(PR - 1)(PR + q)` at one point.
pub fn hecke_defect(r: &DynamicalOperator, q: C64, lambda: &[C64]) -> Result<f64> {
    let d = r.first.dim();
    let pr = &flip_matrix::<C64>(d, d) * &r.eval(lambda)?;
    let id = Matrix::<C64>::identity(d * d);
    let prod = &(&pr - &id) * &(&pr + &id.scale(&q));
    Ok(prod.max_abs())
}

pub fn hecke_check(r: &DynamicalOperator, q: C64, cfg: &SampleConfig) -> Result<ResidualReport> {
    square_space(&r.first, &r.second, "Hecke check")?;
    let shifts = shift_set(&[&r.first]);
    Ok(collect("hecke", cfg, "float", |rng| {
        let l = sample_lambda(rng, r.rank(), cfg, &r.poles, &shifts[..1], r.step)?;
        hecke_defect(r, q, &l)
    })?
    .with_param("family", &r.label)
    .with_param("q", q))
}

/// `R(u,λ) R^{21}(-u,λ) - 1` at one point.
pub fn unitarity_defect(r: &SpectralDynamicalOperator, u: C64, lambda: &[C64]) -> Result<f64> {
    let d = r.first.dim();
    let p = flip_matrix::<C64>(d, d);
    let r21 = &(&p * &r.eval(-u, lambda)?) * &p;
    let prod = &r.eval(u, lambda)? * &r21;
    Ok(prod.max_abs_diff(&Matrix::identity(d * d)))
}

pub fn unitarity_check(r: &SpectralDynamicalOperator, cfg: &SampleConfig) -> Result<ResidualReport> {
    square_space(&r.first, &r.second, "unitarity check")?;
    let shifts = shift_set(&[&r.first]);
    Ok(collect("unitarity", cfg, "float", |rng| {
        let l = sample_lambda(rng, r.rank(), cfg, &r.poles, &shifts[..1], r.step)?;
        let u = sample_spectral(rng, 1, cfg, &r.u_poles)?[0];
        unitarity_defect(r, u, &l)
    })?
    .with_param("family", &r.label))
}

/// RLL defect on `V ⊗ V ⊗ W` at one point.
pub fn rll_defect(
    r: &SpectralDynamicalOperator,
    l_op: &SpectralDynamicalOperator,
    us: &[C64],
    lambda: &[C64],
    gamma: C64,
) -> Result<f64> {
    let v = square_space(&r.first, &r.second, "RLL")?;
    if l_op.first != v {
        return Err(DynError::Dimension("L must act on V⊗W with the same V as R".into()));
    }
    let spaces = [v.clone(), v, l_op.second.clone()];
    let (u12, u13, u23) = (us[0] - us[1], us[0] - us[2], us[1] - us[2]);
    let rr = |u, legs, spec: &[(usize, i64)]| dynamical_eval_spectral(r, u, lambda, legs, spec, &spaces, gamma);
    let ll = |u, legs, spec: &[(usize, i64)]| dynamical_eval_spectral(l_op, u, lambda, legs, spec, &spaces, gamma);
    let lhs = &(&rr(u12, (0, 1), &[(2, 1)])? * &ll(u13, (0, 2), &[])?) * &ll(u23, (1, 2), &[(0, 1)])?;
    let rhs = &(&ll(u23, (1, 2), &[])? * &ll(u13, (0, 2), &[(1, 1)])?) * &rr(u12, (0, 1), &[])?;
    Ok(lhs.max_abs_diff(&rhs))
}

pub fn rll_residual(
    r: &SpectralDynamicalOperator,
    l_op: &SpectralDynamicalOperator,
    gamma: C64,
    cfg: &SampleConfig,
) -> Result<ResidualReport> {
    let shifts = shift_set(&[&r.first, &l_op.second]);
    let mut poles = r.poles.clone();
    poles.extend(l_op.poles.iter().cloned());
    let mut u_poles = r.u_poles.clone();
    u_poles.extend(l_op.u_poles.iter().cloned());
    Ok(collect("rll", cfg, "float", |rng| {
        let l = sample_lambda(rng, r.rank(), cfg, &poles, &shifts, gamma)?;
        let us = sample_spectral(rng, 3, cfg, &u_poles)?;
        rll_defect(r, l_op, &us, &l, gamma)
    })?
    .with_param("R", &r.label)
    .with_param("L", &l_op.label))
}

/// `L_{W⊗U}(u,λ) = L_W^{12}(u, λ-γh^3) L_U^{13}(u, λ)` on `V ⊗ (W ⊗ U)`.
pub fn tensor_rep(
    l_w: &SpectralDynamicalOperator,
    l_u: &SpectralDynamicalOperator,
    gamma: C64,
) -> Result<SpectralDynamicalOperator> {
    if l_w.first != l_u.first {
        return Err(DynError::Dimension("representations of different V".into()));
    }
    let v = l_w.first.clone();
    let w = l_w.second.clone();
    let u_space = l_u.second.clone();
    let wu = w.tensor(&u_space)?;
    let (a, b) = (l_w.clone(), l_u.clone());
    let spaces = [v.clone(), w, u_space];
    let mut poles = l_w.poles.clone();
    poles.extend(l_u.poles.iter().cloned());
    let mut u_poles = l_w.u_poles.clone();
    u_poles.extend(l_u.u_poles.iter().cloned());
    Ok(SpectralDynamicalOperator::new(
        format!("{}⊗{}", l_w.label, l_u.label),
        v,
        wu,
        gamma,
        poles,
        u_poles,
        move |u, l| {
            let x = dynamical_eval_spectral(&a, u, l, (0, 1), &[(2, 1)], &spaces, gamma)?;
            let y = dynamical_eval_spectral(&b, u, l, (0, 2), &[], &spaces, gamma)?;
            Ok(&x * &y)
        },
    ))
}

/// Morphism defect `(1⊗f(λ)) L_W(u,λ) - L_{W'}(u,λ) (1⊗f(λ-γh^1))` at one point.
pub fn morphism_defect(
    f: &dyn Fn(&[C64]) -> Result<Matrix<C64>>,
    l_w: &SpectralDynamicalOperator,
    l_w2: &SpectralDynamicalOperator,
    u: C64,
    lambda: &[C64],
    gamma: C64,
) -> Result<f64> {
    let v = &l_w.first;
    let (dv, dw, dw2) = (v.dim(), l_w.second.dim(), l_w2.second.dim());
    let f0 = f(lambda)?;
    if f0.rows() != dw2 || f0.cols() != dw {
        return Err(DynError::Dimension("morphism has the wrong shape".into()));
    }
    let left = Matrix::<C64>::identity(dv).kron(&f0);
    let mut right = Matrix::<C64>::zeros(dv * dw2, dv * dw);
    for a in 0..dv {
        let fa = f(&additive_shift(lambda, v.weight(a), gamma))?;
        for i in 0..dw2 {
            for j in 0..dw {
                right[(a * dw2 + i, a * dw + j)] = fa[(i, j)];
            }
        }
    }
    let lhs = &left * &l_w.eval(u, lambda)?;
    let rhs = &l_w2.eval(u, lambda)? * &right;
    Ok(lhs.max_abs_diff(&rhs))
}

pub fn morphism_check(
    f: &dyn Fn(&[C64]) -> Result<Matrix<C64>>,
    l_w: &SpectralDynamicalOperator,
    l_w2: &SpectralDynamicalOperator,
    gamma: C64,
    cfg: &SampleConfig,
) -> Result<ResidualReport> {
    if l_w.first != l_w2.first {
        return Err(DynError::Dimension(
            "morphism between representations of different V".into(),
        ));
    }
    let shifts = shift_set(&[&l_w.first]);
    let mut poles = l_w.poles.clone();
    poles.extend(l_w2.poles.iter().cloned());
    let mut u_poles = l_w.u_poles.clone();
    u_poles.extend(l_w2.u_poles.iter().cloned());
    collect("morphism", cfg, "float", |rng| {
        let l = sample_lambda(rng, l_w.rank(), cfg, &poles, &shifts, gamma)?;
        let u = sample_spectral(rng, 1, cfg, &u_poles)?[0];
        morphism_defect(f, l_w, l_w2, u, &l, gamma)
    })
}

/// The trivial representation `(C, 1)` of an R-matrix on `V ⊗ V`.
pub fn trivial_rep(v: &WeightVectorSpace) -> SpectralDynamicalOperator {
    let d = v.dim();
    SpectralDynamicalOperator::new(
        "trivial",
        v.clone(),
        WeightVectorSpace::trivial(v.rank()),
        C64::new(1.0, 0.0),
        Vec::new(),
        Vec::new(),
        move |_, _| Ok(Matrix::identity(d)),
    )
}

/// Weight defect of an operator at sampled λ.
pub fn weight_defect_sampled(r: &DynamicalOperator, cfg: &SampleConfig) -> Result<ResidualReport> {
    let shifts = shift_set(&[&r.first]);
    collect("weight-defect", cfg, "float", |rng| {
        let l = sample_lambda(rng, r.rank(), cfg, &r.poles, &shifts[..1], r.step)?;
        Ok(r.eval_graded(&l)?.weight_defect())
    })
}
