//! Weight-graded spaces, leg embeddings and dynamically shifted evaluation.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use serde::Serialize;

use crate::error::{DynError, Result};
use crate::matrix::Matrix;
use crate::scalar::{Scalar, C64};

/// Weight of a basis vector: a vector in `Z^n`, or a single integer in rank one.
pub type Weight = Vec<i64>;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct WeightVectorSpace {
    weights: Vec<Weight>,
    label: String,
}

impl WeightVectorSpace {
    pub fn new(weights: Vec<Weight>, label: impl Into<String>) -> Result<Self> {
        let label = label.into();
        let Some(first) = weights.first() else {
            return Err(DynError::Dimension(format!("space {label} has no basis vectors")));
        };
        let rank = first.len();
        if weights.iter().any(|w| w.len() != rank) {
            return Err(DynError::Dimension(format!("space {label} mixes weight ranks")));
        }
        Ok(WeightVectorSpace { weights, label })
    }

    /// `C^n` with `weight(v_a) = e_a`.
    pub fn gl_vector(n: usize) -> Self {
        let weights = (0..n).map(|a| (0..n).map(|c| i64::from(c == a)).collect()).collect();
        WeightVectorSpace {
            weights,
            label: format!("C^{n}"),
        }
    }

    /// One-dimensional space of weight zero.
    pub fn trivial(rank: usize) -> Self {
        WeightVectorSpace {
            weights: vec![vec![0; rank]],
            label: "C".into(),
        }
    }

    /// Rank-one space with the given `h`-eigenvalues.
    pub fn rank_one(weights: &[i64], label: impl Into<String>) -> Result<Self> {
        Self::new(weights.iter().map(|&m| vec![m]).collect(), label)
    }

    /// Irreducible `L_m`: eigenvalues `m, m-2, ..., -m`.
    pub fn irreducible_sl2(m: u32) -> Self {
        let m = i64::from(m);
        WeightVectorSpace {
            weights: (0..=m).map(|j| vec![m - 2 * j]).collect(),
            label: format!("L{m}"),
        }
    }

    pub fn dim(&self) -> usize {
        self.weights.len()
    }

    pub fn rank(&self) -> usize {
        self.weights[0].len()
    }

    pub fn weights(&self) -> &[Weight] {
        &self.weights
    }

    pub fn weight(&self, i: usize) -> &Weight {
        &self.weights[i]
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    /// Tensor product with basis `(i, j) -> i * other.dim() + j`.
    pub fn tensor(&self, other: &Self) -> Result<Self> {
        if self.rank() != other.rank() {
            return Err(DynError::Dimension(format!(
                "tensoring {} (rank {}) with {} (rank {})",
                self.label,
                self.rank(),
                other.label,
                other.rank()
            )));
        }
        let mut weights = Vec::with_capacity(self.dim() * other.dim());
        for a in &self.weights {
            for b in &other.weights {
                weights.push(add_weights(a, b));
            }
        }
        Ok(WeightVectorSpace {
            weights,
            label: format!("{}⊗{}", self.label, other.label),
        })
    }

    pub fn tensor_all(spaces: &[WeightVectorSpace]) -> Result<Self> {
        let (first, rest) = spaces
            .split_first()
            .ok_or_else(|| DynError::Dimension("empty tensor product".into()))?;
        rest.iter().try_fold(first.clone(), |acc, s| acc.tensor(s))
    }
}

impl fmt::Display for WeightVectorSpace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} (dim {})", self.label, self.dim())
    }
}

pub fn add_weights(a: &[i64], b: &[i64]) -> Weight {
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

/// Weight-homogeneous linear map between graded spaces.
#[derive(Clone, Debug, PartialEq)]
pub struct GradedOperator<S> {
    pub domain: WeightVectorSpace,
    pub codomain: WeightVectorSpace,
    pub matrix: Matrix<S>,
    pub declared_weight: Weight,
}

impl<S: Scalar> GradedOperator<S> {
    pub fn new(
        domain: WeightVectorSpace,
        codomain: WeightVectorSpace,
        matrix: Matrix<S>,
        declared_weight: Weight,
    ) -> Result<Self> {
        if matrix.rows() != codomain.dim() || matrix.cols() != domain.dim() {
            return Err(DynError::Dimension(format!(
                "{}x{} matrix for {} -> {}",
                matrix.rows(),
                matrix.cols(),
                domain,
                codomain
            )));
        }
        if declared_weight.len() != domain.rank() {
            return Err(DynError::Dimension("declared weight has the wrong rank".into()));
        }
        Ok(GradedOperator {
            domain,
            codomain,
            matrix,
            declared_weight,
        })
    }

    /// Zero-weight endomorphism of `space`.
    pub fn endo(space: WeightVectorSpace, matrix: Matrix<S>) -> Result<Self> {
        let w = vec![0; space.rank()];
        Self::new(space.clone(), space, matrix, w)
    }

    pub fn identity(space: WeightVectorSpace) -> Self {
        let m = Matrix::identity(space.dim());
        Self::endo(space, m).expect("identity is well formed")
    }

    pub fn weight_defect(&self) -> f64 {
        weight_defect_matrix(&self.matrix, &self.domain, &self.codomain, &self.declared_weight)
    }

    pub fn compose(&self, rhs: &Self) -> Result<Self> {
        if rhs.codomain != self.domain {
            return Err(DynError::Dimension(format!(
                "composing {} -> {} after {} -> {}",
                self.domain, self.codomain, rhs.domain, rhs.codomain
            )));
        }
        Self::new(
            rhs.domain.clone(),
            self.codomain.clone(),
            &self.matrix * &rhs.matrix,
            add_weights(&self.declared_weight, &rhs.declared_weight),
        )
    }
}

/// Largest entry forbidden by the grading rule `wt(out) = wt(in) + declared`.
pub fn weight_defect_matrix<S: Scalar>(
    m: &Matrix<S>,
    domain: &WeightVectorSpace,
    codomain: &WeightVectorSpace,
    declared: &[i64],
) -> f64 {
    let mut worst: f64 = 0.0;
    for i in 0..m.rows() {
        for j in 0..m.cols() {
            if codomain.weight(i) != &add_weights(domain.weight(j), declared) {
                worst = worst.max(m[(i, j)].magnitude());
            }
        }
    }
    worst
}

/// Multi-index of a flat tensor-product basis index.
fn unflatten(mut idx: usize, dims: &[usize], out: &mut [usize]) {
    for k in (0..dims.len()).rev() {
        out[k] = idx % dims[k];
        idx /= dims[k];
    }
}

fn flatten(ix: &[usize], dims: &[usize]) -> usize {
    ix.iter().zip(dims).fold(0, |acc, (i, d)| acc * d + i)
}

fn check_legs(legs: (usize, usize), n: usize) -> Result<()> {
    let (i, j) = legs;
    if i == j {
        return Err(DynError::Legs(format!("repeated leg {i}")));
    }
    if i >= n || j >= n {
        return Err(DynError::Legs(format!("leg out of range for {n} factors")));
    }
    Ok(())
}

/// Places `op` (acting on `V_i ⊗ V_j`, first factor on leg `i`) into the full product,
/// with the operator chosen per basis configuration of the remaining legs.
fn embed_with<S: Scalar>(
    legs: (usize, usize),
    dims: &[usize],
    mut op_for: impl FnMut(&[usize]) -> Result<Matrix<S>>,
) -> Result<Matrix<S>> {
    let (li, lj) = legs;
    let total: usize = dims.iter().product();
    let (di, dj) = (dims[li], dims[lj]);
    let others: Vec<usize> = (0..dims.len()).filter(|&k| k != li && k != lj).collect();
    let other_dims: Vec<usize> = others.iter().map(|&k| dims[k]).collect();
    let n_other: usize = other_dims.iter().product();
    let mut out = Matrix::zeros(total, total);
    let mut oix = vec![0; others.len()];
    let mut full = vec![0; dims.len()];
    for o in 0..n_other {
        unflatten(o, &other_dims, &mut oix);
        for (slot, &k) in others.iter().enumerate() {
            full[k] = oix[slot];
        }
        let m = op_for(&full)?;
        if m.rows() != di * dj || m.cols() != di * dj {
            return Err(DynError::Dimension(format!(
                "operator is {}x{}, legs need {}",
                m.rows(),
                m.cols(),
                di * dj
            )));
        }
        for ai in 0..di {
            for aj in 0..dj {
                full[li] = ai;
                full[lj] = aj;
                let row = flatten(&full, dims);
                for bi in 0..di {
                    for bj in 0..dj {
                        let v = &m[(ai * dj + aj, bi * dj + bj)];
                        if v.is_zero() {
                            continue;
                        }
                        full[li] = bi;
                        full[lj] = bj;
                        let col = flatten(&full, dims);
                        out[(row, col)] = v.clone();
                    }
                }
                full[li] = ai;
                full[lj] = aj;
            }
        }
    }
    Ok(out)
}

/// Matrix form of `op^{ij}` on `dims[0] ⊗ ... ⊗ dims[N-1]`.
pub fn embed_matrix<S: Scalar>(op: &Matrix<S>, legs: (usize, usize), dims: &[usize]) -> Result<Matrix<S>> {
    check_legs(legs, dims.len())?;
    embed_with(legs, dims, |_| Ok(op.clone()))
}

/// Matrix form of a single-leg operator `x^{(k)}`.
pub fn embed_single<S: Scalar>(op: &Matrix<S>, leg: usize, dims: &[usize]) -> Result<Matrix<S>> {
    if leg >= dims.len() || op.rows() != dims[leg] || !op.is_square() {
        return Err(DynError::Legs(format!("single-leg embedding on leg {leg}")));
    }
    let mut acc = Matrix::<S>::identity(1);
    for (k, &d) in dims.iter().enumerate() {
        let f = if k == leg { op.clone() } else { Matrix::identity(d) };
        acc = acc.kron(&f);
    }
    Ok(acc)
}

/// `op^{ij}` as a graded operator on the product of `spaces`.
pub fn embed_pair<S: Scalar>(
    op: &GradedOperator<S>,
    legs: (usize, usize),
    spaces: &[WeightVectorSpace],
) -> Result<GradedOperator<S>> {
    check_legs(legs, spaces.len())?;
    let pair = spaces[legs.0].tensor(&spaces[legs.1])?;
    if op.domain.dim() != pair.dim() || op.codomain.dim() != pair.dim() {
        return Err(DynError::Dimension(format!(
            "operator on {} placed on legs {:?} = {}",
            op.domain, legs, pair
        )));
    }
    let dims: Vec<usize> = spaces.iter().map(WeightVectorSpace::dim).collect();
    let m = embed_with(legs, &dims, |_| Ok(op.matrix.clone()))?;
    let full = WeightVectorSpace::tensor_all(spaces)?;
    GradedOperator::new(full.clone(), full, m, op.declared_weight.clone())
}

/// Signed weight `Σ sign_k · wt(basis index on leg k)` of the shift legs.
fn shift_weight(spaces: &[WeightVectorSpace], shift_spec: &[(usize, i64)], ix: &[usize]) -> Weight {
    let rank = spaces[0].rank();
    let mut w = vec![0; rank];
    for &(k, s) in shift_spec {
        for (c, wc) in spaces[k].weight(ix[k]).iter().enumerate() {
            w[c] += s * wc;
        }
    }
    w
}

/// Generic dynamical evaluation: `F(shift(λ, Σ signed weights of shift legs))` on legs `(i,j)`.
///
/// `shift(λ, w)` must return the argument for a total shift weight `w`
/// (for instance `λ - γ w` additively, or `t q^{-w}` multiplicatively).
pub fn dynamical_eval_with<L, S: Scalar>(
    f: impl Fn(&L) -> Result<Matrix<S>>,
    lambda: &L,
    legs: (usize, usize),
    shift_spec: &[(usize, i64)],
    spaces: &[WeightVectorSpace],
    shift: impl Fn(&L, &Weight) -> L,
) -> Result<Matrix<S>> {
    check_legs(legs, spaces.len())?;
    for &(k, _) in shift_spec {
        if k == legs.0 || k == legs.1 || k >= spaces.len() {
            return Err(DynError::Legs(format!(
                "shift leg {k} collides with legs {:?} or is out of range",
                legs
            )));
        }
    }
    let dims: Vec<usize> = spaces.iter().map(WeightVectorSpace::dim).collect();
    let mut cache: BTreeMap<Weight, Matrix<S>> = BTreeMap::new();
    embed_with(legs, &dims, |ix| {
        let w = shift_weight(spaces, shift_spec, ix);
        if let Some(m) = cache.get(&w) {
            return Ok(m.clone());
        }
        let m = f(&shift(lambda, &w))?;
        cache.insert(w, m.clone());
        Ok(m)
    })
}

/// Affine pole hyperplane `Σ α_c x_c = offset` (mod `period` when given) in a real slice.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PoleHyperplane {
    pub alpha: Vec<f64>,
    pub offset: f64,
    pub period: Option<f64>,
}

impl PoleHyperplane {
    /// The hyperplane `x_a - x_b = offset`.
    pub fn difference(n: usize, a: usize, b: usize, offset: f64, period: Option<f64>) -> Self {
        let mut alpha = vec![0.0; n];
        alpha[a] = 1.0;
        alpha[b] = -1.0;
        PoleHyperplane { alpha, offset, period }
    }

    pub fn distance(&self, x: &[C64]) -> f64 {
        let mut v = C64::new(-self.offset, 0.0);
        for (a, xc) in self.alpha.iter().zip(x) {
            v += xc * *a;
        }
        if let Some(p) = self.period {
            v.re -= p * (v.re / p).round();
        }
        let norm = self.alpha.iter().map(|a| a * a).sum::<f64>().sqrt();
        v.norm() / norm.max(f64::MIN_POSITIVE)
    }
}

pub type DynEval = Arc<dyn Fn(&[C64]) -> Result<Matrix<C64>> + Send + Sync>;
pub type SpectralEval = Arc<dyn Fn(C64, &[C64]) -> Result<Matrix<C64>> + Send + Sync>;

/// Meromorphic `λ ↦ End_h(V ⊗ W)` with step `γ`, floating-point backend.
#[derive(Clone)]
pub struct DynamicalOperator {
    pub label: String,
    pub first: WeightVectorSpace,
    pub second: WeightVectorSpace,
    pub step: C64,
    pub poles: Vec<PoleHyperplane>,
    eval: DynEval,
}

impl fmt::Debug for DynamicalOperator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("DynamicalOperator")
            .field("label", &self.label)
            .field("first", &self.first)
            .field("second", &self.second)
            .field("step", &self.step)
            .finish_non_exhaustive()
    }
}

impl DynamicalOperator {
    pub fn new(
        label: impl Into<String>,
        first: WeightVectorSpace,
        second: WeightVectorSpace,
        step: C64,
        poles: Vec<PoleHyperplane>,
        eval: impl Fn(&[C64]) -> Result<Matrix<C64>> + Send + Sync + 'static,
    ) -> Self {
        DynamicalOperator {
            label: label.into(),
            first,
            second,
            step,
            poles,
            eval: Arc::new(eval),
        }
    }

    pub fn eval(&self, lambda: &[C64]) -> Result<Matrix<C64>> {
        for p in &self.poles {
            if p.distance(lambda) < 1e-12 {
                return Err(DynError::Pole(format!("{} at λ = {:?}", self.label, lambda)));
            }
        }
        (self.eval)(lambda)
    }

    pub fn eval_graded(&self, lambda: &[C64]) -> Result<GradedOperator<C64>> {
        GradedOperator::endo(self.first.tensor(&self.second)?, self.eval(lambda)?)
    }

    pub fn rank(&self) -> usize {
        self.first.rank()
    }

    /// Same operator with a new evaluation map (poles and spaces kept).
    pub fn with_eval(
        &self,
        label: impl Into<String>,
        eval: impl Fn(&[C64]) -> Result<Matrix<C64>> + Send + Sync + 'static,
    ) -> Self {
        DynamicalOperator {
            label: label.into(),
            eval: Arc::new(eval),
            ..self.clone()
        }
    }
}

/// Meromorphic `(u, λ) ↦ End_h(V ⊗ W)`, floating-point backend.
#[derive(Clone)]
pub struct SpectralDynamicalOperator {
    pub label: String,
    pub first: WeightVectorSpace,
    pub second: WeightVectorSpace,
    pub step: C64,
    pub poles: Vec<PoleHyperplane>,
    /// Poles in the spectral variable, stored as hyperplanes in the one-dimensional `u` line.
    pub u_poles: Vec<PoleHyperplane>,
    eval: SpectralEval,
}

impl fmt::Debug for SpectralDynamicalOperator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SpectralDynamicalOperator")
            .field("label", &self.label)
            .field("first", &self.first)
            .field("second", &self.second)
            .field("step", &self.step)
            .finish_non_exhaustive()
    }
}

impl SpectralDynamicalOperator {
    pub fn new(
        label: impl Into<String>,
        first: WeightVectorSpace,
        second: WeightVectorSpace,
        step: C64,
        poles: Vec<PoleHyperplane>,
        u_poles: Vec<PoleHyperplane>,
        eval: impl Fn(C64, &[C64]) -> Result<Matrix<C64>> + Send + Sync + 'static,
    ) -> Self {
        SpectralDynamicalOperator {
            label: label.into(),
            first,
            second,
            step,
            poles,
            u_poles,
            eval: Arc::new(eval),
        }
    }

    pub fn eval(&self, u: C64, lambda: &[C64]) -> Result<Matrix<C64>> {
        for p in &self.poles {
            if p.distance(lambda) < 1e-12 {
                return Err(DynError::Pole(format!("{} at λ = {:?}", self.label, lambda)));
            }
        }
        for p in &self.u_poles {
            if p.distance(&[u]) < 1e-12 {
                return Err(DynError::Pole(format!("{} at u = {u}", self.label)));
            }
        }
        (self.eval)(u, lambda)
    }

    pub fn rank(&self) -> usize {
        self.first.rank()
    }

    pub fn with_eval(
        &self,
        label: impl Into<String>,
        eval: impl Fn(C64, &[C64]) -> Result<Matrix<C64>> + Send + Sync + 'static,
    ) -> Self {
        SpectralDynamicalOperator {
            label: label.into(),
            eval: Arc::new(eval),
            ..self.clone()
        }
    }

    /// Freezes the spectral argument.
    pub fn at_u(&self, u: C64) -> DynamicalOperator {
        let me = self.clone();
        DynamicalOperator::new(
            format!("{}(u={u})", self.label),
            self.first.clone(),
            self.second.clone(),
            self.step,
            self.poles.clone(),
            move |l| me.eval(u, l),
        )
    }

    /// Spectral operator that ignores `u`.
    pub fn from_constant_u(op: &DynamicalOperator) -> Self {
        let inner = op.clone();
        SpectralDynamicalOperator::new(
            op.label.clone(),
            op.first.clone(),
            op.second.clone(),
            op.step,
            op.poles.clone(),
            Vec::new(),
            move |_, l| inner.eval(l),
        )
    }
}

/// `λ - γ w` in coordinates.
pub fn additive_shift(lambda: &[C64], w: &[i64], gamma: C64) -> Vec<C64> {
    lambda.iter().zip(w).map(|(l, &wc)| l - gamma * wc as f64).collect()
}

/// `F^{ij}(λ - γ Σ_k sign_k h^{(k)})` on the product of `spaces`.
pub fn dynamical_eval(
    f: &DynamicalOperator,
    lambda: &[C64],
    legs: (usize, usize),
    shift_spec: &[(usize, i64)],
    spaces: &[WeightVectorSpace],
    gamma: C64,
) -> Result<Matrix<C64>> {
    dynamical_eval_with(
        |l: &Vec<C64>| f.eval(l),
        &lambda.to_vec(),
        legs,
        shift_spec,
        spaces,
        |l, w| additive_shift(l, w, gamma),
    )
}

/// Spectral version of [`dynamical_eval`] with a fixed `u`.
pub fn dynamical_eval_spectral(
    f: &SpectralDynamicalOperator,
    u: C64,
    lambda: &[C64],
    legs: (usize, usize),
    shift_spec: &[(usize, i64)],
    spaces: &[WeightVectorSpace],
    gamma: C64,
) -> Result<Matrix<C64>> {
    dynamical_eval_with(
        |l: &Vec<C64>| f.eval(u, l),
        &lambda.to_vec(),
        legs,
        shift_spec,
        spaces,
        |l, w| additive_shift(l, w, gamma),
    )
}

/// Flip `P: A ⊗ B -> B ⊗ A`.
pub fn flip_matrix<S: Scalar>(da: usize, db: usize) -> Matrix<S> {
    let mut p = Matrix::zeros(da * db, da * db);
    for i in 0..da {
        for j in 0..db {
            p[(j * da + i, i * db + j)] = S::one();
        }
    }
    p
}

/// `X^{21}` for `X` on `A ⊗ B`, as an operator on `B ⊗ A`.
pub fn opposite<S: Scalar>(x: &Matrix<S>, da: usize, db: usize) -> Matrix<S> {
    let p = flip_matrix::<S>(da, db);
    &(&p * x) * &p.transpose()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{rat, Rational};

    fn unit(n: usize, a: usize, b: usize) -> Matrix<Rational> {
        let mut m = Matrix::zeros(n, n);
        m[(a, b)] = rat(1, 1);
        m
    }

    #[test]
    fn flip_on_outer_legs() {
        let v = WeightVectorSpace::gl_vector(2);
        let p = GradedOperator::endo(v.tensor(&v).unwrap(), flip_matrix::<Rational>(2, 2)).unwrap();
        let spaces = vec![v.clone(), v.clone(), v.clone()];
        let e = embed_pair(&p, (0, 2), &spaces).unwrap();
        // v+ ⊗ v- ⊗ v- is index (0,1,1) = 3; its image v- ⊗ v- ⊗ v+ is (1,1,0) = 6.
        let mut x = vec![rat(0, 1); 8];
        x[3] = rat(1, 1);
        let y = e.matrix.apply(&x);
        assert_eq!(y[6], rat(1, 1));
        assert_eq!(y.iter().filter(|c| !Scalar::is_zero(*c)).count(), 1);
    }

    #[test]
    fn weight_defects() {
        let v = WeightVectorSpace::gl_vector(2);
        let vv = v.tensor(&v).unwrap();
        let good = unit(2, 0, 1).kron(&unit(2, 1, 0));
        let bad = unit(2, 0, 1).kron(&unit(2, 0, 1));
        assert_eq!(
            GradedOperator::endo(vv.clone(), good.clone()).unwrap().weight_defect(),
            0.0
        );
        assert_eq!(GradedOperator::endo(vv.clone(), bad).unwrap().weight_defect(), 1.0);
        let spaces = vec![v.clone(), v.clone(), v.clone()];
        let e = embed_pair(&GradedOperator::endo(vv, good).unwrap(), (1, 2), &spaces).unwrap();
        assert_eq!(e.weight_defect(), 0.0);
    }

    #[test]
    fn leg_errors() {
        let v = WeightVectorSpace::gl_vector(2);
        let id = GradedOperator::<Rational>::identity(v.tensor(&v).unwrap());
        let spaces = vec![v.clone(), v.clone(), v.clone()];
        assert!(matches!(embed_pair(&id, (1, 1), &spaces), Err(DynError::Legs(_))));
        assert!(matches!(embed_pair(&id, (0, 3), &spaces), Err(DynError::Legs(_))));
        let big = GradedOperator::<Rational>::identity(WeightVectorSpace::gl_vector(3));
        assert!(matches!(embed_pair(&big, (0, 1), &spaces), Err(DynError::Dimension(_))));
    }

    #[test]
    fn identity_embeds_to_identity() {
        let v = WeightVectorSpace::gl_vector(3);
        let id = GradedOperator::<Rational>::identity(v.tensor(&v).unwrap());
        let e = embed_pair(&id, (0, 1), &[v.clone(), v.clone(), v]).unwrap();
        assert_eq!(e.matrix, Matrix::identity(27));
    }

    #[test]
    fn pole_distance_is_periodic() {
        let p = PoleHyperplane::difference(2, 0, 1, 0.0, Some(1.0));
        assert!(p.distance(&[C64::new(3.0, 0.0), C64::new(1.0, 0.0)]) < 1e-15);
        assert!((p.distance(&[C64::new(0.25, 0.0), C64::new(0.0, 0.0)]) - 0.25 / 2f64.sqrt()).abs() < 1e-15);
    }
}
