//! Rank-one fusion engine for `sl_2` and `U_q(sl_2)`: modules, Verma
//! intertwiners, fusion operators, exchange operators and the `Q` operator.
//!
//! Everything is generic over [`Scalar`], so the same code runs on exact
//! rationals, on floats and on truncated power series. The dynamical
//! coordinate is `l = (λ,α)` in the classical case and `t = q^l` in the
//! quantum case.
//!
//! Conventions: `f v_j = v_{j+1}`, `e v_j = [j][m-j+1] v_{j-1}`, `K = q^h`,
//! `Δe = e⊗K + 1⊗e`, `Δf = f⊗1 + K⁻¹⊗f`, and
//! `R = q^{h⊗h/2} Σ_n q^{n(n-1)/2}(q-q⁻¹)ⁿ/[n]! eⁿ⊗fⁿ`.

use crate::error::{DynError, Result};
use crate::matrix::Matrix;
use crate::scalar::Scalar;
use crate::tensorcore::{opposite, WeightVectorSpace};
use crate::verify::qdybe_defect_with;

fn resonance(msg: impl Into<String>) -> DynError {
    DynError::Resonance(msg.into())
}

fn div<S: Scalar>(a: S, b: &S, what: impl FnOnce() -> String) -> Result<S> {
    a.div(b).ok_or_else(|| resonance(what()))
}

/// `U(sl_2)` or `U_q(sl_2)` at a fixed `q`.
#[derive(Clone, Debug, PartialEq)]
pub enum RankOne<S> {
    Classical,
    Quantum { q: S },
}

impl<S: Scalar> RankOne<S> {
    pub fn classical() -> Self {
        RankOne::Classical
    }

    pub fn quantum(q: S) -> Result<Self> {
        let qi = q.inv().ok_or_else(|| DynError::Config("q must be invertible".into()))?;
        if (q.clone() - qi).inv().is_none() {
            return Err(DynError::Config("q = ±1 is not a valid quantum parameter".into()));
        }
        Ok(RankOne::Quantum { q })
    }

    pub fn is_classical(&self) -> bool {
        matches!(self, RankOne::Classical)
    }

    pub fn q(&self) -> Option<&S> {
        match self {
            RankOne::Classical => None,
            RankOne::Quantum { q } => Some(q),
        }
    }

    /// `q^k`; `1` in the classical case.
    pub fn qpow(&self, k: i64) -> S {
        match self {
            RankOne::Classical => S::one(),
            RankOne::Quantum { q } => Scalar::powi(q, k).expect("q invertible"),
        }
    }

    /// `[n] = q^{n-1} + q^{n-3} + ... + q^{1-n}`.
    pub fn bracket(&self, n: i64) -> S {
        match self {
            RankOne::Classical => S::from_i64(n),
            RankOne::Quantum { .. } => {
                if n < 0 {
                    return -self.bracket(-n);
                }
                let mut acc = S::zero();
                for j in 0..n {
                    acc = acc + self.qpow(n - 1 - 2 * j);
                }
                acc
            }
        }
    }

    pub fn factorial(&self, n: i64) -> S {
        (1..=n).fold(S::one(), |acc, k| acc * self.bracket(k))
    }

    /// `[l + k]` with `l` given by the coordinate `lam`.
    pub fn bracket_lam(&self, lam: &S, k: i64) -> Result<S> {
        match self {
            RankOne::Classical => Ok(lam.clone() + S::from_i64(k)),
            RankOne::Quantum { q } => {
                let ti = lam
                    .inv()
                    .ok_or_else(|| DynError::Domain("q^l must be invertible".into()))?;
                let num = lam.clone() * self.qpow(k) - ti * self.qpow(-k);
                let den = q.clone() - self.qpow(-1);
                div(num, &den, || "q - 1/q vanishes".into())
            }
        }
    }

    /// Coordinate of `l + m`.
    pub fn shift_lam(&self, lam: &S, m: i64) -> S {
        match self {
            RankOne::Classical => lam.clone() + S::from_i64(m),
            RankOne::Quantum { .. } => lam.clone() * self.qpow(m),
        }
    }

    /// `q^{n(n-1)/2}(q-q⁻¹)ⁿ/[n]!`.
    pub fn r_coefficient(&self, n: i64) -> Result<S> {
        let RankOne::Quantum { q } = self else {
            return Err(DynError::Config("the universal R-matrix needs q ≠ 1".into()));
        };
        let base = q.clone() - self.qpow(-1);
        let num = self.qpow(n * (n - 1) / 2) * Scalar::powi(&base, n).expect("nonnegative power");
        div(num, &self.factorial(n), || format!("[{n}]! vanishes"))
    }

    /// `D(m') / D(m)` for `D(m) = q^{2Θ(m)}`, `Θ(m) = lm/2 + m/2 - m²/4`; needs `m' - m` even.
    fn theta_ratio(&self, lam: &S, m_num: i64, m_den: i64) -> Result<S> {
        let d = m_num - m_den;
        debug_assert!(d % 2 == 0);
        let tq = Scalar::powi(lam, d).ok_or_else(|| DynError::Domain("q^l must be invertible".into()))?;
        Ok(tq * self.qpow(d - (m_num * m_num - m_den * m_den) / 2))
    }

    /// `Θ(m_j) - Θ(m_i)` in the classical case.
    fn theta_difference(&self, lam: &S, m_j: i64, m_i: i64) -> S {
        let d = m_j - m_i;
        S::from_ratio(d, 2) * (lam.clone() + S::one()) - S::from_ratio(m_j * m_j - m_i * m_i, 4)
    }
}

/// A finite-dimensional weight module: `h`-eigenvalues, `e`, `f` and the diagonal of `K`.
#[derive(Clone, Debug, PartialEq)]
pub struct Module<S> {
    pub label: String,
    pub weights: Vec<i64>,
    pub e: Matrix<S>,
    pub f: Matrix<S>,
    pub k: Vec<S>,
}

impl<S: Scalar> Module<S> {
    pub fn dim(&self) -> usize {
        self.weights.len()
    }

    pub fn space(&self) -> WeightVectorSpace {
        WeightVectorSpace::rank_one(&self.weights, self.label.clone()).expect("nonempty module")
    }

    pub fn k_inv(&self) -> Vec<S> {
        self.k.iter().map(|x| x.inv().expect("K invertible")).collect()
    }

    /// Basis indices of the weight space `V[m]`.
    pub fn weight_space(&self, m: i64) -> Vec<usize> {
        (0..self.dim()).filter(|&i| self.weights[i] == m).collect()
    }

    pub fn unit(&self, i: usize) -> Vec<S> {
        (0..self.dim())
            .map(|j| if i == j { S::one() } else { S::zero() })
            .collect()
    }
}

/// `L_m`.
pub fn fd_module<S: Scalar>(alg: &RankOne<S>, m: u32) -> Result<Module<S>> {
    let d = m as usize + 1;
    let mi = i64::from(m);
    for j in 1..=mi + 1 {
        if alg.bracket(j).is_zero() {
            return Err(DynError::Domain(format!(
                "[{j}] = 0: q is a root of unity of small order"
            )));
        }
    }
    let mut e = Matrix::zeros(d, d);
    let mut f = Matrix::zeros(d, d);
    for j in 0..d - 1 {
        f[(j + 1, j)] = S::one();
    }
    for j in 1..d {
        let jj = j as i64;
        e[(j - 1, j)] = alg.bracket(jj) * alg.bracket(mi - jj + 1);
    }
    let weights: Vec<i64> = (0..d as i64).map(|j| mi - 2 * j).collect();
    let k = weights.iter().map(|&w| alg.qpow(w)).collect();
    Ok(Module {
        label: format!("L{m}"),
        weights,
        e,
        f,
        k,
    })
}

/// `A ⊗ B` through the coproduct.
pub fn tensor<S: Scalar>(a: &Module<S>, b: &Module<S>) -> Module<S> {
    let ia = Matrix::identity(a.dim());
    let ib = Matrix::identity(b.dim());
    let e = &a.e.kron(&Matrix::diagonal(&b.k)) + &ia.kron(&b.e);
    let f = &a.f.kron(&ib) + &Matrix::diagonal(&a.k_inv()).kron(&b.f);
    let mut weights = Vec::with_capacity(a.dim() * b.dim());
    let mut k = Vec::with_capacity(a.dim() * b.dim());
    for (wa, ka) in a.weights.iter().zip(&a.k) {
        for (wb, kb) in b.weights.iter().zip(&b.k) {
            weights.push(wa + wb);
            k.push(ka.clone() * kb.clone());
        }
    }
    Module {
        label: format!("{}⊗{}", a.label, b.label),
        weights,
        e,
        f,
        k,
    }
}

pub fn tensor_all<S: Scalar>(mods: &[Module<S>]) -> Result<Module<S>> {
    let (first, rest) = mods
        .split_first()
        .ok_or_else(|| DynError::Dimension("empty tensor product".into()))?;
    Ok(rest.iter().fold(first.clone(), |acc, m| tensor(&acc, m)))
}

/// Largest violation of the defining relations on `m`.
pub fn relation_defect<S: Scalar>(alg: &RankOne<S>, m: &Module<S>) -> f64 {
    let d = m.dim();
    let ef = &(&m.e * &m.f) - &(&m.f * &m.e);
    let mut worst: f64 = 0.0;
    match alg {
        RankOne::Classical => {
            let h = Matrix::diagonal(&m.weights.iter().map(|&w| S::from_i64(w)).collect::<Vec<_>>());
            worst = worst.max((&h.commutator(&m.e) - &m.e.scale(&S::from_i64(2))).max_abs());
            worst = worst.max((&h.commutator(&m.f) + &m.f.scale(&S::from_i64(2))).max_abs());
            worst = worst.max((&ef - &h).max_abs());
        }
        RankOne::Quantum { q } => {
            let ki = m.k_inv();
            for i in 0..d {
                for j in 0..d {
                    let ke = m.e[(i, j)].clone() * m.k[i].clone() * ki[j].clone() - m.e[(i, j)].clone() * alg.qpow(2);
                    let kf = m.f[(i, j)].clone() * m.k[i].clone() * ki[j].clone() - m.f[(i, j)].clone() * alg.qpow(-2);
                    worst = worst.max(ke.magnitude()).max(kf.magnitude());
                }
            }
            let den = (q.clone() - alg.qpow(-1)).inv().expect("checked at construction");
            let rhs: Vec<S> =
                m.k.iter()
                    .zip(&ki)
                    .map(|(a, b)| (a.clone() - b.clone()) * den.clone())
                    .collect();
            worst = worst.max((&ef - &Matrix::diagonal(&rhs)).max_abs());
        }
    }
    worst
}

/// `q^{half/2} · matrix`; `half` is constant since `m_w m_v` has constant parity.
#[derive(Clone, Debug, PartialEq)]
pub struct HalfPowerMatrix<S> {
    pub half: bool,
    pub matrix: Matrix<S>,
}

fn parity_of_products<S: Scalar>(w: &Module<S>, v: &Module<S>) -> Result<bool> {
    let mut seen = [false; 2];
    for a in &w.weights {
        for b in &v.weights {
            seen[(a * b).rem_euclid(2) as usize] = true;
        }
    }
    if seen[0] && seen[1] {
        return Err(DynError::Config(format!(
            "weights of {}⊗{} mix parities; q^(h⊗h/2) is not a global half power",
            w.label, v.label
        )));
    }
    Ok(seen[1])
}

fn e_f_series<S: Scalar>(alg: &RankOne<S>, w: &Module<S>, v: &Module<S>) -> Result<Matrix<S>> {
    let d = w.dim() * v.dim();
    let mut s = Matrix::zeros(d, d);
    let (mut en, mut fnn) = (Matrix::identity(w.dim()), Matrix::identity(v.dim()));
    for n in 0..w.dim().min(v.dim()) as i64 {
        s = &s + &en.kron(&fnn).scale(&alg.r_coefficient(n)?);
        en = &en * &w.e;
        fnn = &fnn * &v.f;
    }
    Ok(s)
}

/// Universal R-matrix on `W ⊗ V`.
pub fn universal_r_eval<S: Scalar>(alg: &RankOne<S>, w: &Module<S>, v: &Module<S>) -> Result<HalfPowerMatrix<S>> {
    let s = e_f_series(alg, w, v)?;
    let half = parity_of_products(w, v)?;
    let dv = v.dim();
    let h = i64::from(half);
    let m = Matrix::from_fn(s.rows(), s.cols(), |r, c| {
        let e = w.weights[r / dv] * v.weights[r % dv] - h;
        s[(r, c)].clone() * alg.qpow(e / 2)
    });
    Ok(HalfPowerMatrix { half, matrix: m })
}

/// `R_0 = R q^{-h⊗h/2}`, unipotent.
pub fn r0_eval<S: Scalar>(alg: &RankOne<S>, w: &Module<S>, v: &Module<S>) -> Result<Matrix<S>> {
    let s = e_f_series(alg, w, v)?;
    let dv = v.dim();
    let hh = |i: usize| w.weights[i / dv] * v.weights[i % dv];
    Ok(Matrix::from_fn(s.rows(), s.cols(), |r, c| {
        if s[(r, c)].is_zero() {
            return S::zero();
        }
        s[(r, c)].clone() * alg.qpow((hh(r) - hh(c)) / 2)
    }))
}

fn second_leg_weights<S: Scalar>(w: &Module<S>, v: &Module<S>) -> (Vec<i64>, Vec<i64>) {
    let dv = v.dim();
    let d = w.dim() * dv;
    let second = (0..d).map(|i| v.weights[i % dv]).collect();
    let total = (0..d).map(|i| w.weights[i / dv] + v.weights[i % dv]).collect();
    (second, total)
}

/// Source operator of the fixed-point equation: `f⊗e` or `R_0^{21} - 1`.
fn abrr_source<S: Scalar>(alg: &RankOne<S>, w: &Module<S>, v: &Module<S>) -> Result<Matrix<S>> {
    match alg {
        RankOne::Classical => Ok(w.f.kron(&v.e)),
        RankOne::Quantum { .. } => {
            let r21 = opposite(&r0_eval(alg, v, w)?, v.dim(), w.dim());
            Ok(&r21 - &Matrix::identity(w.dim() * v.dim()))
        }
    }
}

/// The fusion operator `J_WV(λ)` as the unique triangular solution of the fixed-point equation.
pub fn abrr_solve<S: Scalar>(alg: &RankOne<S>, w: &Module<S>, v: &Module<S>, lam: &S) -> Result<Matrix<S>> {
    let src = abrr_source(alg, w, v)?;
    let (m2, total) = second_leg_weights(w, v);
    let d = m2.len();
    let mut j = Matrix::<S>::identity(d);
    let maxlev = (m2.iter().max().expect("nonempty") - m2.iter().min().expect("nonempty")) / 2;
    for n in 1..=maxlev {
        for col in 0..d {
            for row in 0..d {
                if m2[row] - m2[col] != 2 * n || total[row] != total[col] {
                    continue;
                }
                let mut acc = S::zero();
                for k in 0..d {
                    if src[(row, k)].is_zero() || j[(k, col)].is_zero() {
                        continue;
                    }
                    let term = src[(row, k)].clone() * j[(k, col)].clone();
                    acc = acc
                        + match alg {
                            RankOne::Classical => term,
                            RankOne::Quantum { .. } => term * alg.theta_ratio(lam, m2[k], m2[col])?,
                        };
                }
                let den = match alg {
                    RankOne::Classical => alg.theta_difference(lam, m2[col], m2[row]),
                    RankOne::Quantum { .. } => S::one() - alg.theta_ratio(lam, m2[row], m2[col])?,
                };
                j[(row, col)] = div(acc, &den, || {
                    format!(
                        "Θ(λ) eigenvalues coincide on second-leg weights {} and {}",
                        m2[row], m2[col]
                    )
                })?;
            }
        }
    }
    Ok(j)
}

/// Residual of `[J, 1⊗Θ] = (f⊗e)J` (classical) or `J q^{2Θ} = R_0^{21} q^{2Θ} J` (quantum),
/// the latter divided through by the column's `q^{2Θ}`.
pub fn abrr_defect<S: Scalar>(alg: &RankOne<S>, w: &Module<S>, v: &Module<S>, lam: &S, j: &Matrix<S>) -> Result<f64> {
    let src = abrr_source(alg, w, v)?;
    let (m2, _) = second_leg_weights(w, v);
    let d = m2.len();
    let mut worst: f64 = 0.0;
    for row in 0..d {
        for col in 0..d {
            let mut rhs = S::zero();
            for k in 0..d {
                if src[(row, k)].is_zero() || j[(k, col)].is_zero() {
                    continue;
                }
                let term = src[(row, k)].clone() * j[(k, col)].clone();
                rhs = rhs
                    + match alg {
                        RankOne::Classical => term,
                        RankOne::Quantum { .. } => term * alg.theta_ratio(lam, m2[k], m2[col])?,
                    };
            }
            let lhs = if j[(row, col)].is_zero() {
                S::zero()
            } else {
                match alg {
                    RankOne::Classical => j[(row, col)].clone() * alg.theta_difference(lam, m2[col], m2[row]),
                    RankOne::Quantum { .. } => {
                        j[(row, col)].clone() * (S::one() - alg.theta_ratio(lam, m2[row], m2[col])?)
                    }
                }
            };
            worst = worst.max((lhs - rhs).magnitude());
        }
    }
    Ok(worst)
}

/// Universal fusion operator `J = Σ_n fⁿKⁿ ⊗ eⁿ φ_n(h)` at a fixed `λ`.
#[derive(Clone, Debug, PartialEq)]
pub struct TriangularSeries<S> {
    pub alg: RankOne<S>,
    pub lam: S,
    pub closed_form: bool,
}

impl<S: Scalar> TriangularSeries<S> {
    /// Coefficients from the weight-graded recursion.
    pub fn universal(alg: RankOne<S>, lam: S) -> Self {
        TriangularSeries {
            alg,
            lam,
            closed_form: false,
        }
    }

    /// The classical closed form `φ_n(m) = ((-1)ⁿ/n!) Π_{i<n} (l-m-i)⁻¹`.
    pub fn closed_form(lam: S) -> Self {
        TriangularSeries {
            alg: RankOne::Classical,
            lam,
            closed_form: true,
        }
    }

    /// `φ_0(m), ..., φ_nmax(m)`; `m` is the weight the coefficient is evaluated at.
    pub fn coefficients(&self, nmax: usize, m: i64) -> Result<Vec<S>> {
        let l = &self.lam;
        let mut phi = vec![S::one()];
        for n in 1..=nmax as i64 {
            let val = match (&self.alg, self.closed_form) {
                (RankOne::Classical, true) => {
                    let mut den = S::one();
                    for i in 0..n {
                        den = den * n_times(i + 1) * (l.clone() - S::from_i64(m + i));
                    }
                    let sign = if n % 2 == 0 { S::one() } else { -S::one() };
                    div(sign, &den, || {
                        format!("closed-form denominator vanishes at n={n}, h={m}")
                    })?
                }
                (RankOne::Classical, false) => {
                    let den = S::from_i64(n) * (l.clone() + S::from_i64(1 - m - n));
                    div(-phi[(n - 1) as usize].clone(), &den, || {
                        format!("fusion recursion is resonant at n={n}, weight {m}")
                    })?
                }
                (RankOne::Quantum { .. }, _) => {
                    let a = &self.alg;
                    let mut acc = S::zero();
                    for k in 1..=n {
                        let e = -2 * k * k - 2 * k * (n - k) - k * (m + 2 * n - 2 * k);
                        acc = acc
                            + a.r_coefficient(k)?
                                * a.qpow(e)
                                * a.theta_ratio(l, m + 2 * n - 2 * k, m)?
                                * phi[(n - k) as usize].clone();
                    }
                    let den = S::one() - a.theta_ratio(l, m + 2 * n, m)?;
                    div(acc, &den, || {
                        format!("fusion recursion is resonant at n={n}, weight {m}")
                    })?
                }
            };
            phi.push(val);
        }
        Ok(phi)
    }

    /// `J_WV(λ)`.
    pub fn eval(&self, w: &Module<S>, v: &Module<S>) -> Result<Matrix<S>> {
        let nmax = w.dim().min(v.dim()) - 1;
        let dv = v.dim();
        let d = w.dim() * dv;
        let tables = v
            .weights
            .iter()
            .map(|&m| self.coefficients(nmax, m))
            .collect::<Result<Vec<_>>>()?;
        let kw = Matrix::diagonal(&w.k);
        let mut j = Matrix::zeros(d, d);
        let (mut fpow, mut kpow, mut en) = (
            Matrix::identity(w.dim()),
            Matrix::identity(w.dim()),
            Matrix::identity(dv),
        );
        for n in 0..=nmax {
            let phi = Matrix::diagonal(&tables.iter().map(|t| t[n].clone()).collect::<Vec<_>>());
            j = &j + &(&fpow * &kpow).kron(&(&en * &phi));
            fpow = &fpow * &w.f;
            kpow = &kpow * &kw;
            en = &en * &v.e;
        }
        Ok(j)
    }
}

fn n_times<S: Scalar>(k: i64) -> S {
    S::from_i64(k)
}

/// Classical closed-form `J_WV(λ)`.
pub fn closed_form_j<S: Scalar>(w: &Module<S>, v: &Module<S>, l: &S) -> Result<Matrix<S>> {
    TriangularSeries::closed_form(l.clone()).eval(w, v)
}

/// Universal-series `J_WV(λ)`.
pub fn universal_j<S: Scalar>(alg: &RankOne<S>, w: &Module<S>, v: &Module<S>, lam: &S) -> Result<Matrix<S>> {
    TriangularSeries::universal(alg.clone(), lam.clone()).eval(w, v)
}

/// Top coefficients `Φ(x_μ) = Σ_k fᵏx_{μ-ν} ⊗ v_k` of the intertwiner `M_μ -> M_{μ-ν} ⊗ V`.
#[derive(Clone, Debug, PartialEq)]
pub struct VermaIntertwiner<S> {
    pub lam: S,
    /// Coordinate of `μ - ν`.
    pub target: S,
    pub nu: i64,
    pub coeffs: Vec<Vec<S>>,
}

impl<S: Scalar> VermaIntertwiner<S> {
    /// `⟨Φ⟩`, the coefficient of `x_{μ-ν}`.
    pub fn expectation(&self) -> &[S] {
        &self.coeffs[0]
    }

    /// Largest defect of `Δ(e) Φ(x_μ) = 0` over the computed depths.
    pub fn e_relation_defect(&self, alg: &RankOne<S>, v: &Module<S>) -> Result<f64> {
        let mut worst: f64 = 0.0;
        for k in 0..self.coeffs.len() - 1 {
            let kk = k as i64;
            let c = alg.bracket(kk + 1) * alg.bracket_lam(&self.target, -kk)?;
            let kv: Vec<S> = self.coeffs[k + 1]
                .iter()
                .zip(&v.k)
                .map(|(x, kx)| x.clone() * kx.clone() * c.clone())
                .collect();
            let ev = v.e.apply(&self.coeffs[k]);
            for (a, b) in kv.into_iter().zip(ev) {
                worst = worst.max((a + b).magnitude());
            }
        }
        Ok(worst)
    }
}

fn vector_weight<S: Scalar>(v: &Module<S>, vec: &[S]) -> Result<i64> {
    let mut nu = None;
    for (i, x) in vec.iter().enumerate() {
        if x.is_zero() {
            continue;
        }
        match nu {
            None => nu = Some(v.weights[i]),
            Some(n) if n != v.weights[i] => {
                return Err(DynError::Config("intertwiner vector is not a weight vector".into()))
            }
            _ => {}
        }
    }
    nu.ok_or_else(|| DynError::Config("intertwiner vector is zero".into()))
}

pub fn verma_intertwiner<S: Scalar>(
    alg: &RankOne<S>,
    lam: &S,
    v: &Module<S>,
    vec: &[S],
    depth: usize,
) -> Result<VermaIntertwiner<S>> {
    if vec.len() != v.dim() {
        return Err(DynError::Dimension(format!(
            "vector of length {} in {}",
            vec.len(),
            v.label
        )));
    }
    let nu = vector_weight(v, vec)?;
    let target = alg.shift_lam(lam, -nu);
    let ki = v.k_inv();
    let mut coeffs = vec![vec.to_vec()];
    for k in 0..depth as i64 {
        let den = alg.bracket(k + 1) * alg.bracket_lam(&target, -k)?;
        let ev = v.e.apply(coeffs.last().expect("nonempty"));
        let next = ev
            .into_iter()
            .zip(&ki)
            .map(|(x, kx)| {
                div(-(x * kx.clone()), &den, || {
                    format!("Verma module of the target weight is reducible at depth {}", k + 1)
                })
            })
            .collect::<Result<Vec<_>>>()?;
        coeffs.push(next);
    }
    Ok(VermaIntertwiner {
        lam: lam.clone(),
        target,
        nu,
        coeffs,
    })
}

/// `J_WV(λ)` from expectation values of `Φ^w_{λ-ν} ∘ Φ^v_λ`.
pub fn fusion_via_intertwiners<S: Scalar>(
    alg: &RankOne<S>,
    w: &Module<S>,
    v: &Module<S>,
    lam: &S,
) -> Result<Matrix<S>> {
    let (dw, dv) = (w.dim(), v.dim());
    let mut j = Matrix::<S>::zeros(dw * dv, dw * dv);
    for iv in 0..dv {
        let phi_v = verma_intertwiner(alg, lam, v, &v.unit(iv), dv)?;
        for iw in 0..dw {
            let inner = alg.shift_lam(&phi_v.target, -w.weights[iw]);
            let scale = match alg {
                RankOne::Classical => S::one(),
                RankOne::Quantum { .. } => inner
                    .inv()
                    .ok_or_else(|| DynError::Domain("q^l must be invertible".into()))?,
            };
            // only K⁻¹⊗f keeps the highest vector of the inner Verma module
            let mut fw = w.unit(iw);
            let mut factor = S::one();
            for vk in &phi_v.coeffs {
                for (a, x) in fw.iter().enumerate() {
                    if x.is_zero() {
                        continue;
                    }
                    for (b, y) in vk.iter().enumerate() {
                        if !y.is_zero() {
                            let cur = j[(a * dv + b, iw * dv + iv)].clone();
                            j[(a * dv + b, iw * dv + iv)] = cur + factor.clone() * x.clone() * y.clone();
                        }
                    }
                }
                fw = w.f.apply(&fw);
                factor = factor * scale.clone();
            }
        }
    }
    Ok(j)
}

/// `J⁻¹` for unipotent `J = 1 + N`, as the finite series `Σ (-N)^k`.
pub fn unipotent_inverse<S: Scalar>(j: &Matrix<S>) -> Matrix<S> {
    let d = j.rows();
    let n = j - &Matrix::identity(d);
    let mut acc = Matrix::identity(d);
    let mut term = Matrix::identity(d);
    for _ in 1..d.max(1) {
        term = -&(&term * &n);
        if term.data().iter().all(Scalar::is_zero) {
            break;
        }
        acc = &acc + &term;
    }
    acc
}

/// Exchange operator `R_VW(λ) = J_VW⁻¹ R^{21} J_WV^{21}` on `V ⊗ W` (`R = 1` classically).
pub fn exchange<S: Scalar>(alg: &RankOne<S>, v: &Module<S>, w: &Module<S>, lam: &S) -> Result<HalfPowerMatrix<S>> {
    let jvw = abrr_solve(alg, v, w, lam)?;
    let jwv = abrr_solve(alg, w, v, lam)?;
    let mut mid = opposite(&jwv, w.dim(), v.dim());
    let mut half = false;
    if !alg.is_classical() {
        let r = universal_r_eval(alg, w, v)?;
        half = r.half;
        mid = &opposite(&r.matrix, w.dim(), v.dim()) * &mid;
    }
    Ok(HalfPowerMatrix {
        half,
        matrix: &unipotent_inverse(&jvw) * &mid,
    })
}

/// QDYBE defect (step 1) of `λ ↦ R_VV(λ)`, ignoring the global half power.
pub fn exchange_qdybe_defect<S: Scalar>(alg: &RankOne<S>, v: &Module<S>, lam: &S) -> Result<Matrix<S>> {
    qdybe_defect_with(
        |l: &S| Ok(exchange(alg, v, v, l)?.matrix),
        lam,
        &v.space(),
        |l: &S, w: &Vec<i64>| alg.shift_lam(l, -w[0]),
    )
}

/// `J^{12,3}(λ) J^{12}(λ-h^{(3)}) - J^{1,23}(λ) J^{23}(λ)` on `V1 ⊗ V2 ⊗ V3`.
pub fn twist_defect<S: Scalar>(
    alg: &RankOne<S>,
    v1: &Module<S>,
    v2: &Module<S>,
    v3: &Module<S>,
    lam: &S,
) -> Result<Matrix<S>> {
    twist_defect_impl(alg, v1, v2, v3, lam, true)
}

/// Same as [`twist_defect`] with `J^{12}(λ)` in place of `J^{12}(λ-h^{(3)})`.
pub fn static_twist_defect<S: Scalar>(
    alg: &RankOne<S>,
    v1: &Module<S>,
    v2: &Module<S>,
    v3: &Module<S>,
    lam: &S,
) -> Result<Matrix<S>> {
    twist_defect_impl(alg, v1, v2, v3, lam, false)
}

fn twist_defect_impl<S: Scalar>(
    alg: &RankOne<S>,
    v1: &Module<S>,
    v2: &Module<S>,
    v3: &Module<S>,
    lam: &S,
    shifted: bool,
) -> Result<Matrix<S>> {
    let v12 = tensor(v1, v2);
    let v23 = tensor(v2, v3);
    let j12_3 = universal_j(alg, &v12, v3, lam)?;
    let j1_23 = universal_j(alg, v1, &v23, lam)?;
    let d3 = v3.dim();
    let d = v12.dim() * d3;
    let mut j12s = Matrix::zeros(d, d);
    for (c, &m) in v3.weights.iter().enumerate() {
        let mut p = Matrix::zeros(d3, d3);
        p[(c, c)] = S::one();
        let at = if shifted { alg.shift_lam(lam, -m) } else { lam.clone() };
        j12s = &j12s + &abrr_solve(alg, v1, v2, &at)?.kron(&p);
    }
    let j23 = Matrix::identity(v1.dim()).kron(&abrr_solve(alg, v2, v3, lam)?);
    Ok(&(&j12_3 * &j12s) - &(&j1_23 * &j23))
}

/// `J^{1...N}(λ) = J^{1,2...N}(λ) J^{2,3...N}(λ) ... J^{N-1,N}(λ)`.
pub fn multicomponent_j<S: Scalar>(alg: &RankOne<S>, mods: &[Module<S>], lam: &S) -> Result<Matrix<S>> {
    if mods.len() < 2 {
        return Err(DynError::Config(
            "multicomponent fusion needs at least two modules".into(),
        ));
    }
    let total: usize = mods.iter().map(Module::dim).product();
    let mut acc = Matrix::identity(total);
    let mut before = 1;
    for i in 0..mods.len() - 1 {
        let rest = tensor_all(&mods[i + 1..])?;
        let ji = universal_j(alg, &mods[i], &rest, lam)?;
        acc = &acc * &Matrix::identity(before).kron(&ji);
        before *= mods[i].dim();
    }
    Ok(acc)
}

/// `Q(λ) = Σ_n φ_n(-h) (S⁻¹e)ⁿ fⁿ Kⁿ` on `V`, with `S⁻¹e = -K⁻¹e`.
pub fn q_operator<S: Scalar>(alg: &RankOne<S>, lam: &S, v: &Module<S>) -> Result<Matrix<S>> {
    let series = TriangularSeries::universal(alg.clone(), lam.clone());
    let d = v.dim();
    let tables = v
        .weights
        .iter()
        .map(|&m| series.coefficients(d - 1, -m))
        .collect::<Result<Vec<_>>>()?;
    let sinv_e = -&(&Matrix::diagonal(&v.k_inv()) * &v.e);
    let kd = Matrix::diagonal(&v.k);
    let mut q = Matrix::zeros(d, d);
    let (mut se, mut fpow, mut kpow) = (Matrix::identity(d), Matrix::identity(d), Matrix::identity(d));
    for n in 0..d {
        let phi = Matrix::diagonal(&tables.iter().map(|t| t[n].clone()).collect::<Vec<_>>());
        q = &q + &(&phi * &(&se * &(&fpow * &kpow)));
        se = &se * &sinv_e;
        fpow = &fpow * &v.f;
        kpow = &kpow * &kd;
    }
    Ok(q)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{rat, Rational};

    fn half() -> RankOne<Rational> {
        RankOne::quantum(rat(1, 2)).unwrap()
    }

    #[test]
    fn vector_representation() {
        let l1 = fd_module(&RankOne::<Rational>::Classical, 1).unwrap();
        assert_eq!(l1.e[(0, 1)], rat(1, 1));
        assert_eq!(l1.f[(1, 0)], rat(1, 1));
        assert_eq!(l1.weights, vec![1, -1]);
    }

    #[test]
    fn relations_hold_exactly() {
        let c = RankOne::<Rational>::Classical;
        for m in 0..4 {
            assert_eq!(relation_defect(&c, &fd_module(&c, m).unwrap()), 0.0);
            assert_eq!(relation_defect(&half(), &fd_module(&half(), m).unwrap()), 0.0);
        }
        let q = half();
        let t = tensor(&fd_module(&q, 1).unwrap(), &fd_module(&q, 2).unwrap());
        assert_eq!(relation_defect(&q, &t), 0.0);
    }

    #[test]
    fn bad_q_rejected() {
        assert!(RankOne::quantum(rat(1, 1)).is_err());
        assert!(RankOne::quantum(rat(-1, 1)).is_err());
        assert!(RankOne::quantum(rat(0, 1)).is_err());
        assert!(universal_r_eval(
            &RankOne::<Rational>::Classical,
            &fd_module(&RankOne::Classical, 1).unwrap(),
            &fd_module(&RankOne::Classical, 1).unwrap()
        )
        .is_err());
    }

    #[test]
    fn r0_is_unipotent_with_single_entry_on_vectors() {
        let q = half();
        let l1 = fd_module(&q, 1).unwrap();
        let r0 = r0_eval(&q, &l1, &l1).unwrap();
        let off: Vec<(usize, usize)> = (0..4)
            .flat_map(|i| (0..4).map(move |j| (i, j)))
            .filter(|&(i, j)| i != j && !Scalar::is_zero(&r0[(i, j)]))
            .collect();
        assert_eq!(off, vec![(1, 2)]);
        for i in 0..4 {
            assert_eq!(r0[(i, i)], rat(1, 1));
        }
        // (q - q⁻¹) q^{n(b-a) - 2n²} with a = -1, b = 1, n = 1
        assert_eq!(r0[(1, 2)], rat(-3, 2) * rat(1, 1));
    }

    #[test]
    fn classical_fusion_on_vectors() {
        let c = RankOne::<Rational>::Classical;
        let l1 = fd_module(&c, 1).unwrap();
        let l = rat(3, 7);
        let j = abrr_solve(&c, &l1, &l1, &l).unwrap();
        // J(v+⊗v-) = v+⊗v- - (1/(l+1)) v-⊗v+
        assert_eq!(j[(2, 1)], -(rat(1, 1) / (l.clone() + rat(1, 1))));
        assert_eq!(j[(1, 1)], rat(1, 1));
        assert_eq!(closed_form_j(&l1, &l1, &l).unwrap(), j);
        assert_eq!(fusion_via_intertwiners(&c, &l1, &l1, &l).unwrap(), j);
    }

    #[test]
    fn resonance_is_reported() {
        let c = RankOne::<Rational>::Classical;
        let l1 = fd_module(&c, 1).unwrap();
        let err = abrr_solve(&c, &l1, &l1, &rat(-1, 1)).unwrap_err();
        assert!(matches!(err, DynError::Resonance(_)));
    }

    #[test]
    fn trivial_module_gives_identity() {
        let q = half();
        let l0 = fd_module(&q, 0).unwrap();
        let l2 = fd_module(&q, 2).unwrap();
        let l = rat(2, 5);
        assert_eq!(fusion_via_intertwiners(&q, &l0, &l2, &l).unwrap(), Matrix::identity(3));
        assert_eq!(fusion_via_intertwiners(&q, &l2, &l0, &l).unwrap(), Matrix::identity(3));
        assert_eq!(q_operator(&q, &l, &l0).unwrap(), Matrix::identity(1));
    }

    #[test]
    fn unipotent_inverse_is_inverse() {
        let q = half();
        let l2 = fd_module(&q, 2).unwrap();
        let j = abrr_solve(&q, &l2, &l2, &rat(3, 5)).unwrap();
        assert_eq!(&j * &unipotent_inverse(&j), Matrix::identity(9));
    }
}
