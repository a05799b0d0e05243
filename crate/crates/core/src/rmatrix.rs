//! Quantum dynamical R-matrices of the vector representation of `gl_n`, built from
//! the common form `R = Σ E_aa⊗E_aa + Σ_{a≠b} α_ab E_aa⊗E_bb + Σ_{a≠b} β_ab E_ab⊗E_ba`.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use crate::error::{DynError, Result};
use crate::matrix::Matrix;
use crate::scalar::C64;
use crate::specfun::{wave, EllipticParams, WaveKind};
use crate::tensorcore::{DynamicalOperator, PoleHyperplane, SpectralDynamicalOperator, WeightVectorSpace};

/// Coefficient `(a, b, u, λ) ↦ value`; `u` is ignored by non-spectral tables.
pub type Coefficient = Arc<dyn Fn(usize, usize, C64, &[C64]) -> C64 + Send + Sync>;
/// Diagonal factor `(a, u, λ) ↦ value` multiplying `E_aa⊗E_aa`.
pub type DiagonalFactor = Arc<dyn Fn(usize, C64, &[C64]) -> C64 + Send + Sync>;
/// Overall scalar `u ↦ c(u)`.
pub type ScalarFactor = Arc<dyn Fn(C64) -> C64 + Send + Sync>;

/// `q^x := exp(x log q)` with the principal logarithm.
pub fn qpow(q: C64, x: C64) -> C64 {
    (x * q.ln()).exp()
}

fn c(re: f64) -> C64 {
    C64::new(re, 0.0)
}

/// α/β data of an R-matrix in the standard form.
///
/// `diagonal` and `scalar` default to 1; they only become nontrivial after gauge
/// transformations that rescale the `E_aa⊗E_aa` entries or the whole operator.
#[derive(Clone)]
pub struct AlphaBetaTable {
    pub label: String,
    pub n: usize,
    pub alpha: Coefficient,
    pub beta: Coefficient,
    pub diagonal: Option<DiagonalFactor>,
    pub scalar: Option<ScalarFactor>,
    pub spectral: bool,
    pub step: C64,
    pub poles: Vec<PoleHyperplane>,
    pub u_poles: Vec<PoleHyperplane>,
}

impl fmt::Debug for AlphaBetaTable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("AlphaBetaTable")
            .field("label", &self.label)
            .field("n", &self.n)
            .field("spectral", &self.spectral)
            .field("step", &self.step)
            .finish_non_exhaustive()
    }
}

impl AlphaBetaTable {
    pub fn new(
        label: impl Into<String>,
        n: usize,
        spectral: bool,
        step: C64,
        alpha: impl Fn(usize, usize, C64, &[C64]) -> C64 + Send + Sync + 'static,
        beta: impl Fn(usize, usize, C64, &[C64]) -> C64 + Send + Sync + 'static,
    ) -> Self {
        AlphaBetaTable {
            label: label.into(),
            n,
            alpha: Arc::new(alpha),
            beta: Arc::new(beta),
            diagonal: None,
            scalar: None,
            spectral,
            step,
            poles: Vec::new(),
            u_poles: Vec::new(),
        }
    }

    pub fn with_poles(mut self, poles: Vec<PoleHyperplane>) -> Self {
        self.poles = poles;
        self
    }

    pub fn with_u_poles(mut self, u_poles: Vec<PoleHyperplane>) -> Self {
        self.u_poles = u_poles;
        self
    }

    /// The matrix at `(u, λ)`.
    pub fn matrix(&self, u: C64, lambda: &[C64]) -> Matrix<C64> {
        let n = self.n;
        let mut r = Matrix::zeros(n * n, n * n);
        for a in 0..n {
            r[(a * n + a, a * n + a)] = match &self.diagonal {
                Some(d) => d(a, u, lambda),
                None => c(1.0),
            };
            for b in 0..n {
                if a != b {
                    r[(a * n + b, a * n + b)] = (self.alpha)(a, b, u, lambda);
                    r[(a * n + b, b * n + a)] = (self.beta)(a, b, u, lambda);
                }
            }
        }
        if let Some(s) = &self.scalar {
            r = r.scale(&s(u));
        }
        r
    }

    fn check(&self, lambda: &[C64]) -> Result<()> {
        if lambda.len() != self.n {
            return Err(DynError::Dimension(format!(
                "λ has {} coordinates, table has rank {}",
                lambda.len(),
                self.n
            )));
        }
        Ok(())
    }
}

/// Either flavour of assembled operator.
#[derive(Clone, Debug)]
pub enum Assembled {
    Plain(DynamicalOperator),
    Spectral(SpectralDynamicalOperator),
}

impl Assembled {
    pub fn plain(self) -> Result<DynamicalOperator> {
        match self {
            Assembled::Plain(op) => Ok(op),
            Assembled::Spectral(op) => Err(DynError::Config(format!("{} is spectral", op.label))),
        }
    }

    pub fn spectral(self) -> Result<SpectralDynamicalOperator> {
        match self {
            Assembled::Spectral(op) => Ok(op),
            Assembled::Plain(op) => Err(DynError::Config(format!("{} has no spectral parameter", op.label))),
        }
    }
}

pub fn assemble(t: &AlphaBetaTable) -> Assembled {
    if t.spectral {
        Assembled::Spectral(assemble_spectral(t))
    } else {
        Assembled::Plain(assemble_plain(t))
    }
}

/// Non-spectral assembly (`u` is fixed to zero).
pub fn assemble_plain(t: &AlphaBetaTable) -> DynamicalOperator {
    let v = WeightVectorSpace::gl_vector(t.n);
    let tt = t.clone();
    DynamicalOperator::new(t.label.clone(), v.clone(), v, t.step, t.poles.clone(), move |l| {
        tt.check(l)?;
        finite(tt.matrix(c(0.0), l), &tt.label)
    })
}

pub fn assemble_spectral(t: &AlphaBetaTable) -> SpectralDynamicalOperator {
    let v = WeightVectorSpace::gl_vector(t.n);
    let tt = t.clone();
    SpectralDynamicalOperator::new(
        t.label.clone(),
        v.clone(),
        v,
        t.step,
        t.poles.clone(),
        t.u_poles.clone(),
        move |u, l| {
            tt.check(l)?;
            finite(tt.matrix(u, l), &tt.label)
        },
    )
}

fn finite(m: Matrix<C64>, label: &str) -> Result<Matrix<C64>> {
    if m.is_finite() {
        Ok(m)
    } else {
        Err(DynError::Pole(format!("{label} evaluated to a non-finite entry")))
    }
}

fn difference_poles(n: usize, offset: impl Fn(usize, usize) -> f64, period: Option<f64>) -> Vec<PoleHyperplane> {
    let mut out = Vec::new();
    for a in 0..n {
        for b in a + 1..n {
            out.push(PoleHyperplane::difference(n, a, b, offset(a, b), period));
        }
    }
    out
}

fn check_rank(n: usize) -> Result<()> {
    if n < 2 {
        return Err(DynError::Config(format!("rank n = {n}, need n ≥ 2")));
    }
    Ok(())
}

pub fn basic_rational_table(n: usize) -> Result<AlphaBetaTable> {
    check_rank(n)?;
    let beta = |a: usize, b: usize, _u: C64, l: &[C64]| 1.0 / (l[b] - l[a]);
    Ok(AlphaBetaTable::new(
        "rational",
        n,
        false,
        c(1.0),
        move |a, b, u, l| 1.0 + beta(a, b, u, l),
        beta,
    )
    .with_poles(difference_poles(n, |_, _| 0.0, None)))
}

/// `β_ab = 1/(λ_b-λ_a)`, `α_ab = 1 + β_ab`, step 1.
pub fn basic_rational(n: usize) -> Result<DynamicalOperator> {
    Ok(assemble_plain(&basic_rational_table(n)?))
}

pub fn basic_trigonometric_table(n: usize, q: C64) -> Result<AlphaBetaTable> {
    check_rank(n)?;
    if q == c(1.0) {
        return Err(DynError::Config(
            "q = 1 is the rational family; use basic_rational".into(),
        ));
    }
    if q == c(0.0) {
        return Err(DynError::Config("q = 0 is not allowed".into()));
    }
    let beta = move |a: usize, b: usize, _u: C64, l: &[C64]| (q - 1.0) / (qpow(q, l[b] - l[a]) - 1.0);
    Ok(AlphaBetaTable::new(
        format!("trig(q={q})"),
        n,
        false,
        c(1.0),
        move |a, b, u, l| q + beta(a, b, u, l),
        beta,
    )
    .with_poles(difference_poles(n, |_, _| 0.0, None)))
}

/// `β_ab = (q-1)/(q^{λ_b-λ_a}-1)`, `α_ab = q + β_ab`, step 1.
pub fn basic_trigonometric(n: usize, q: C64) -> Result<DynamicalOperator> {
    Ok(assemble_plain(&basic_trigonometric_table(n, q)?))
}

/// Elliptic table with `θ` replaced by `w` (`θ`, `sin` or the identity).
pub fn spectral_wave_table(kind: WaveKind, n: usize, p: Option<EllipticParams>, gamma: C64) -> Result<AlphaBetaTable> {
    check_rank(n)?;
    let w = move |x: C64| wave(kind, x, p.as_ref()).expect("parameters checked at construction");
    wave(kind, gamma, p.as_ref())?;
    if w(gamma).norm() < 1e-12 {
        return Err(DynError::Domain(format!(
            "step γ = {gamma} is a zero of the wave function"
        )));
    }
    let beta =
        move |a: usize, b: usize, u: C64, l: &[C64]| w(u - l[b] + l[a]) * w(gamma) / (w(u - gamma) * w(l[b] - l[a]));
    let alpha =
        move |a: usize, b: usize, u: C64, l: &[C64]| w(l[a] - l[b] + gamma) * w(u) / (w(l[a] - l[b]) * w(u - gamma));
    let period = match kind {
        WaveKind::Elliptic => Some(1.0),
        WaveKind::Trig => Some(std::f64::consts::PI),
        WaveKind::Rational => None,
    };
    let label = match kind {
        WaveKind::Elliptic => "elliptic",
        WaveKind::Trig => "spectral-trig",
        WaveKind::Rational => "spectral-rational",
    };
    Ok(AlphaBetaTable::new(label, n, true, gamma, alpha, beta)
        .with_poles(difference_poles(n, |_, _| 0.0, period))
        .with_u_poles(vec![PoleHyperplane {
            alpha: vec![1.0],
            offset: gamma.re,
            period,
        }]))
}

pub fn basic_elliptic_table(n: usize, p: EllipticParams, gamma: C64) -> Result<AlphaBetaTable> {
    spectral_wave_table(WaveKind::Elliptic, n, Some(p), gamma)
}

/// Elliptic solution with spectral parameter and step `γ`.
pub fn basic_elliptic(n: usize, p: EllipticParams, gamma: C64) -> Result<SpectralDynamicalOperator> {
    Ok(assemble_spectral(&basic_elliptic_table(n, p, gamma)?))
}

/// `θ → sin` or `θ → identity` degenerations of [`basic_elliptic`].
pub fn spectral_degenerate(kind: WaveKind, n: usize, gamma: C64) -> Result<SpectralDynamicalOperator> {
    if kind == WaveKind::Elliptic {
        return Err(DynError::Config("spectral_degenerate takes trig or rational".into()));
    }
    Ok(assemble_spectral(&spectral_wave_table(kind, n, None, gamma)?))
}

/// Printed `sl_n` vector-representation exchange operator, without the scalar `q^{1-1/n}`.
pub fn exchange_closed_form_table(n: usize, q: C64) -> Result<AlphaBetaTable> {
    check_rank(n)?;
    if q == c(0.0) {
        return Err(DynError::Config("q = 0 is not allowed".into()));
    }
    let classical = q == c(1.0);
    let shift = |a: usize, b: usize| a as f64 - b as f64;
    let beta = move |a: usize, b: usize, _u: C64, l: &[C64]| {
        if classical {
            1.0 / (l[b] - l[a] - shift(b, a))
        } else {
            (q.powi(-2) - 1.0) / (qpow(q, 2.0 * (l[a] - l[b] - shift(a, b))) - 1.0)
        }
    };
    let alpha = move |a: usize, b: usize, _u: C64, l: &[C64]| {
        if a < b {
            return if classical { c(1.0) } else { 1.0 / q };
        }
        if classical {
            let x = l[b] - l[a] + shift(a, b);
            (x - 1.0) * (x + 1.0) / (x * x)
        } else {
            let y = qpow(q, 2.0 * (l[b] - l[a] + shift(a, b)));
            (y - q.powi(-2)) * (y - q * q) / (q * (y - 1.0) * (y - 1.0))
        }
    };
    let label = if classical {
        "exchange(q=1)".to_string()
    } else {
        format!("exchange(q={q})")
    };
    Ok(AlphaBetaTable::new(label, n, false, c(1.0), alpha, beta).with_poles(difference_poles(n, shift, None)))
}

/// Printed exchange operator `q^{1-1/n} R̃`; `q = 1` selects the classical table.
pub fn exchange_closed_form(n: usize, q: C64) -> Result<DynamicalOperator> {
    let mut t = exchange_closed_form_table(n, q)?;
    if q != c(1.0) {
        let s = qpow(q, c(1.0 - 1.0 / n as f64));
        t.scalar = Some(Arc::new(move |_| s));
    }
    Ok(assemble_plain(&t))
}

/// Family names accepted by the command line.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FamilyName {
    Rational,
    Trig,
    Elliptic,
    SpectralTrig,
    SpectralRational,
    Exchange,
}

impl FromStr for FamilyName {
    type Err = DynError;
    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "rational" => FamilyName::Rational,
            "trig" => FamilyName::Trig,
            "elliptic" => FamilyName::Elliptic,
            "spectral-trig" => FamilyName::SpectralTrig,
            "spectral-rational" => FamilyName::SpectralRational,
            "exchange" => FamilyName::Exchange,
            _ => return Err(DynError::Config(format!("unknown family {s:?}"))),
        })
    }
}

/// Parameters for building a family by name.
#[derive(Clone, Copy, Debug)]
pub struct FamilyParams {
    pub n: usize,
    pub q: C64,
    pub tau: C64,
    pub gamma: C64,
}

impl Default for FamilyParams {
    fn default() -> Self {
        FamilyParams {
            n: 2,
            q: c(0.5),
            tau: C64::new(0.0, 0.8),
            gamma: c(0.23),
        }
    }
}

pub fn family_table(name: FamilyName, p: &FamilyParams) -> Result<AlphaBetaTable> {
    match name {
        FamilyName::Rational => basic_rational_table(p.n),
        FamilyName::Trig => basic_trigonometric_table(p.n, p.q),
        FamilyName::Elliptic => basic_elliptic_table(p.n, EllipticParams::new(p.tau)?, p.gamma),
        FamilyName::SpectralTrig => spectral_wave_table(WaveKind::Trig, p.n, None, p.gamma),
        FamilyName::SpectralRational => spectral_wave_table(WaveKind::Rational, p.n, None, p.gamma),
        FamilyName::Exchange => {
            let mut t = exchange_closed_form_table(p.n, p.q)?;
            if p.q != c(1.0) {
                let s = qpow(p.q, c(1.0 - 1.0 / p.n as f64));
                t.scalar = Some(Arc::new(move |_| s));
            }
            Ok(t)
        }
    }
}
