//! Odd theta function `θ(u,τ) = -Σ_{j∈Z+1/2} exp(πi(j²τ + 2j(u+1/2)))` and its degenerations.

use std::f64::consts::PI;
use std::str::FromStr;

use serde::Serialize;

use crate::error::{DynError, Result};
use crate::scalar::C64;

const MIN_TERMS: usize = 8;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct EllipticParams {
    pub tau: C64,
    pub target_tol: f64,
}

impl EllipticParams {
    pub fn new(tau: C64) -> Result<Self> {
        Self::with_tol(tau, 1e-14)
    }

    pub fn with_tol(tau: C64, target_tol: f64) -> Result<Self> {
        if tau.im <= 0.0 || !tau.im.is_finite() {
            return Err(DynError::Domain(format!("Im(tau) must be positive, got tau = {tau}")));
        }
        if target_tol.is_nan() || target_tol <= 0.0 {
            return Err(DynError::Domain("target tolerance must be positive".into()));
        }
        Ok(EllipticParams { tau, target_tol })
    }

    /// Number `J` of half-integer pairs so that the first omitted term is below the target.
    pub fn terms_for(&self, u: C64) -> usize {
        let mut j = MIN_TERMS;
        loop {
            let h = j as f64 + 0.5;
            let log_mag = -PI * h * h * self.tau.im + 2.0 * PI * h * u.im.abs();
            if log_mag < self.target_tol.ln() || j > 10_000 {
                return j;
            }
            j += 1;
        }
    }
}

fn term(j: f64, u: C64, tau: C64) -> C64 {
    let i = C64::new(0.0, 1.0);
    (i * PI * (j * j * tau + 2.0 * j * (u + 0.5))).exp()
}

/// `θ` summed over `j ∈ {±1/2, ..., ±(J-1/2)}`.
pub fn theta_truncated(u: C64, p: &EllipticParams, terms: usize) -> C64 {
    let mut s = C64::new(0.0, 0.0);
    for k in (0..terms).rev() {
        let j = k as f64 + 0.5;
        s += term(j, u, p.tau) + term(-j, u, p.tau);
    }
    -s
}

/// Term-wise derivative of [`theta_truncated`].
pub fn theta_d_truncated(u: C64, p: &EllipticParams, terms: usize) -> C64 {
    let i = C64::new(0.0, 1.0);
    let mut s = C64::new(0.0, 0.0);
    for k in (0..terms).rev() {
        let j = k as f64 + 0.5;
        s += 2.0 * PI * i * j * (term(j, u, p.tau) - term(-j, u, p.tau));
    }
    -s
}

pub fn theta(u: C64, p: &EllipticParams) -> C64 {
    theta_truncated(u, p, p.terms_for(u))
}

pub fn theta_d(u: C64, p: &EllipticParams) -> C64 {
    theta_d_truncated(u, p, p.terms_for(u) + 1)
}

/// Moves `u` into the strip `|Im u| ≤ Im τ / 2`; returns `(u', f)` with `θ(u) = f·θ(u')`.
pub fn reduce_to_strip(u: C64, p: &EllipticParams) -> (C64, C64) {
    let i = C64::new(0.0, 1.0);
    let half = p.tau.im / 2.0;
    let mut w = u;
    let mut factor = C64::new(1.0, 0.0);
    while w.im > half {
        // θ(w) = -e^{-πiτ - 2πi(w-τ)} θ(w-τ)
        let next = w - p.tau;
        factor *= -(-(i * PI * p.tau) - 2.0 * PI * i * next).exp();
        w = next;
    }
    while w.im < -half {
        // θ(w) = -e^{πiτ + 2πi w} θ(w+τ)
        factor *= -(i * PI * p.tau + 2.0 * PI * i * w).exp();
        w += p.tau;
    }
    (w, factor)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum WaveKind {
    Elliptic,
    Trig,
    Rational,
}

impl FromStr for WaveKind {
    type Err = DynError;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "elliptic" => Ok(WaveKind::Elliptic),
            "trig" | "sin" => Ok(WaveKind::Trig),
            "rational" | "linear" => Ok(WaveKind::Rational),
            _ => Err(DynError::Config(format!("unknown wave kind {s:?}"))),
        }
    }
}

/// `θ(u)`, `sin(u)` or `u`.
pub fn wave(kind: WaveKind, u: C64, p: Option<&EllipticParams>) -> Result<C64> {
    match kind {
        WaveKind::Elliptic => p
            .map(|p| theta(u, p))
            .ok_or_else(|| DynError::Config("elliptic wave needs EllipticParams".into())),
        WaveKind::Trig => Ok(u.sin()),
        WaveKind::Rational => Ok(u),
    }
}

/// Derivative of [`wave`].
pub fn wave_d(kind: WaveKind, u: C64, p: Option<&EllipticParams>) -> Result<C64> {
    match kind {
        WaveKind::Elliptic => p
            .map(|p| theta_d(u, p))
            .ok_or_else(|| DynError::Config("elliptic wave needs EllipticParams".into())),
        WaveKind::Trig => Ok(u.cos()),
        WaveKind::Rational => Ok(C64::new(1.0, 0.0)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p() -> EllipticParams {
        EllipticParams::new(C64::new(0.0, 0.8)).unwrap()
    }

    #[test]
    fn odd_and_vanishing_at_zero() {
        let p = p();
        assert!(theta(C64::new(0.0, 0.0), &p).norm() < 1e-14);
        let u = C64::new(0.37, 0.11);
        assert!((theta(-u, &p) + theta(u, &p)).norm() < 1e-14);
        assert!((theta_d(-u, &p) - theta_d(u, &p)).norm() < 1e-12);
    }

    #[test]
    fn antiperiodic_in_one() {
        let p = p();
        let u = C64::new(0.3, 0.0);
        for terms in [10, 14] {
            let a = theta_truncated(u + 1.0, &p, terms);
            let b = theta_truncated(u, &p, terms);
            assert!((a + b).norm() < 1e-13);
        }
    }

    #[test]
    fn derivative_matches_difference_quotient() {
        let p = p();
        let u = C64::new(0.3, 0.0);
        let h = 1e-5;
        let fd = (theta(u + h, &p) - theta(u - h, &p)) / (2.0 * h);
        assert!((fd - theta_d(u, &p)).norm() < 1e-8);
        assert!(theta_d(C64::new(0.0, 0.0), &p).norm() > 0.1);
    }

    #[test]
    fn quasi_periodic_in_tau() {
        let p = p();
        let i = C64::new(0.0, 1.0);
        let u = C64::new(0.21, -0.3);
        let lhs = theta(u + p.tau, &p);
        let rhs = -(-(i * PI * p.tau) - 2.0 * PI * i * u).exp() * theta(u, &p);
        assert!((lhs - rhs).norm() < 10.0 * p.target_tol * rhs.norm().max(1.0));
    }

    #[test]
    fn strip_reduction() {
        let p = p();
        let u = C64::new(0.2, 1.7);
        let (w, f) = reduce_to_strip(u, &p);
        assert!(w.im.abs() <= p.tau.im / 2.0 + 1e-15);
        let direct = theta_truncated(u, &p, 40);
        assert!((direct - f * theta(w, &p)).norm() < 1e-10 * direct.norm().max(1.0));
    }

    #[test]
    fn bad_tau() {
        assert!(EllipticParams::new(C64::new(0.0, -1.0)).is_err());
        assert!(wave(WaveKind::Elliptic, C64::new(0.3, 0.0), None).is_err());
    }

    #[test]
    fn waves() {
        let p = p();
        let u = C64::new(0.3, 0.0);
        assert_eq!(
            wave(WaveKind::Rational, C64::new(2.5, 0.0), None).unwrap(),
            C64::new(2.5, 0.0)
        );
        assert!(wave(WaveKind::Trig, C64::new(PI, 0.0), None).unwrap().norm() < 1e-15);
        assert_eq!(wave(WaveKind::Elliptic, u, Some(&p)).unwrap(), theta(u, &p));
    }
}
