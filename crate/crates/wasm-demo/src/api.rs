//! Plain-Rust entry points behind the browser bindings.

use std::collections::BTreeMap;

use dynrm::rmatrix::{basic_elliptic, basic_rational, basic_trigonometric, exchange_closed_form, spectral_degenerate};
use dynrm::specfun::{wave, EllipticParams, WaveKind};
use dynrm::suites::{list_suites, run_suite, SuiteConfig};
use dynrm::{DynError, Result, C64};

fn c(x: f64) -> C64 {
    C64::new(x, 0.0)
}

fn check_points(points: usize) -> Result<()> {
    if !(2..=20_000).contains(&points) {
        return Err(DynError::Config("points must lie in 2..=20000".into()));
    }
    Ok(())
}

fn grid(lo: f64, hi: f64, points: usize) -> Vec<f64> {
    (0..points)
        .map(|i| lo + (hi - lo) * i as f64 / (points - 1) as f64)
        .collect()
}

/// Samples `θ(x + i·u_im)`, `sin` or the identity for `x ∈ [lo, hi]`.
/// Returns flat triples `(x, re, im)`.
pub fn theta_curve(kind: &str, tau_im: f64, u_im: f64, lo: f64, hi: f64, points: usize) -> Result<Vec<f64>> {
    check_points(points)?;
    let kind: WaveKind = kind.parse()?;
    let p = EllipticParams::new(C64::new(0.0, tau_im))?;
    let mut out = Vec::with_capacity(3 * points);
    for x in grid(lo, hi, points) {
        let v = wave(kind, C64::new(x, u_im), Some(&p))?;
        out.extend([x, v.re, v.im]);
    }
    Ok(out)
}

/// Entry positions reported by [`rmatrix_curve`], as `(row, col)` in the basis `v_a ⊗ v_b ↦ 2a + b`.
pub const ENTRIES: [(usize, usize); 5] = [(0, 0), (1, 1), (1, 2), (2, 1), (2, 2)];

/// Real parts of the `n = 2` R-matrix entries along `λ = (l, 0)`.
/// Returns flat rows `(l, R00, R11, R12, R21, R22)`; poles give NaN.
#[allow(clippy::too_many_arguments)]
pub fn rmatrix_curve(
    family: &str,
    q: f64,
    tau_im: f64,
    gamma: f64,
    u: f64,
    lo: f64,
    hi: f64,
    points: usize,
) -> Result<Vec<f64>> {
    check_points(points)?;
    let spectral = match family {
        "elliptic" => Some(basic_elliptic(
            2,
            EllipticParams::new(C64::new(0.0, tau_im))?,
            c(gamma),
        )?),
        "spectral-trig" => Some(spectral_degenerate(WaveKind::Trig, 2, c(gamma))?),
        "spectral-rational" => Some(spectral_degenerate(WaveKind::Rational, 2, c(gamma))?),
        _ => None,
    };
    let op = match (family, spectral) {
        (_, Some(s)) => s.at_u(c(u)),
        ("rational", None) => basic_rational(2)?,
        ("trig", None) => basic_trigonometric(2, c(q))?,
        ("exchange", None) => exchange_closed_form(2, c(q))?,
        (f, None) => return Err(DynError::Config(format!("unknown family {f:?}"))),
    };
    let mut out = Vec::with_capacity(6 * points);
    for l in grid(lo, hi, points) {
        out.push(l);
        match op.eval(&[c(l), c(0.0)]) {
            Ok(m) if m.is_finite() => out.extend(ENTRIES.iter().map(|&(i, j)| m[(i, j)].re)),
            _ => out.extend([f64::NAN; ENTRIES.len()]),
        }
    }
    Ok(out)
}

fn config(suite: &str, params_json: &str, samples: usize, seed: u64, tol: f64) -> Result<SuiteConfig> {
    let params: BTreeMap<String, serde_json::Value> = if params_json.trim().is_empty() {
        BTreeMap::new()
    } else {
        serde_json::from_str(params_json).map_err(|e| DynError::Config(format!("params: {e}")))?
    };
    let mut cfg = SuiteConfig::new(suite).seed(seed);
    for (k, v) in params {
        let v = match v {
            serde_json::Value::String(s) => s,
            other => other.to_string(),
        };
        cfg.params.insert(k, v);
    }
    if samples > 0 {
        cfg.samples = Some(samples);
    }
    if tol.is_finite() {
        cfg.tol = Some(tol);
    }
    Ok(cfg)
}

/// Runs a suite and returns its JSON report. `samples = 0` and a non-finite `tol` select defaults.
pub fn run_suite_json(suite: &str, params_json: &str, samples: usize, seed: u64, tol: f64) -> Result<String> {
    Ok(run_suite(&config(suite, params_json, samples, seed, tol)?)?.to_json())
}

/// `residual_max` of a suite for each perturbation size.
pub fn perturbation_scan(suite: &str, params_json: &str, eps: &[f64], samples: usize, seed: u64) -> Result<Vec<f64>> {
    eps.iter()
        .map(|e| {
            let cfg = config(suite, params_json, samples, seed, f64::NAN)?.param("perturb", e);
            Ok(run_suite(&cfg)?.residual_max)
        })
        .collect()
}

/// Suite catalogue as JSON.
pub fn catalogue_json() -> String {
    serde_json::to_string(list_suites()).expect("catalogue serializes")
}
