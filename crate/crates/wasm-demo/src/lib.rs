//! WebAssembly bindings for the static demo page in `www/`.

pub mod api;

use wasm_bindgen::prelude::*;

fn js(e: dynrm::DynError) -> JsError {
    JsError::new(&e.to_string())
}

#[wasm_bindgen]
pub fn theta_curve(kind: &str, tau_im: f64, u_im: f64, lo: f64, hi: f64, points: usize) -> Result<Vec<f64>, JsError> {
    api::theta_curve(kind, tau_im, u_im, lo, hi, points).map_err(js)
}

#[wasm_bindgen]
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
) -> Result<Vec<f64>, JsError> {
    api::rmatrix_curve(family, q, tau_im, gamma, u, lo, hi, points).map_err(js)
}

#[wasm_bindgen]
pub fn run_suite_json(suite: &str, params_json: &str, samples: usize, seed: u32, tol: f64) -> Result<String, JsError> {
    api::run_suite_json(suite, params_json, samples, seed.into(), tol).map_err(js)
}

#[wasm_bindgen]
pub fn perturbation_scan(
    suite: &str,
    params_json: &str,
    eps: Vec<f64>,
    samples: usize,
    seed: u32,
) -> Result<Vec<f64>, JsError> {
    api::perturbation_scan(suite, params_json, &eps, samples, seed.into()).map_err(js)
}

#[wasm_bindgen]
pub fn catalogue_json() -> String {
    api::catalogue_json()
}
