//! WebAssembly bindings for the static demo page in `www/`.
//!
//! Every export takes plain strings and numbers and returns a JSON string,
//! so the page needs nothing beyond `JSON.parse`. The JSON-producing
//! functions are ordinary Rust and are tested natively.

use free_entropy::asymptotics::{gamma_ratio_limit_series, normalized_log_ball_volume};
use free_entropy::entropy::{chi_constant, free_dimension, hausdorff_entropy_bounds};
use free_entropy::ext_real::to_json as ext;
use free_entropy::microstates::{regularized_product_series, K_CAP};
use free_entropy::spec_file::parse_measure;
use free_entropy::{EnergyOptions, SpectralMeasure};
use serde_json::{json, Value};
use wasm_bindgen::prelude::*;

/// Points used to draw the distribution function.
const CDF_POINTS: usize = 241;

/// Largest k the page may request; the browser runs single-threaded.
pub const WEB_K_CAP: usize = 1500;

fn error(kind: &str, message: impl std::fmt::Display) -> String {
    json!({"error": kind, "message": message.to_string()}).to_string()
}

fn measure(spec: &str) -> Result<SpectralMeasure, String> {
    parse_measure(spec).map_err(|e| error("invalid_measure", e))
}

fn parse_ks(ks: &str) -> Result<Vec<usize>, String> {
    let ks = ks
        .split(',')
        .map(|s| s.trim().parse::<usize>())
        .collect::<Result<Vec<_>, _>>()
        .map_err(|e| error("usage", format!("k list: {e}")))?;
    let cap = WEB_K_CAP.min(K_CAP);
    if ks.is_empty() || ks[0] == 0 || ks.windows(2).any(|w| w[0] >= w[1]) || *ks.last().unwrap() > cap {
        return Err(error("usage", format!("k values must increase strictly within [1, {cap}]")));
    }
    Ok(ks)
}

/// Dimension, energy, entropy bounds and a sampled distribution function.
pub fn profile_json(spec: &str) -> Result<String, String> {
    let m = measure(spec)?;
    let d = free_dimension(&m);
    let b = hausdorff_entropy_bounds(&m, EnergyOptions::default()).map_err(|e| error("energy", e))?;
    let chi = if m.has_atoms() { f64::NEG_INFINITY } else { b.energy.value + chi_constant() };
    let (lo, hi) = m.support();
    let pad = 0.05 * (hi - lo).max(1e-9);
    let xs: Vec<f64> =
        (0..CDF_POINTS).map(|i| lo - pad + (hi - lo + 2.0 * pad) * i as f64 / (CDF_POINTS - 1) as f64).collect();
    let cdf: Vec<f64> = xs.iter().map(|&x| m.cdf(x)).collect();
    let atoms: Vec<Value> = m.atoms().iter().map(|a| json!([a.location, a.weight])).collect();
    Ok(json!({
        "alpha": d.alpha,
        "tail_bound": d.tail_bound,
        "energy": ext(b.energy.value),
        "chi": ext(chi),
        "lower": ext(b.lower),
        "upper": ext(b.upper),
        "support": [lo, hi],
        "atoms": atoms,
        "cdf": {"x": xs, "y": cdf},
    })
    .to_string())
}

/// Regularized pair products of `A_k` against their limit.
pub fn regularized_json(spec: &str, eps: f64, ks: &str) -> Result<String, String> {
    if !(eps > 0.0 && eps.is_finite()) {
        return Err(error("usage", "eps must be positive"));
    }
    let m = measure(spec)?;
    let ks = parse_ks(ks)?;
    let r = regularized_product_series(&m, eps, &ks, 1e-9).map_err(|e| error("energy", e))?;
    Ok(json!({"ks": ks, "values": r.values, "target": r.target, "gaps": r.gaps}).to_string())
}

/// The Gamma-product series and the ball-volume series side by side.
pub fn asymptotics_json(ks: &str) -> Result<String, String> {
    let ks = parse_ks(ks)?;
    let g = gamma_ratio_limit_series(&ks).map_err(|e| error("usage", e))?;
    let ball: Vec<f64> = ks.iter().map(|&k| normalized_log_ball_volume(k)).collect();
    let ball_target = 0.5 * (2.0 * std::f64::consts::PI * std::f64::consts::E).ln();
    Ok(json!({
        "ks": ks,
        "gamma": {"values": g.normalized_values, "target": g.limit},
        "ball": {"values": ball, "target": ball_target},
    })
    .to_string())
}

#[wasm_bindgen]
pub fn profile(spec: &str) -> Result<String, JsValue> {
    profile_json(spec).map_err(JsValue::from)
}

#[wasm_bindgen]
pub fn regularized(spec: &str, eps: f64, ks: &str) -> Result<String, JsValue> {
    regularized_json(spec, eps, ks).map_err(JsValue::from)
}

#[wasm_bindgen]
pub fn asymptotics(ks: &str) -> Result<String, JsValue> {
    asymptotics_json(ks).map_err(JsValue::from)
}
