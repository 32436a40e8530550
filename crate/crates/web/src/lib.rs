//! Browser demo: optimize the 7x2 surface for a receiver angle, sweep its
//! bistatic RCS, and show how fast the parallel-ray approximation converges.
//!
//! The `*_impl` functions hold the logic and are tested natively; the
//! exported wrappers only convert errors for JavaScript.

use rislink::ingest::{load_scenario, ScenarioConfig};
use rislink::prelude::*;
use std::path::Path;
use wasm_bindgen::prelude::*;

const LAYOUT_CFG: &str = include_str!("../../../data/ris7x2.cfg");

fn layout(alpha_deg: f64, beta_deg: f64) -> Result<(ScenarioConfig, LinkModel), String> {
    let mut cfg = load_scenario(LAYOUT_CFG).map_err(|e| e.to_string())?;
    cfg.scenario = cfg
        .scenario
        .with_alpha(alpha_deg.to_radians())
        .and_then(|s| s.with_beta(beta_deg.to_radians()))
        .map_err(|e| e.to_string())?;
    let link = LinkModel::from_config(&cfg, Path::new("")).map_err(|e| e.to_string())?;
    Ok((cfg, link))
}

/// Optimized capacitances in pF followed by the objective in dB.
pub fn optimize_impl(alpha_deg: f64, beta_deg: f64, starts: usize, seed: u64) -> Result<Vec<f64>, String> {
    let (cfg, link) = layout(alpha_deg, beta_deg)?;
    let opts = OptimizeOptions { starts: starts.max(1), seed, ..cfg.optimizer };
    let res = link.optimize(&opts).map_err(|e| e.to_string())?;
    let mut out: Vec<f64> = res.caps.as_slice().iter().map(|c| c * 1e12).collect();
    out.push(10.0 * res.objective.log10());
    Ok(out)
}

/// Rows of `[alpha_deg, ris_dbsm, uniform_dbsm, reflector_dbsm]`, flattened.
/// The uniform column uses 1 pF on every element.
pub fn sweep_impl(caps_pf: &[f64], beta_deg: f64, step_deg: f64) -> Result<Vec<f64>, String> {
    let (_, link) = layout(0.0, beta_deg)?;
    let n = link.scenario.elements().len();
    if caps_pf.len() != n {
        return Err(format!("expected {n} capacitances, got {}", caps_pf.len()));
    }
    let caps = LoadVector::new(caps_pf.iter().map(|c| c * 1e-12).collect(), &link.bounds).map_err(|e| e.to_string())?;
    let uniform = LoadVector::uniform(n, 1e-12, &link.bounds).map_err(|e| e.to_string())?;
    let alphas = alpha_grid_deg(-89.0, 89.0, step_deg);
    if alphas.is_empty() {
        return Err(format!("bad step {step_deg}"));
    }
    let ris = link.sweep(&caps, &alphas).map_err(|e| e.to_string())?;
    let flat = link.sweep(&uniform, &alphas).map_err(|e| e.to_string())?;
    let plate = link
        .reflector(&alphas)
        .ok_or("no board size")?
        .map_err(|e| e.to_string())?;
    let mut out = Vec::with_capacity(alphas.len() * 4);
    for ((a, r), (u, p)) in alphas.iter().zip(&ris.points).zip(flat.points.iter().zip(&plate.points)) {
        out.extend([a.to_degrees(), r.1, u.1, p.1]);
    }
    Ok(out)
}

/// Rows of `[R, max |gamma - beta|]` for log-spaced ranges, flattened.
pub fn parallel_ray_impl(beta_deg: f64, half_width_m: f64, r_min: f64, r_max: f64, points: usize) -> Result<Vec<f64>, String> {
    if !(r_min > 0.0 && r_max > r_min && points >= 2) {
        return Err("need 0 < r_min < r_max and at least 2 points".into());
    }
    let els = vec![ElementGeometry::new(1, -half_width_m, 0.0), ElementGeometry::new(2, half_width_m, 0.0)];
    let beta = beta_deg.to_radians();
    let mut out = Vec::with_capacity(2 * points);
    for i in 0..points {
        let r = r_min * (r_max / r_min).powf(i as f64 / (points - 1) as f64);
        let scn = Scenario::new(r, 0.0, beta, 3.55e9, 1.0, 1.0, els.clone()).map_err(|e| e.to_string())?;
        let mut worst: f64 = 0.0;
        for el in scn.elements() {
            let g = scn.azimuth(el, Side::Tx).map_err(|e| e.to_string())?;
            worst = worst.max((g - beta).abs());
        }
        out.extend([r, worst]);
    }
    Ok(out)
}

#[wasm_bindgen]
pub fn optimize_caps(alpha_deg: f64, beta_deg: f64, starts: usize, seed: u64) -> Result<Vec<f64>, JsError> {
    optimize_impl(alpha_deg, beta_deg, starts, seed).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub fn sweep_brcs(caps_pf: &[f64], beta_deg: f64, step_deg: f64) -> Result<Vec<f64>, JsError> {
    sweep_impl(caps_pf, beta_deg, step_deg).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub fn parallel_ray_error(beta_deg: f64, half_width_m: f64, r_min: f64, r_max: f64, points: usize) -> Result<Vec<f64>, JsError> {
    parallel_ray_impl(beta_deg, half_width_m, r_min, r_max, points).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub fn element_count() -> usize {
    14
}
