//! WebAssembly bindings for the static demo page in `www/`.
//!
//! Each exported function takes plain numbers and returns a JSON string, so
//! the page needs no generated TypeScript types. The same computations are
//! available to Rust callers through [`demo`].

use wasm_bindgen::prelude::*;

pub mod demo;

fn to_js<T: serde::Serialize>(result: retainer_core::Result<T>) -> Result<String, JsError> {
    let value = result.map_err(|e| JsError::new(&e.to_string()))?;
    serde_json::to_string(&value).map_err(|e| JsError::new(&e.to_string()))
}

/// Loss, wait, idle workers and retainer cost for pools of size `0..=c_max`.
#[wasm_bindgen(js_name = poolCurves)]
pub fn pool_curves(lambda: f64, mu: f64, wage_per_minute: f64, c_max: u32) -> Result<String, JsError> {
    to_js(demo::pool_curves(lambda, mu, wage_per_minute, c_max as u64))
}

/// Total cost per pool size for a per-task miss cost, with the cheapest pool.
#[wasm_bindgen(js_name = totalCostCurve)]
pub fn total_cost_curve(
    lambda: f64,
    mu: f64,
    wage_per_minute: f64,
    c_task: f64,
    c_max: u32,
) -> Result<String, JsError> {
    to_js(demo::total_cost_curve(lambda, mu, wage_per_minute, c_task, c_max as u64))
}

/// Short seeded simulation next to the closed-form values.
#[wasm_bindgen(js_name = simulatePool)]
pub fn simulate_pool(lambda: f64, mu: f64, c: u32, tasks: u32, seed: u32) -> Result<String, JsError> {
    to_js(demo::simulate_pool(lambda, mu, c as u64, tasks as u64, seed as u64))
}
