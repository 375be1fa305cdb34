//! Browser bindings for the FLAD simulator.
//!
//! Every exported function takes and returns JSON strings, so the same code
//! paths compile and run on the host (where the tests live) and under
//! wasm-bindgen in the browser. Build the browser package with
//! `wasm-pack build --target web` and serve `www/`.

pub mod api;

use wasm_bindgen::prelude::*;

/// The canonical experiment config as editable JSON.
#[wasm_bindgen]
pub fn default_config() -> String {
    api::default_config()
}

/// Runs one experiment (screened run plus the unscreened FedAvg reference on
/// the same data and seeds) and returns round series, verdicts and summary.
#[wasm_bindgen]
pub fn run_experiment(config_json: &str) -> Result<String, String> {
    api::run_experiment(config_json)
}

/// ROC curve for one of the detectors: combined, grad, recon, pca.
#[wasm_bindgen]
pub fn roc(config_json: &str, detector: &str) -> Result<String, String> {
    api::roc(config_json, detector)
}

/// Sensitivity sweep over a comma-separated grid, averaged over seeds.
#[wasm_bindgen]
pub fn sweep(config_json: &str, sf_grid: &str, seeds: u32) -> Result<String, String> {
    api::sweep(config_json, sf_grid, seeds)
}
