//! JSON API shared by the wasm exports and the host tests.

use serde::Serialize;

use flad_core::experiment::{
    build_data, detector_scores, run_single, DetectorKind, ExperimentConfig,
};
use flad_core::federation::run_fedavg;
use flad_core::metrics::{roc_curve, sweep_sensitivity};

#[derive(Serialize)]
struct RoundPoint {
    round: usize,
    global_loss: f64,
    global_accuracy: f64,
    poisoned_eval_accuracy: f64,
    n_flagged: usize,
}

#[derive(Serialize)]
struct VerdictPoint {
    round: usize,
    client: usize,
    is_malicious: bool,
    grad_score: f64,
    recon_score: f64,
    flagged: bool,
}

#[derive(Serialize)]
struct ExperimentResponse {
    rounds: Vec<RoundPoint>,
    /// Accuracy per round of the unscreened FedAvg reference on the same data.
    fedavg_accuracy: Vec<f64>,
    verdicts: Vec<VerdictPoint>,
    n_clients: usize,
    malicious: Vec<bool>,
    summary: flad_core::experiment::RunSummary,
}

#[derive(Serialize)]
struct RocResponse {
    detector: String,
    auc: f64,
    points: Vec<(f64, f64)>,
}

fn err_str(e: impl std::fmt::Display) -> String {
    e.to_string()
}

pub fn default_config() -> String {
    let mut cfg = ExperimentConfig::canonical();
    // Browser runs favor a quick turnaround; shrink the dataset a little.
    cfg.dataset = flad_core::experiment::DatasetConfig::Synthetic {
        k: 2,
        per_class: 200,
        d_in: 16,
        class_sep: 0.8,
        std: 0.1,
    };
    cfg.reference.m = 128;
    serde_json::to_string_pretty(&cfg).expect("canonical config serializes")
}

pub fn run_experiment(config_json: &str) -> Result<String, String> {
    let cfg = ExperimentConfig::from_json(config_json).map_err(err_str)?;
    let run = run_single(&cfg).map_err(err_str)?;
    let fedavg = run_fedavg(&run.data, &run.options).map_err(err_str)?;
    let malicious: Vec<bool> = run.data.clients.iter().map(|c| c.is_malicious).collect();
    let response = ExperimentResponse {
        rounds: run
            .output
            .reports
            .iter()
            .map(|r| RoundPoint {
                round: r.round,
                global_loss: r.global_loss,
                global_accuracy: r.global_accuracy,
                poisoned_eval_accuracy: r.poisoned_eval_accuracy,
                n_flagged: r.n_flagged(),
            })
            .collect(),
        fedavg_accuracy: fedavg.reports.iter().map(|r| r.global_accuracy).collect(),
        verdicts: run
            .output
            .reports
            .iter()
            .flat_map(|r| {
                let malicious = &malicious;
                r.verdicts.iter().map(move |v| VerdictPoint {
                    round: v.round,
                    client: v.client_id,
                    is_malicious: malicious[v.client_id],
                    grad_score: v.grad_score,
                    recon_score: v.recon_score,
                    flagged: v.flagged,
                })
            })
            .collect(),
        n_clients: run.data.clients.len(),
        malicious,
        summary: run.summary,
    };
    serde_json::to_string(&response).map_err(err_str)
}

pub fn roc(config_json: &str, detector: &str) -> Result<String, String> {
    let cfg = ExperimentConfig::from_json(config_json).map_err(err_str)?;
    let kind: DetectorKind = detector.parse().map_err(err_str)?;
    let (scores, labels) = match kind {
        DetectorKind::Pca => {
            let data = build_data(&cfg).map_err(err_str)?;
            detector_scores(kind, &data, None).map_err(err_str)?
        }
        _ => {
            let run = run_single(&cfg).map_err(err_str)?;
            detector_scores(kind, &run.data, Some(&run.output)).map_err(err_str)?
        }
    };
    let curve = roc_curve(&scores, &labels).map_err(err_str)?;
    let response = RocResponse {
        detector: kind.name().to_string(),
        auc: curve.auc,
        points: curve.points,
    };
    serde_json::to_string(&response).map_err(err_str)
}

pub fn sweep(config_json: &str, sf_grid: &str, seeds: u32) -> Result<String, String> {
    let cfg = ExperimentConfig::from_json(config_json).map_err(err_str)?;
    let grid: Vec<f64> = sf_grid
        .split(',')
        .map(|s| s.trim().parse::<f64>().map_err(|e| format!("bad sf value `{s}`: {e}")))
        .collect::<Result<_, _>>()?;
    let result = sweep_sensitivity(&cfg, &grid, seeds as usize).map_err(err_str)?;
    serde_json::to_string(&result.rows).map_err(err_str)
}
