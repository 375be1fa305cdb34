//! Sensitivity-factor sweeps: the data behind the figure families.

use rayon::prelude::*;
use serde::Serialize;

use crate::experiment::{run_single, ExperimentConfig, SfValue};
use crate::{Error, Result};

/// Metrics of one run inside a sweep.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct SweepRawRow {
    pub sf: f64,
    pub seed: u64,
    pub final_accuracy: f64,
    pub poisoned_eval_accuracy: f64,
    pub total_anomalies: f64,
    pub rounds_with_anomalies: f64,
    pub mean_grad_score: f64,
    pub mean_recon_score: f64,
}

/// Seed-averaged metrics for one sensitivity value.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct SweepRow {
    pub sf: f64,
    pub final_accuracy: f64,
    pub poisoned_eval_accuracy: f64,
    pub total_anomalies: f64,
    pub rounds_with_anomalies: f64,
    pub mean_grad_score: f64,
    pub mean_recon_score: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct SweepResult {
    pub rows: Vec<SweepRow>,
    pub raw: Vec<SweepRawRow>,
}

/// Runs the experiment once per `(sf, seed)` point with seeds
/// `cfg.seed .. cfg.seed + n_seeds`, and averages the per-sf metrics.
/// Both channels use the swept factor.
pub fn sweep_sensitivity(cfg: &ExperimentConfig, sf_grid: &[f64], n_seeds: usize) -> Result<SweepResult> {
    if sf_grid.is_empty() {
        return Err(Error::config("sf_grid", "need at least one sensitivity value"));
    }
    if n_seeds == 0 {
        return Err(Error::config("seeds", "need at least one seed per point"));
    }
    let points: Vec<(f64, u64)> = sf_grid
        .iter()
        .flat_map(|&sf| (0..n_seeds as u64).map(move |i| (sf, cfg.seed + i)))
        .collect();
    let raw: Vec<SweepRawRow> = points
        .par_iter()
        .map(|&(sf, seed)| {
            let mut point_cfg = cfg.clone();
            point_cfg.detection.sf = Some(SfValue(Some(sf)));
            point_cfg.detection.sens = None;
            point_cfg.seed = seed;
            let run = run_single(&point_cfg)?;
            let s = &run.summary;
            Ok(SweepRawRow {
                sf,
                seed,
                final_accuracy: s.final_accuracy,
                poisoned_eval_accuracy: s.poisoned_eval_accuracy,
                total_anomalies: s.total_anomalies as f64,
                rounds_with_anomalies: s.rounds_with_anomalies as f64,
                mean_grad_score: s.mean_grad_score,
                mean_recon_score: s.mean_recon_score,
            })
        })
        .collect::<Result<_>>()?;

    let rows = sf_grid
        .iter()
        .map(|&sf| {
            let group: Vec<&SweepRawRow> = raw.iter().filter(|r| r.sf == sf).collect();
            let n = group.len() as f64;
            SweepRow {
                sf,
                final_accuracy: group.iter().map(|r| r.final_accuracy).sum::<f64>() / n,
                poisoned_eval_accuracy: group.iter().map(|r| r.poisoned_eval_accuracy).sum::<f64>() / n,
                total_anomalies: group.iter().map(|r| r.total_anomalies).sum::<f64>() / n,
                rounds_with_anomalies: group.iter().map(|r| r.rounds_with_anomalies).sum::<f64>() / n,
                mean_grad_score: group.iter().map(|r| r.mean_grad_score).sum::<f64>() / n,
                mean_recon_score: group.iter().map(|r| r.mean_recon_score).sum::<f64>() / n,
            }
        })
        .collect();
    Ok(SweepResult { rows, raw })
}
