//! Per-detector anomaly scores over (client, round) pairs, for ROC evaluation.

use crate::detection::{grad_z_scores, pca_fit, pca_score, recon_z_score};
use crate::federation::{ExperimentData, RunOutput};
use crate::{Error, Result};

/// Which detector's scores to extract.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DetectorKind {
    /// Max of the two channels' z-scores — the OR-combined detector.
    Combined,
    /// Raw gradient-deviation score.
    Grad,
    /// Raw reconstruction error (the reconstruction-only baseline).
    Recon,
    /// PCA residual of the client's data against the clean reference subspace.
    Pca,
}

impl std::str::FromStr for DetectorKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "combined" => Ok(Self::Combined),
            "grad" => Ok(Self::Grad),
            "recon" => Ok(Self::Recon),
            "pca" => Ok(Self::Pca),
            other => Err(Error::config("detector", format!("unknown detector `{other}`"))),
        }
    }
}

impl DetectorKind {
    pub fn name(&self) -> &'static str {
        match self {
            Self::Combined => "combined",
            Self::Grad => "grad",
            Self::Recon => "recon",
            Self::Pca => "pca",
        }
    }
}

fn require_run(output: Option<&RunOutput>) -> Result<&RunOutput> {
    output.ok_or(Error::EmptyData("detector_scores: federated detectors need a run"))
}

fn per_client_round(
    data: &ExperimentData,
    output: &RunOutput,
    score: impl Fn(&crate::federation::RoundReport, usize) -> Result<f64>,
) -> Result<(Vec<f64>, Vec<bool>)> {
    let mut scores = Vec::new();
    let mut labels = Vec::new();
    for report in &output.reports {
        for c in 0..report.grad_scores.len() {
            scores.push(score(report, c)?);
            labels.push(data.clients[c].is_malicious);
        }
    }
    if scores.is_empty() {
        return Err(Error::EmptyData("detector_scores"));
    }
    Ok((scores, labels))
}

/// Scores and ground-truth labels for one detector.
///
/// The federated detectors produce one score per (client, round); the PCA
/// baseline needs no federated training and scores each client's dataset once.
pub fn detector_scores(
    kind: DetectorKind,
    data: &ExperimentData,
    output: Option<&RunOutput>,
) -> Result<(Vec<f64>, Vec<bool>)> {
    let client_label = |c: usize| data.clients[c].is_malicious;
    match kind {
        DetectorKind::Pca => {
            let r = 8.min(data.reference.n()).min(data.dataset.d_in());
            let model = pca_fit(&data.reference, r)?;
            let mut scores = Vec::with_capacity(data.clients.len());
            let mut labels = Vec::with_capacity(data.clients.len());
            for client in &data.clients {
                scores.push(pca_score(&model, &data.dataset.view(&client.indices))?);
                labels.push(client.is_malicious);
            }
            Ok((scores, labels))
        }
        DetectorKind::Grad => {
            let output = require_run(output)?;
            per_client_round(data, output, |report, c| Ok(report.grad_scores[c]))
        }
        DetectorKind::Recon => {
            let output = require_run(output)?;
            per_client_round(data, output, |report, c| Ok(report.recon_scores[c]))
        }
        DetectorKind::Combined => {
            let output = require_run(output)?;
            let mut scores = Vec::new();
            let mut labels = Vec::new();
            for report in &output.reports {
                let zg = grad_z_scores(&report.grad_scores)?;
                for (c, &z) in zg.iter().enumerate() {
                    let zr = recon_z_score(report.recon_scores[c], &output.recon_base);
                    scores.push(z.max(zr));
                    labels.push(client_label(c));
                }
            }
            if scores.is_empty() {
                return Err(Error::EmptyData("detector_scores"));
            }
            Ok((scores, labels))
        }
    }
}
