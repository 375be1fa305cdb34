//! Run summaries: the complete metric set behind the sweep/figure outputs.

use serde::Serialize;

use crate::experiment::scores::{detector_scores, DetectorKind};
use crate::federation::{ExperimentData, RunOutput};
use crate::metrics::confusion::{confusion_counts, ConfusionCounts};
use crate::metrics::roc::roc_curve;
use crate::{Error, Result};

#[derive(Debug, Clone, Serialize)]
pub struct RunSummary {
    pub final_accuracy: f64,
    pub poisoned_eval_accuracy: f64,
    /// Combined-detector AUC over (client, round) pairs; absent when the run
    /// has no malicious clients (single-class ROC is undefined).
    pub detection_auc: Option<f64>,
    #[serde(flatten)]
    pub confusion: ConfusionCounts,
    pub detection_rate: f64,
    pub false_positive_rate: f64,
    pub per_round_flagged: Vec<usize>,
    pub total_anomalies: usize,
    pub rounds_with_anomalies: usize,
    pub mean_grad_score: f64,
    pub mean_recon_score: f64,
}

fn mean(values: impl Iterator<Item = f64>) -> f64 {
    let (mut sum, mut count) = (0.0, 0usize);
    for v in values {
        sum += v;
        count += 1;
    }
    if count == 0 {
        0.0
    } else {
        sum / count as f64
    }
}

/// Collapses a run's reports into the summary metric set.
pub fn summarize(data: &ExperimentData, output: &RunOutput) -> Result<RunSummary> {
    let last = output.reports.last().ok_or(Error::EmptyData("summarize"))?;
    let verdicts: Vec<_> = output.reports.iter().flat_map(|r| r.verdicts.iter().cloned()).collect();
    let malicious: Vec<bool> = data.clients.iter().map(|c| c.is_malicious).collect();
    let confusion = confusion_counts(&verdicts, &malicious)?;
    let detection_auc = match detector_scores(DetectorKind::Combined, data, Some(output)) {
        Ok((scores, labels)) => match roc_curve(&scores, &labels) {
            Ok(roc) => Some(roc.auc),
            Err(Error::UndefinedRoc) => None,
            Err(e) => return Err(e),
        },
        Err(Error::EmptyData(_)) => None,
        Err(e) => return Err(e),
    };
    let per_round_flagged: Vec<usize> = output.reports.iter().map(|r| r.n_flagged()).collect();
    Ok(RunSummary {
        final_accuracy: last.global_accuracy,
        poisoned_eval_accuracy: last.poisoned_eval_accuracy,
        detection_auc,
        detection_rate: confusion.detection_rate(),
        false_positive_rate: confusion.false_positive_rate(),
        total_anomalies: per_round_flagged.iter().sum(),
        rounds_with_anomalies: per_round_flagged.iter().filter(|&&n| n > 0).count(),
        per_round_flagged,
        mean_grad_score: mean(output.reports.iter().flat_map(|r| r.grad_scores.iter().copied())),
        mean_recon_score: mean(output.reports.iter().flat_map(|r| r.recon_scores.iter().copied())),
        confusion,
    })
}
