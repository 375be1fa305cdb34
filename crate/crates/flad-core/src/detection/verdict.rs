//! Verdict assembly: both channels combined into a per-client decision.

use serde::{Deserialize, Serialize};

use crate::detection::gradient::{flag_gradient_anomaly, population_stats};
use crate::detection::recon::{flag_recon_anomaly, ReconBaseline};
use crate::Result;

/// Per-channel sensitivity factors. `None` disables a channel entirely
/// (equivalent to an infinite threshold), which degenerates FLAD to FedAvg
/// when both are off.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Sensitivity {
    pub alpha: Option<f64>,
    pub beta: Option<f64>,
}

impl Sensitivity {
    /// Same factor for both channels (Algorithm-style single `sf`).
    pub fn uniform(sf: f64) -> Self {
        Self { alpha: Some(sf), beta: Some(sf) }
    }

    pub fn disabled() -> Self {
        Self { alpha: None, beta: None }
    }

    pub fn is_disabled(&self) -> bool {
        self.alpha.is_none() && self.beta.is_none()
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [("alpha", self.alpha), ("beta", self.beta)] {
            if let Some(x) = v {
                if !x.is_finite() || x < 0.0 {
                    return Err(crate::Error::config(name, "sensitivity must be finite and >= 0"));
                }
            }
        }
        Ok(())
    }
}

/// How the two channel flags merge into the final verdict.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CombineRule {
    Or,
    And,
}

/// Which scalar feeds the gradient channel.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GradScoreKind {
    /// Distance between the client gradient and the server's reference gradient.
    Deviation,
    /// Raw norm of the client gradient.
    RawNorm,
}

/// Where the detector autoencoder comes from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AeMode {
    /// One server-side autoencoder trained on the clean reference, read-only.
    ServerRef,
    /// Each client trains its own autoencoder on its own shard every round.
    PerClient,
}

/// Detection policy knobs beyond the sensitivity factors.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DetectionSettings {
    pub combine: CombineRule,
    pub grad_score: GradScoreKind,
    pub ae_mode: AeMode,
    /// One extra pass: recompute mu/sigma over the scores that survived the
    /// first pass, then re-flag against the tightened threshold.
    pub robust_stats: bool,
}

impl Default for DetectionSettings {
    fn default() -> Self {
        Self {
            combine: CombineRule::Or,
            grad_score: GradScoreKind::Deviation,
            ae_mode: AeMode::ServerRef,
            robust_stats: false,
        }
    }
}

/// Channel flags for one client in one round.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct VerdictFlags {
    pub grad_flag: bool,
    pub recon_flag: bool,
    pub flagged: bool,
}

/// Full per-client, per-round record.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AnomalyVerdict {
    pub client_id: usize,
    pub round: usize,
    pub grad_score: f64,
    pub recon_score: f64,
    pub grad_flag: bool,
    pub recon_flag: bool,
    pub flagged: bool,
}

/// Applies both channel rules to one client's scores. `all_grad_scores` is the
/// full score vector of the current round (it must contain `grad_score`).
pub fn detect_anom(
    grad_score: f64,
    all_grad_scores: &[f64],
    recon_score: f64,
    base: &ReconBaseline,
    sens: &Sensitivity,
    combine: CombineRule,
    robust_stats: bool,
) -> Result<VerdictFlags> {
    let grad_flag = match sens.alpha {
        None => false,
        Some(alpha) => {
            let stats = population_stats(all_grad_scores)?;
            if robust_stats {
                let benign: Vec<f64> = all_grad_scores
                    .iter()
                    .copied()
                    .filter(|&s| !flag_gradient_anomaly(s, &stats, alpha))
                    .collect();
                if benign.is_empty() {
                    flag_gradient_anomaly(grad_score, &stats, alpha)
                } else {
                    let refined = population_stats(&benign)?;
                    flag_gradient_anomaly(grad_score, &refined, alpha)
                }
            } else {
                flag_gradient_anomaly(grad_score, &stats, alpha)
            }
        }
    };
    let recon_flag = match sens.beta {
        None => false,
        Some(beta) => flag_recon_anomaly(recon_score, base, beta),
    };
    let flagged = match combine {
        CombineRule::Or => grad_flag || recon_flag,
        CombineRule::And => grad_flag && recon_flag,
    };
    Ok(VerdictFlags { grad_flag, recon_flag, flagged })
}

/// Round-relative z-scores of the gradient channel. Zero sigma (all scores
/// equal) maps everything to 0, mirroring the benign-tie rule.
pub fn grad_z_scores(all_grad_scores: &[f64]) -> Result<Vec<f64>> {
    let stats = population_stats(all_grad_scores)?;
    Ok(all_grad_scores
        .iter()
        .map(|&s| {
            if stats.sigma > 0.0 {
                (s - stats.mu) / stats.sigma
            } else {
                0.0
            }
        })
        .collect())
}

/// Baseline-relative z-score of a reconstruction error. With a degenerate
/// baseline (sigma_r = 0) any error above the mean is infinitely anomalous.
pub fn recon_z_score(err: f64, base: &ReconBaseline) -> f64 {
    if base.sigma_r > 0.0 {
        (err - base.mu_r) / base.sigma_r
    } else if err > base.mu_r {
        f64::INFINITY
    } else {
        f64::NEG_INFINITY
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const BASE: ReconBaseline = ReconBaseline { mu_r: 0.1, sigma_r: 0.02 };

    #[test]
    fn both_channels_benign_means_not_flagged() {
        let scores = [1.0, 1.1, 0.9, 1.0];
        let v = detect_anom(1.0, &scores, 0.1, &BASE, &Sensitivity::uniform(2.0), CombineRule::Or, false).unwrap();
        assert!(!v.grad_flag && !v.recon_flag && !v.flagged);
    }

    #[test]
    fn or_rule_fires_on_a_single_channel() {
        let scores = [1.0, 1.0, 1.0, 10.0];
        let v = detect_anom(10.0, &scores, 0.1, &BASE, &Sensitivity::uniform(1.0), CombineRule::Or, false).unwrap();
        assert!(v.grad_flag && !v.recon_flag && v.flagged);
        let and = detect_anom(10.0, &scores, 0.1, &BASE, &Sensitivity::uniform(1.0), CombineRule::And, false).unwrap();
        assert!(and.grad_flag && !and.flagged);
    }

    #[test]
    fn exactly_the_outlier_client_is_flagged_in_a_ten_client_round() {
        let mut scores = vec![1.0; 9];
        scores.push(10.0);
        let sens = Sensitivity::uniform(1.0);
        let flags: Vec<bool> = scores
            .iter()
            .map(|&s| {
                detect_anom(s, &scores, 0.05, &BASE, &sens, CombineRule::Or, false)
                    .unwrap()
                    .flagged
            })
            .collect();
        let expected: Vec<bool> = (0..10).map(|i| i == 9).collect();
        assert_eq!(flags, expected);
    }

    #[test]
    fn disabled_sensitivity_never_flags() {
        let scores = [1.0, 100.0];
        let v = detect_anom(100.0, &scores, 99.0, &BASE, &Sensitivity::disabled(), CombineRule::Or, false).unwrap();
        assert!(!v.flagged);
    }

    #[test]
    fn robust_stats_tighten_the_threshold_after_excluding_outliers() {
        // With the 100.0 outlier inflating the stats, 2.2 is benign on the
        // single pass; the refinement pass over {1, 1, 1, 2.2} catches it.
        let scores = [1.0, 1.0, 1.0, 2.2, 100.0];
        let sens = Sensitivity { alpha: Some(1.0), beta: None };
        let single = detect_anom(2.2, &scores, 0.0, &BASE, &sens, CombineRule::Or, false).unwrap();
        assert!(!single.grad_flag);
        let robust = detect_anom(2.2, &scores, 0.0, &BASE, &sens, CombineRule::Or, true).unwrap();
        assert!(robust.grad_flag);
        let outlier = detect_anom(100.0, &scores, 0.0, &BASE, &sens, CombineRule::Or, true).unwrap();
        assert!(outlier.grad_flag);
    }

    #[test]
    fn z_scores_are_centered_and_degenerate_safely() {
        let z = grad_z_scores(&[2.0, 2.0, 2.0]).unwrap();
        assert_eq!(z, vec![0.0, 0.0, 0.0]);
        let z = grad_z_scores(&[1.0, 3.0]).unwrap();
        assert_eq!(z, vec![-1.0, 1.0]);
        let degenerate = ReconBaseline { mu_r: 0.5, sigma_r: 0.0 };
        assert_eq!(recon_z_score(0.6, &degenerate), f64::INFINITY);
        assert_eq!(recon_z_score(0.4, &degenerate), f64::NEG_INFINITY);
        assert_eq!(recon_z_score(0.6, &BASE), (0.6 - 0.1) / 0.02);
    }
}
