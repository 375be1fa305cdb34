//! Gradient-deviation channel: scores and the mu + alpha*sigma flag rule.

use crate::nn::ParamVector;
use crate::{Error, Result};

/// Mean and population standard deviation of a round's gradient scores.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GradientStats {
    pub mu: f64,
    pub sigma: f64,
}

/// Euclidean distance between a client gradient and the reference gradient.
pub fn grad_deviation(grad_client: &ParamVector, grad_ref: &ParamVector) -> Result<f64> {
    Ok(grad_client.sub(grad_ref)?.l2_norm())
}

/// Two-pass mean and population standard deviation (divide by count).
pub fn population_stats(scores: &[f64]) -> Result<GradientStats> {
    if scores.is_empty() {
        return Err(Error::EmptyData("population_stats"));
    }
    let n = scores.len() as f64;
    let mu = scores.iter().sum::<f64>() / n;
    let var = scores.iter().map(|s| (s - mu) * (s - mu)).sum::<f64>() / n;
    Ok(GradientStats { mu, sigma: var.sqrt() })
}

/// Strict threshold rule: anomalous iff `score > mu + alpha * sigma`.
/// With sigma = 0 this degenerates to `score > mu`, so ties stay benign.
pub fn flag_gradient_anomaly(score: f64, stats: &GradientStats, alpha: f64) -> bool {
    score > stats.mu + alpha * stats.sigma
}
