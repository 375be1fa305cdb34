//! Central finite-difference gradient oracle.
//!
//! Deliberately independent of backprop: it only calls the forward/loss path,
//! so it can certify `backward` without sharing its differentiation code.

use crate::nn::loss::{LossKind, LossTarget};
use crate::nn::model::{loss_value, Model};
use crate::nn::params::ParamVector;
use crate::nn::tensor::Tensor;
use crate::{Error, Result};

/// Central-difference estimate of the loss gradient, one coordinate at a time.
pub fn finite_diff_gradient(
    model: &Model,
    batch: &Tensor,
    target: &LossTarget<'_>,
    loss: LossKind,
    eps: f64,
) -> Result<ParamVector> {
    if !(1e-7..=1e-3).contains(&eps) {
        return Err(Error::config("eps", "step must lie in [1e-7, 1e-3]"));
    }
    let mut probe = model.clone();
    let dim = probe.params.dim();
    let mut grad = Vec::with_capacity(dim);
    for i in 0..dim {
        let orig = probe.params.as_slice()[i];
        probe.params.as_mut_slice()[i] = orig + eps;
        let plus = loss_value(&probe, batch, target, loss)?;
        probe.params.as_mut_slice()[i] = orig - eps;
        let minus = loss_value(&probe, batch, target, loss)?;
        probe.params.as_mut_slice()[i] = orig;
        grad.push((plus - minus) / (2.0 * eps));
    }
    Ok(ParamVector::from_vec(grad))
}

/// Largest relative disagreement between two gradient vectors, with an
/// absolute floor so near-zero coordinates do not blow the ratio up.
pub fn max_relative_error(a: &ParamVector, b: &ParamVector) -> f64 {
    a.as_slice()
        .iter()
        .zip(b.as_slice())
        .map(|(x, y)| (x - y).abs() / x.abs().max(y.abs()).max(1e-6))
        .fold(0.0, f64::max)
}
