//! Local training loops for classifiers and autoencoders.
//!
//! Both are pure: the input model is untouched, and the result is a function
//! of (inputs, seed) only. Each epoch reshuffles sample order with a seed
//! derived from the caller's seed and the epoch index.

use rand::seq::SliceRandom;

use crate::nn::autoencoder::Autoencoder;
use crate::nn::loss::{LossKind, LossTarget};
use crate::nn::model::{backward, Model, OutputHead};
use crate::nn::optim::{optimizer_step, OptimizerKind, OptimizerState};
use crate::nn::tensor::Tensor;
use crate::seeds;
use crate::{Error, Result};

fn gather_batch(features: &Tensor, labels: &[usize], idx: &[usize]) -> (Tensor, Vec<usize>) {
    let d = features.cols();
    let mut data = Vec::with_capacity(idx.len() * d);
    let mut y = Vec::with_capacity(idx.len());
    for &i in idx {
        data.extend_from_slice(features.row(i));
        y.push(labels[i]);
    }
    (Tensor::from_rows(idx.len(), d, data).expect("batch shape"), y)
}

fn one_hot(labels: &[usize], k: usize) -> Tensor {
    let mut data = vec![0.0; labels.len() * k];
    for (r, &y) in labels.iter().enumerate() {
        data[r * k + y] = 1.0;
    }
    Tensor::from_rows(labels.len(), k, data).expect("one-hot shape")
}

/// Mini-batch training of a classifier (softmax head: cross-entropy; linear
/// head: MSE against one-hot targets). Returns the updated copy.
pub fn train_local(
    model: &Model,
    features: &Tensor,
    labels: &[usize],
    lr: f64,
    bs: usize,
    epochs: usize,
    optimizer: OptimizerKind,
    seed: u64,
) -> Result<Model> {
    let n = features.rows();
    if n == 0 || labels.is_empty() {
        return Err(Error::EmptyData("train_local"));
    }
    if labels.len() != n {
        return Err(Error::shape("train_local", format!("{n} labels"), labels.len().to_string()));
    }
    if bs == 0 {
        return Err(Error::config("bs", "batch size must be positive"));
    }
    let k = model.config.output_dim();
    let loss = match model.config.output_head {
        OutputHead::SoftmaxLogits => LossKind::CrossEntropy,
        OutputHead::Linear => LossKind::Mse,
    };
    let mut current = model.clone();
    let mut opt = OptimizerState::new(optimizer, current.params.dim());
    let mut order: Vec<usize> = (0..n).collect();
    for epoch in 0..epochs {
        let mut rng = seeds::rng(seed, &[seeds::stream::EPOCH, epoch as u64]);
        order.shuffle(&mut rng);
        for chunk in order.chunks(bs) {
            let (batch, y) = gather_batch(features, labels, chunk);
            let grad = match loss {
                LossKind::CrossEntropy => backward(&current, &batch, &LossTarget::Classes(&y), loss)?,
                LossKind::Mse => {
                    let targets = one_hot(&y, k);
                    backward(&current, &batch, &LossTarget::Values(&targets), loss)?
                }
            };
            current.params = optimizer_step(&mut opt, &current.params, &grad, lr)?;
        }
    }
    if !current.params.is_finite() {
        return Err(Error::NonFinite("train_local"));
    }
    Ok(current)
}

/// Full-batch loss gradient of a classifier on labeled data, pairing the loss
/// to the output head the same way `train_local` does.
pub fn class_gradient(model: &Model, features: &Tensor, labels: &[usize]) -> Result<crate::nn::params::ParamVector> {
    match model.config.output_head {
        OutputHead::SoftmaxLogits => backward(model, features, &LossTarget::Classes(labels), LossKind::CrossEntropy),
        OutputHead::Linear => {
            let targets = one_hot(labels, model.config.output_dim());
            backward(model, features, &LossTarget::Values(&targets), LossKind::Mse)
        }
    }
}

/// Classifier loss on labeled data, matching `class_gradient`.
pub fn class_loss(model: &Model, features: &Tensor, labels: &[usize]) -> Result<f64> {
    match model.config.output_head {
        OutputHead::SoftmaxLogits => {
            crate::nn::model::loss_value(model, features, &LossTarget::Classes(labels), LossKind::CrossEntropy)
        }
        OutputHead::Linear => {
            let targets = one_hot(labels, model.config.output_dim());
            crate::nn::model::loss_value(model, features, &LossTarget::Values(&targets), LossKind::Mse)
        }
    }
}

/// Mini-batch reconstruction training of an autoencoder. Returns the updated copy.
pub fn train_autoencoder(
    ae: &Autoencoder,
    features: &Tensor,
    lr: f64,
    bs: usize,
    epochs: usize,
    optimizer: OptimizerKind,
    seed: u64,
) -> Result<Autoencoder> {
    let n = features.rows();
    if n == 0 {
        return Err(Error::EmptyData("train_autoencoder"));
    }
    if bs == 0 {
        return Err(Error::config("bs", "batch size must be positive"));
    }
    let mut current = ae.clone();
    let mut opt = OptimizerState::new(optimizer, current.param_len());
    let mut order: Vec<usize> = (0..n).collect();
    let d = features.cols();
    for epoch in 0..epochs {
        let mut rng = seeds::rng(seed, &[seeds::stream::EPOCH, epoch as u64]);
        order.shuffle(&mut rng);
        for chunk in order.chunks(bs) {
            let mut data = Vec::with_capacity(chunk.len() * d);
            for &i in chunk {
                data.extend_from_slice(features.row(i));
            }
            let batch = Tensor::from_rows(chunk.len(), d, data)?;
            let grad = current.recon_gradient(&batch)?;
            let params = optimizer_step(&mut opt, &current.params_concat(), &grad, lr)?;
            current = current.with_params(&params)?;
        }
    }
    if !current.params_concat().is_finite() {
        return Err(Error::NonFinite("train_autoencoder"));
    }
    Ok(current)
}
