//! Backprop-vs-finite-difference verification over the architecture set the
//! simulator actually uses.

use rand::Rng;

use crate::nn::autoencoder::Autoencoder;
use crate::nn::fd::{finite_diff_gradient, max_relative_error};
use crate::nn::loss::{LossKind, LossTarget};
use crate::nn::model::{backward, Activation, MlpConfig, Model, OutputHead};
use crate::nn::tensor::Tensor;
use crate::seeds;
use crate::Result;

/// Outcome for one architecture/loss pairing.
#[derive(Debug, Clone)]
pub struct GradCheckReport {
    pub name: &'static str,
    pub seeds: usize,
    pub max_rel_error: f64,
}

fn random_batch(rng: &mut impl Rng, n: usize, d: usize) -> Tensor {
    let data = (0..n * d).map(|_| rng.random_range(0.0..1.0)).collect();
    Tensor::from_rows(n, d, data).expect("batch shape")
}

fn check_classifier(
    name: &'static str,
    layer_sizes: Vec<usize>,
    act: Activation,
    head: OutputHead,
    loss: LossKind,
    n_seeds: usize,
) -> Result<GradCheckReport> {
    let k = *layer_sizes.last().unwrap();
    let d = layer_sizes[0];
    let mut worst = 0.0f64;
    for s in 0..n_seeds {
        let cfg = MlpConfig::new(layer_sizes.clone(), act, head)?;
        let model = Model::init(cfg, seeds::derive(1000, &[s as u64]));
        let mut rng = seeds::rng(2000, &[s as u64]);
        let batch = random_batch(&mut rng, 5, d);
        let err = match loss {
            LossKind::CrossEntropy => {
                let labels: Vec<usize> = (0..5).map(|_| rng.random_range(0..k)).collect();
                let target = LossTarget::Classes(&labels);
                let analytic = backward(&model, &batch, &target, loss)?;
                let numeric = finite_diff_gradient(&model, &batch, &target, loss, 1e-5)?;
                max_relative_error(&analytic, &numeric)
            }
            LossKind::Mse => {
                let values = random_batch(&mut rng, 5, k);
                let target = LossTarget::Values(&values);
                let analytic = backward(&model, &batch, &target, loss)?;
                let numeric = finite_diff_gradient(&model, &batch, &target, loss, 1e-5)?;
                max_relative_error(&analytic, &numeric)
            }
        };
        worst = worst.max(err);
    }
    Ok(GradCheckReport { name, seeds: n_seeds, max_rel_error: worst })
}

fn check_autoencoder(n_seeds: usize) -> Result<GradCheckReport> {
    let mut worst = 0.0f64;
    for s in 0..n_seeds {
        let ae = Autoencoder::init(6, 5, 2, seeds::derive(3000, &[s as u64]))?;
        let mut rng = seeds::rng(4000, &[s as u64]);
        let batch = random_batch(&mut rng, 4, 6);
        let analytic = ae.recon_gradient(&batch)?;
        // Finite differences over the concatenated encoder+decoder vector.
        let base = ae.params_concat();
        let eps = 1e-5;
        let mut numeric = Vec::with_capacity(base.dim());
        for i in 0..base.dim() {
            let mut plus = base.clone();
            plus.as_mut_slice()[i] += eps;
            let mut minus = base.clone();
            minus.as_mut_slice()[i] -= eps;
            let lp = ae.with_params(&plus)?.recon_mse(&batch)?;
            let lm = ae.with_params(&minus)?.recon_mse(&batch)?;
            numeric.push((lp - lm) / (2.0 * eps));
        }
        let numeric = crate::nn::params::ParamVector::from_vec(numeric);
        worst = worst.max(max_relative_error(&analytic, &numeric));
    }
    Ok(GradCheckReport { name: "autoencoder tanh/linear + mse", seeds: n_seeds, max_rel_error: worst })
}

/// Runs the standard architecture set with `n_seeds` random instances each.
/// Relu layers are paired with a tanh variant because relu's kink makes
/// finite differences unreliable exactly at zero pre-activations.
pub fn run_gradcheck(n_seeds: usize) -> Result<Vec<GradCheckReport>> {
    Ok(vec![
        check_classifier(
            "classifier relu/softmax + cross-entropy",
            vec![6, 8, 3],
            Activation::Relu,
            OutputHead::SoftmaxLogits,
            LossKind::CrossEntropy,
            n_seeds,
        )?,
        check_classifier(
            "classifier tanh/softmax + cross-entropy",
            vec![6, 8, 3],
            Activation::Tanh,
            OutputHead::SoftmaxLogits,
            LossKind::CrossEntropy,
            n_seeds,
        )?,
        check_classifier(
            "linear/softmax + cross-entropy (convex)",
            vec![6, 3],
            Activation::Tanh,
            OutputHead::SoftmaxLogits,
            LossKind::CrossEntropy,
            n_seeds,
        )?,
        check_classifier(
            "regressor tanh/linear + mse",
            vec![6, 8, 3],
            Activation::Tanh,
            OutputHead::Linear,
            LossKind::Mse,
            n_seeds,
        )?,
        check_autoencoder(n_seeds)?,
    ])
}
