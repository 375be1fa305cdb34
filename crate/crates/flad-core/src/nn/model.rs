//! Dense MLP: configuration, seeded initialization, forward pass and exact
//! mean-over-batch backpropagation.
//!
//! Parameters live in a flat [`ParamVector`] laid out layer by layer: the
//! `(out, in)` row-major weight matrix first, then the bias vector. That is
//! the representation exchanged between clients and server, so gradients and
//! updates use it directly.

use rand::distr::{Distribution, Uniform};

use crate::nn::loss::{softmax_rows, LossKind, LossTarget};
use crate::nn::params::ParamVector;
use crate::nn::tensor::Tensor;
use crate::seeds;
use crate::{Error, Result};

/// Hidden-layer activation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Activation {
    Relu,
    Tanh,
}

impl Activation {
    #[inline]
    fn apply(self, z: f64) -> f64 {
        match self {
            Activation::Relu => {
                if z > 0.0 {
                    z
                } else {
                    0.0
                }
            }
            Activation::Tanh => z.tanh(),
        }
    }

    /// Derivative expressed through the activation *output* `a`.
    #[inline]
    fn grad_from_output(self, a: f64) -> f64 {
        match self {
            Activation::Relu => {
                if a > 0.0 {
                    1.0
                } else {
                    0.0
                }
            }
            Activation::Tanh => 1.0 - a * a,
        }
    }
}

/// What the last layer produces in [`Model::forward`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OutputHead {
    /// Last layer computes logits; `forward` returns softmax probabilities.
    SoftmaxLogits,
    /// Last layer output is returned as-is.
    Linear,
}

/// Architecture description for a [`Model`].
#[derive(Debug, Clone, PartialEq)]
pub struct MlpConfig {
    pub layer_sizes: Vec<usize>,
    pub hidden_activation: Activation,
    pub output_head: OutputHead,
}

impl MlpConfig {
    pub fn new(layer_sizes: Vec<usize>, hidden_activation: Activation, output_head: OutputHead) -> Result<Self> {
        if layer_sizes.len() < 2 {
            return Err(Error::config("layer_sizes", "need at least input and output dims"));
        }
        if layer_sizes.iter().any(|&d| d == 0) {
            return Err(Error::config("layer_sizes", "all dims must be positive"));
        }
        Ok(Self { layer_sizes, hidden_activation, output_head })
    }

    pub fn input_dim(&self) -> usize {
        self.layer_sizes[0]
    }

    pub fn output_dim(&self) -> usize {
        *self.layer_sizes.last().unwrap()
    }

    pub fn n_layers(&self) -> usize {
        self.layer_sizes.len() - 1
    }

    /// `(fan_in, fan_out)` per layer.
    pub(crate) fn layer_dims(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.layer_sizes.windows(2).map(|w| (w[0], w[1]))
    }

    /// Total parameter count: sum over layers of `fan_in*fan_out + fan_out`.
    pub fn param_len(&self) -> usize {
        self.layer_dims().map(|(i, o)| i * o + o).sum()
    }

    /// Flat offset of layer `l`'s weight block.
    fn layer_offset(&self, l: usize) -> usize {
        self.layer_dims().take(l).map(|(i, o)| i * o + o).sum()
    }
}

/// A dense feed-forward network with flat parameters.
#[derive(Debug, Clone, PartialEq)]
pub struct Model {
    pub config: MlpConfig,
    pub params: ParamVector,
}

/// Per-layer inputs captured during a forward pass, consumed by backprop.
pub(crate) struct ForwardCache {
    /// `inputs[l]` is the batch fed to layer `l` (so `inputs[0]` is the data).
    inputs: Vec<Tensor>,
    /// Pre-head output of the last layer (logits for a softmax head).
    output: Tensor,
}

impl ForwardCache {
    pub(crate) fn output(&self) -> &Tensor {
        &self.output
    }
}

impl Model {
    /// Zero-weight model (useful as a degenerate fixture).
    pub fn zeros(config: MlpConfig) -> Self {
        let d = config.param_len();
        Self { config, params: ParamVector::zeros(d) }
    }

    /// Seeded Xavier-uniform initialization: weights uniform in
    /// `±sqrt(6/(fan_in+fan_out))`, biases zero. Weights are drawn in storage
    /// order so the stream is reproducible.
    pub fn init(config: MlpConfig, seed: u64) -> Self {
        let mut rng = seeds::rng(seed, &[seeds::stream::MODEL_INIT]);
        let mut values = Vec::with_capacity(config.param_len());
        for (fan_in, fan_out) in config.layer_dims() {
            let limit = (6.0 / (fan_in + fan_out) as f64).sqrt();
            let dist = Uniform::new_inclusive(-limit, limit).expect("valid range");
            for _ in 0..fan_in * fan_out {
                values.push(dist.sample(&mut rng));
            }
            values.extend(std::iter::repeat(0.0).take(fan_out));
        }
        Self { config, params: ParamVector::from_vec(values) }
    }

    pub fn from_params(config: MlpConfig, params: ParamVector) -> Result<Self> {
        if params.dim() != config.param_len() {
            return Err(Error::shape(
                "Model::from_params",
                config.param_len().to_string(),
                params.dim().to_string(),
            ));
        }
        Ok(Self { config, params })
    }

    fn weights(&self, l: usize) -> (&[f64], &[f64]) {
        let (fan_in, fan_out) = (self.config.layer_sizes[l], self.config.layer_sizes[l + 1]);
        let off = self.config.layer_offset(l);
        let w = &self.params.as_slice()[off..off + fan_in * fan_out];
        let b = &self.params.as_slice()[off + fan_in * fan_out..off + fan_in * fan_out + fan_out];
        (w, b)
    }

    /// `z = a W^T + b` for a `(n, fan_in)` batch; weights row-major `(fan_out, fan_in)`.
    fn affine(&self, l: usize, a: &Tensor) -> Tensor {
        let (fan_in, fan_out) = (self.config.layer_sizes[l], self.config.layer_sizes[l + 1]);
        let (w, b) = self.weights(l);
        let n = a.rows();
        let mut z = vec![0.0; n * fan_out];
        for r in 0..n {
            let row = a.row(r);
            let out = &mut z[r * fan_out..(r + 1) * fan_out];
            for o in 0..fan_out {
                let wrow = &w[o * fan_in..(o + 1) * fan_in];
                let mut acc = b[o];
                for i in 0..fan_in {
                    acc += wrow[i] * row[i];
                }
                out[o] = acc;
            }
        }
        Tensor::from_rows(n, fan_out, z).expect("affine shape")
    }

    pub(crate) fn forward_cached(&self, batch: &Tensor) -> Result<ForwardCache> {
        batch.expect_cols(self.config.input_dim(), "Model::forward")?;
        let n_layers = self.config.n_layers();
        let mut inputs = Vec::with_capacity(n_layers);
        let mut a = batch.clone();
        for l in 0..n_layers - 1 {
            let mut z = self.affine(l, &a);
            for v in z.data_mut() {
                *v = self.config.hidden_activation.apply(*v);
            }
            inputs.push(a);
            a = z;
        }
        let output = self.affine(n_layers - 1, &a);
        inputs.push(a);
        Ok(ForwardCache { inputs, output })
    }

    /// Pre-head output (logits for a softmax head, raw values otherwise).
    pub fn forward_logits(&self, batch: &Tensor) -> Result<Tensor> {
        Ok(self.forward_cached(batch)?.output)
    }

    /// Full forward pass; a softmax head returns per-row probability vectors.
    pub fn forward(&self, batch: &Tensor) -> Result<Tensor> {
        let out = self.forward_logits(batch)?;
        Ok(match self.config.output_head {
            OutputHead::SoftmaxLogits => softmax_rows(&out),
            OutputHead::Linear => out,
        })
    }

    /// Backpropagates `delta_out` (gradient of the loss w.r.t. the pre-head
    /// output) and returns flat parameter gradients plus the gradient w.r.t.
    /// the input batch.
    pub(crate) fn backward_from_output_delta(
        &self,
        cache: &ForwardCache,
        delta_out: Tensor,
    ) -> (ParamVector, Tensor) {
        let n = delta_out.rows();
        let mut grads = vec![0.0; self.config.param_len()];
        let mut delta = delta_out;
        for l in (0..self.config.n_layers()).rev() {
            let (fan_in, fan_out) = (self.config.layer_sizes[l], self.config.layer_sizes[l + 1]);
            let off = self.config.layer_offset(l);
            let a = &cache.inputs[l];
            let (w, _) = self.weights(l);
            {
                let (dw, db) = grads[off..off + fan_in * fan_out + fan_out].split_at_mut(fan_in * fan_out);
                for r in 0..n {
                    let drow = delta.row(r);
                    let arow = a.row(r);
                    for o in 0..fan_out {
                        let d = drow[o];
                        db[o] += d;
                        let wrow = &mut dw[o * fan_in..(o + 1) * fan_in];
                        for i in 0..fan_in {
                            wrow[i] += d * arow[i];
                        }
                    }
                }
            }
            // Gradient w.r.t. this layer's input; include the activation
            // derivative only when that input came out of an activation.
            let mut prev = vec![0.0; n * fan_in];
            for r in 0..n {
                let drow = delta.row(r);
                let out = &mut prev[r * fan_in..(r + 1) * fan_in];
                for o in 0..fan_out {
                    let d = drow[o];
                    let wrow = &w[o * fan_in..(o + 1) * fan_in];
                    for i in 0..fan_in {
                        out[i] += d * wrow[i];
                    }
                }
            }
            if l > 0 {
                for (p, act) in prev.iter_mut().zip(a.data()) {
                    *p *= self.config.hidden_activation.grad_from_output(*act);
                }
            }
            delta = Tensor::from_rows(n, fan_in, prev).expect("delta shape");
        }
        (ParamVector::from_vec(grads), delta)
    }
}

/// Mean-over-batch gradient of `loss` w.r.t. all model parameters.
pub fn backward(model: &Model, batch: &Tensor, target: &LossTarget<'_>, loss: LossKind) -> Result<ParamVector> {
    let cache = model.forward_cached(batch)?;
    let delta = crate::nn::loss::output_delta(&cache.output, target, loss)?;
    Ok(model.backward_from_output_delta(&cache, delta).0)
}

/// Loss evaluated through the model; shares the exact code path that
/// `backward` differentiates, which is what the finite-difference oracle needs.
pub fn loss_value(model: &Model, batch: &Tensor, target: &LossTarget<'_>, loss: LossKind) -> Result<f64> {
    let out = model.forward_logits(batch)?;
    crate::nn::loss::loss_of_output(&out, target, loss)
}
