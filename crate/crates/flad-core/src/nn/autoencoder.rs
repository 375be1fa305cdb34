//! Dense autoencoder: paired encoder/decoder models with joint backprop.

use crate::nn::loss::{LossKind, LossTarget};
use crate::nn::model::{Activation, MlpConfig, Model, OutputHead};
use crate::nn::params::ParamVector;
use crate::nn::tensor::Tensor;
use crate::seeds;
use crate::{Error, Result};

/// Encoder/decoder pair. The decoder mirrors the encoder back to the input
/// dimension; the bottleneck must be strictly narrower than the input.
#[derive(Debug, Clone)]
pub struct Autoencoder {
    pub encoder: Model,
    pub decoder: Model,
}

impl Autoencoder {
    pub fn new(encoder: Model, decoder: Model) -> Result<Self> {
        let d_in = encoder.config.input_dim();
        let bottleneck = encoder.config.output_dim();
        if decoder.config.input_dim() != bottleneck {
            return Err(Error::shape(
                "Autoencoder::new",
                format!("decoder input {bottleneck}"),
                decoder.config.input_dim().to_string(),
            ));
        }
        if decoder.config.output_dim() != d_in {
            return Err(Error::shape(
                "Autoencoder::new",
                format!("decoder output {d_in}"),
                decoder.config.output_dim().to_string(),
            ));
        }
        if bottleneck >= d_in {
            return Err(Error::config("bottleneck", format!("must be < input dim {d_in}, got {bottleneck}")));
        }
        Ok(Self { encoder, decoder })
    }

    /// Skips the bottleneck-narrower-than-input check. Exists so test
    /// harnesses can build square (e.g. identity) encoder/decoder pairs.
    pub fn new_unchecked(encoder: Model, decoder: Model) -> Self {
        Self { encoder, decoder }
    }

    /// Seeded autoencoder `d_in -> hidden -> bottleneck -> hidden -> d_in`
    /// with tanh hidden layers and linear outputs.
    pub fn init(d_in: usize, hidden: usize, bottleneck: usize, seed: u64) -> Result<Self> {
        let enc_cfg = MlpConfig::new(vec![d_in, hidden, bottleneck], Activation::Tanh, OutputHead::Linear)?;
        let dec_cfg = MlpConfig::new(vec![bottleneck, hidden, d_in], Activation::Tanh, OutputHead::Linear)?;
        let encoder = Model::init(enc_cfg, seeds::derive(seed, &[seeds::stream::AE_INIT, 0]));
        let decoder = Model::init(dec_cfg, seeds::derive(seed, &[seeds::stream::AE_INIT, 1]));
        Self::new(encoder, decoder)
    }

    pub fn input_dim(&self) -> usize {
        self.encoder.config.input_dim()
    }

    pub fn param_len(&self) -> usize {
        self.encoder.config.param_len() + self.decoder.config.param_len()
    }

    /// Encoder parameters followed by decoder parameters.
    pub fn params_concat(&self) -> ParamVector {
        let mut v = self.encoder.params.as_slice().to_vec();
        v.extend_from_slice(self.decoder.params.as_slice());
        ParamVector::from_vec(v)
    }

    /// Rebuilds the pair from a concatenated parameter vector.
    pub fn with_params(&self, params: &ParamVector) -> Result<Self> {
        if params.dim() != self.param_len() {
            return Err(Error::shape("Autoencoder::with_params", self.param_len().to_string(), params.dim().to_string()));
        }
        let split = self.encoder.config.param_len();
        let enc = Model::from_params(
            self.encoder.config.clone(),
            ParamVector::from_vec(params.as_slice()[..split].to_vec()),
        )?;
        let dec = Model::from_params(
            self.decoder.config.clone(),
            ParamVector::from_vec(params.as_slice()[split..].to_vec()),
        )?;
        Ok(Self { encoder: enc, decoder: dec })
    }

    /// `Dec(Enc(batch))`.
    pub fn reconstruct(&self, batch: &Tensor) -> Result<Tensor> {
        let code = self.encoder.forward(batch)?;
        self.decoder.forward(&code)
    }

    /// Mean-over-batch gradient of the reconstruction MSE w.r.t. the
    /// concatenated encoder+decoder parameters, by chaining backprop through
    /// the decoder into the encoder.
    pub fn recon_gradient(&self, batch: &Tensor) -> Result<ParamVector> {
        let enc_cache = self.encoder.forward_cached(batch)?;
        let code = enc_cache.output().clone();
        let dec_cache = self.decoder.forward_cached(&code)?;
        let delta_out = crate::nn::loss::output_delta(dec_cache.output(), &LossTarget::Values(batch), LossKind::Mse)?;
        let (dec_grad, delta_code) = self.decoder.backward_from_output_delta(&dec_cache, delta_out);
        let (enc_grad, _) = self.encoder.backward_from_output_delta(&enc_cache, delta_code);
        let mut v = enc_grad.into_vec();
        v.extend(dec_grad.into_vec());
        Ok(ParamVector::from_vec(v))
    }

    /// Reconstruction MSE of a batch.
    pub fn recon_mse(&self, batch: &Tensor) -> Result<f64> {
        crate::nn::loss::mse_loss(batch, &self.reconstruct(batch)?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn identity_square_ae(d: usize) -> Autoencoder {
        // Single-layer linear encoder/decoder set to the identity matrix.
        let cfg = MlpConfig::new(vec![d, d], Activation::Tanh, OutputHead::Linear).unwrap();
        let mut enc = Model::zeros(cfg.clone());
        let mut dec = Model::zeros(cfg);
        for i in 0..d {
            enc.params.as_mut_slice()[i * d + i] = 1.0;
            dec.params.as_mut_slice()[i * d + i] = 1.0;
        }
        Autoencoder::new_unchecked(enc, dec)
    }

    #[test]
    fn identity_autoencoder_reproduces_input() {
        let ae = identity_square_ae(3);
        let x = Tensor::from_rows(2, 3, vec![0.1, 0.5, 0.9, 0.3, 0.2, 0.7]).unwrap();
        let y = ae.reconstruct(&x).unwrap();
        for (a, b) in x.data().iter().zip(y.data()) {
            assert!((a - b).abs() < 1e-15);
        }
    }

    #[test]
    fn zero_weight_autoencoder_outputs_zero() {
        let enc_cfg = MlpConfig::new(vec![4, 3, 2], Activation::Tanh, OutputHead::Linear).unwrap();
        let dec_cfg = MlpConfig::new(vec![2, 3, 4], Activation::Tanh, OutputHead::Linear).unwrap();
        let ae = Autoencoder::new(Model::zeros(enc_cfg), Model::zeros(dec_cfg)).unwrap();
        let x = Tensor::from_rows(2, 4, vec![0.5; 8]).unwrap();
        let y = ae.reconstruct(&x).unwrap();
        assert!(y.data().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn bottleneck_must_be_narrower_than_input() {
        let enc_cfg = MlpConfig::new(vec![4, 4], Activation::Tanh, OutputHead::Linear).unwrap();
        let dec_cfg = MlpConfig::new(vec![4, 4], Activation::Tanh, OutputHead::Linear).unwrap();
        assert!(Autoencoder::new(Model::zeros(enc_cfg), Model::zeros(dec_cfg)).is_err());
    }

    #[test]
    fn recon_gradient_matches_finite_differences() {
        use rand::Rng;
        let ae = Autoencoder::init(5, 4, 2, 99).unwrap();
        let mut rng = crate::seeds::rng(5, &[50]);
        let data: Vec<f64> = (0..15).map(|_| rng.random_range(0.0..1.0)).collect();
        let x = Tensor::from_rows(3, 5, data).unwrap();
        let analytic = ae.recon_gradient(&x).unwrap();
        let eps = 1e-5;
        let base = ae.params_concat();
        let mut max_rel = 0.0f64;
        for i in 0..base.dim() {
            let mut plus = base.clone();
            plus.as_mut_slice()[i] += eps;
            let mut minus = base.clone();
            minus.as_mut_slice()[i] -= eps;
            let lp = ae.with_params(&plus).unwrap().recon_mse(&x).unwrap();
            let lm = ae.with_params(&minus).unwrap().recon_mse(&x).unwrap();
            let fd = (lp - lm) / (2.0 * eps);
            let a = analytic.as_slice()[i];
            max_rel = max_rel.max((a - fd).abs() / a.abs().max(fd.abs()).max(1e-6));
        }
        assert!(max_rel < 1e-4, "max relative error {max_rel}");
    }
}
