//! SGD and Adam parameter updates.

use crate::nn::params::ParamVector;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OptimizerKind {
    Sgd,
    Adam,
}

/// Optimizer moments and step counter. Zero-initialized; `t` increments by
/// exactly one per step for both kinds.
#[derive(Debug, Clone)]
pub struct OptimizerState {
    pub kind: OptimizerKind,
    pub m: ParamVector,
    pub v: ParamVector,
    pub t: u64,
    pub beta1: f64,
    pub beta2: f64,
    pub eps: f64,
}

impl OptimizerState {
    /// Fresh state with the standard Adam hyperparameters (0.9, 0.999, 1e-8).
    pub fn new(kind: OptimizerKind, dim: usize) -> Self {
        Self {
            kind,
            m: ParamVector::zeros(dim),
            v: ParamVector::zeros(dim),
            t: 0,
            beta1: 0.9,
            beta2: 0.999,
            eps: 1e-8,
        }
    }
}

/// One update step. Returns the new parameters; `state` advances.
///
/// - sgd: `params - lr * grad`
/// - adam: bias-corrected first/second moment update
pub fn optimizer_step(
    state: &mut OptimizerState,
    params: &ParamVector,
    grad: &ParamVector,
    lr: f64,
) -> Result<ParamVector> {
    if params.dim() != grad.dim() || params.dim() != state.m.dim() {
        return Err(Error::shape("optimizer_step", params.dim().to_string(), grad.dim().to_string()));
    }
    if lr < 0.0 || !lr.is_finite() {
        return Err(Error::config("lr", "learning rate must be non-negative"));
    }
    state.t += 1;
    match state.kind {
        OptimizerKind::Sgd => {
            let mut out = params.clone();
            out.axpy(-lr, grad)?;
            Ok(out)
        }
        OptimizerKind::Adam => {
            let t = state.t as i32;
            let bc1 = 1.0 - state.beta1.powi(t);
            let bc2 = 1.0 - state.beta2.powi(t);
            let mut out = Vec::with_capacity(params.dim());
            for i in 0..params.dim() {
                let g = grad.as_slice()[i];
                let m = state.beta1 * state.m.as_slice()[i] + (1.0 - state.beta1) * g;
                let v = state.beta2 * state.v.as_slice()[i] + (1.0 - state.beta2) * g * g;
                state.m.as_mut_slice()[i] = m;
                state.v.as_mut_slice()[i] = v;
                let m_hat = m / bc1;
                let v_hat = v / bc2;
                out.push(params.as_slice()[i] - lr * m_hat / (v_hat.sqrt() + state.eps));
            }
            Ok(ParamVector::from_vec(out))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sgd_zero_grad_leaves_params_unchanged() {
        let mut st = OptimizerState::new(OptimizerKind::Sgd, 3);
        let p = ParamVector::from_vec(vec![1.0, -2.0, 0.5]);
        let g = ParamVector::zeros(3);
        let out = optimizer_step(&mut st, &p, &g, 0.1).unwrap();
        assert_eq!(out, p);
        assert_eq!(st.t, 1);
    }

    #[test]
    fn sgd_arithmetic() {
        let mut st = OptimizerState::new(OptimizerKind::Sgd, 1);
        let out = optimizer_step(
            &mut st,
            &ParamVector::from_vec(vec![1.0]),
            &ParamVector::from_vec(vec![2.0]),
            0.5,
        )
        .unwrap();
        assert_eq!(out.as_slice(), &[0.0]);
    }

    #[test]
    fn adam_first_step_magnitude_is_lr() {
        // With unit gradient at t=1: m_hat = 1, v_hat = 1, step = lr/(1+eps).
        let mut st = OptimizerState::new(OptimizerKind::Adam, 1);
        let out = optimizer_step(
            &mut st,
            &ParamVector::zeros(1),
            &ParamVector::from_vec(vec![1.0]),
            0.001,
        )
        .unwrap();
        let expected = -0.001 / (1.0 + 1e-8);
        assert!((out.as_slice()[0] - expected).abs() < 1e-15);
    }

    #[test]
    fn adam_on_all_zero_gradients_never_moves() {
        let mut st = OptimizerState::new(OptimizerKind::Adam, 2);
        let p = ParamVector::from_vec(vec![0.3, -0.7]);
        let g = ParamVector::zeros(2);
        let mut q = p.clone();
        for _ in 0..10 {
            q = optimizer_step(&mut st, &q, &g, 0.01).unwrap();
        }
        assert_eq!(q, p);
        assert_eq!(st.t, 10);
    }

    #[test]
    fn dimension_mismatch_is_an_error() {
        let mut st = OptimizerState::new(OptimizerKind::Sgd, 2);
        let p = ParamVector::zeros(2);
        let g = ParamVector::zeros(3);
        assert!(optimizer_step(&mut st, &p, &g, 0.1).is_err());
    }
}
