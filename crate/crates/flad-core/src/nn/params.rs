//! Flattened model parameters — the unit of client/server exchange.

use crate::{Error, Result};

/// Flat vector of model parameters. Client updates, gradients and optimizer
/// moments all live in this representation so they can be added, scaled and
/// aggregated without knowing the layer structure.
#[derive(Debug, Clone, PartialEq)]
pub struct ParamVector(Vec<f64>);

impl ParamVector {
    pub fn zeros(dim: usize) -> Self {
        Self(vec![0.0; dim])
    }

    pub fn from_vec(values: Vec<f64>) -> Self {
        Self(values)
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn as_mut_slice(&mut self) -> &mut [f64] {
        &mut self.0
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.0
    }

    fn check_dim(&self, other: &Self, context: &'static str) -> Result<()> {
        if self.dim() != other.dim() {
            return Err(Error::shape(context, self.dim().to_string(), other.dim().to_string()));
        }
        Ok(())
    }

    /// Elementwise `self + other`.
    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_dim(other, "ParamVector::add")?;
        Ok(Self(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect()))
    }

    /// Elementwise `self - other`.
    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.check_dim(other, "ParamVector::sub")?;
        Ok(Self(self.0.iter().zip(&other.0).map(|(a, b)| a - b).collect()))
    }

    pub fn scale(&self, c: f64) -> Self {
        Self(self.0.iter().map(|a| a * c).collect())
    }

    /// In-place `self += c * other`.
    pub fn axpy(&mut self, c: f64, other: &Self) -> Result<()> {
        self.check_dim(other, "ParamVector::axpy")?;
        for (a, b) in self.0.iter_mut().zip(&other.0) {
            *a += c * b;
        }
        Ok(())
    }

    /// Euclidean norm.
    pub fn l2_norm(&self) -> f64 {
        self.0.iter().map(|a| a * a).sum::<f64>().sqrt()
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().all(|v| v.is_finite())
    }
}

/// Euclidean norm of a parameter vector.
pub fn l2_norm(v: &ParamVector) -> f64 {
    v.l2_norm()
}
