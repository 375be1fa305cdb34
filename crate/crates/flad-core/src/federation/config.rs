//! Run configuration and state types for the federation loop.

use serde::{Deserialize, Serialize};

use crate::data::{Dataset, PoisonMask};
use crate::detection::{DetectionSettings, ReconBaseline, Sensitivity};
use crate::nn::{Autoencoder, MlpConfig, Model, OptimizerKind};
use crate::{Error, Result};

/// Learning-rate schedule across rounds.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum LrSchedule {
    #[serde(rename = "constant")]
    Constant,
    /// `lr / sqrt(R)` applied uniformly over the whole horizon.
    #[serde(rename = "inv_sqrt_T")]
    InvSqrtT,
}

/// Per-round federation parameters.
#[derive(Debug, Clone, PartialEq)]
pub struct RoundConfig {
    pub n_clients: usize,
    pub rounds: usize,
    pub lr: f64,
    pub bs: usize,
    pub local_epochs: usize,
    pub sens: Sensitivity,
    pub lr_schedule: LrSchedule,
    pub optimizer: OptimizerKind,
    pub seed: u64,
}

impl RoundConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n_clients == 0 {
            return Err(Error::config("federation.N", "need at least one client"));
        }
        if self.rounds == 0 {
            return Err(Error::config("federation.R", "need at least one round"));
        }
        if !(self.lr > 0.0) {
            return Err(Error::config("federation.lr", "learning rate must be positive"));
        }
        if self.bs == 0 {
            return Err(Error::config("federation.bs", "batch size must be positive"));
        }
        self.sens.validate()
    }

    /// The learning rate used in every round of this run.
    pub fn lr_t(&self) -> f64 {
        match self.lr_schedule {
            LrSchedule::Constant => self.lr,
            LrSchedule::InvSqrtT => self.lr / (self.rounds as f64).sqrt(),
        }
    }
}

/// Detector-autoencoder training budget and architecture.
#[derive(Debug, Clone, PartialEq)]
pub struct AeConfig {
    pub hidden: usize,
    pub bottleneck: usize,
    pub epochs: usize,
    pub lr: f64,
    pub bs: usize,
    /// Chunk size for the reconstruction-baseline calibration.
    pub calib_chunk: usize,
}

impl AeConfig {
    /// Desk-scale default: `d_in -> 64 -> 16 -> 64 -> d_in`, shrinking the
    /// bottleneck for narrow inputs so it stays below `d_in`.
    pub fn default_for(d_in: usize) -> Self {
        let bottleneck = if d_in > 16 { 16 } else { (d_in / 2).max(1) };
        Self {
            hidden: 64,
            bottleneck,
            epochs: 200,
            lr: 0.001,
            bs: 64,
            calib_chunk: 4,
        }
    }
}

/// Everything a run needs besides the data.
#[derive(Debug, Clone, PartialEq)]
pub struct RunOptions {
    pub round: RoundConfig,
    pub detection: DetectionSettings,
    pub ae: AeConfig,
    pub model: MlpConfig,
}

/// One client: an id, a view into the (possibly poisoned) parent dataset and
/// the hidden ground-truth bit.
#[derive(Debug, Clone, PartialEq)]
pub struct ClientState {
    pub id: usize,
    pub indices: Vec<usize>,
    pub is_malicious: bool,
}

/// Server-side state across rounds.
#[derive(Debug, Clone)]
pub struct ServerState {
    pub global: Model,
    pub detector_ae: Autoencoder,
    pub recon_base: ReconBaseline,
    pub d_ref: Dataset,
}

/// The dataset bundle produced by the experiment pipeline.
#[derive(Debug, Clone)]
pub struct ExperimentData {
    /// Post-poison training parent; client indices point into it.
    pub dataset: Dataset,
    pub clients: Vec<ClientState>,
    /// Clean reference sample (server side).
    pub reference: Dataset,
    /// Clean held-out evaluation split, never visible to clients.
    pub test: Dataset,
    pub mask: PoisonMask,
}

impl ExperimentData {
    /// Indices used for the "accuracy on poisoned data" evaluation: the union
    /// of malicious clients' shards, or every client's shard when no client
    /// is malicious.
    pub fn poisoned_eval_indices(&self) -> Vec<usize> {
        let malicious: Vec<&ClientState> = self.clients.iter().filter(|c| c.is_malicious).collect();
        let pick: Box<dyn Iterator<Item = &ClientState>> = if malicious.is_empty() {
            Box::new(self.clients.iter())
        } else {
            Box::new(malicious.into_iter())
        };
        let mut idx: Vec<usize> = pick.flat_map(|c| c.indices.iter().copied()).collect();
        idx.sort_unstable();
        idx
    }
}
