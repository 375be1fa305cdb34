//! Deterministic federated-learning simulator with dual-channel anomaly screening.
//!
//! The crate simulates a round-based federated network in process: every round each
//! client trains a local copy of the global model on its private shard, the server
//! screens the returned updates through two complementary anomaly channels
//! (gradient deviation against a clean reference, autoencoder reconstruction error
//! against a calibrated baseline), drops flagged updates, and folds the survivors
//! into the global model with a size-weighted average.
//!
//! Module map:
//!
//! - [`nn`] — dense network core: tensors, MLP classifier, autoencoder, losses,
//!   optimizers, exact backprop and a finite-difference gradient oracle.
//! - [`data`] — MNIST IDX loading, synthetic blob generation, client partitioning
//!   (IID / Dirichlet) and poisoning attacks with ground-truth masks.
//! - [`detection`] — anomaly scoring and flagging for both channels plus the PCA
//!   baseline detector.
//! - [`federation`] — the orchestration loop: local updates, screening, exclusion,
//!   size-weighted aggregation, round reports.
//! - [`metrics`] — accuracy, confusion counts, ROC/AUC with an independent
//!   pair-counting oracle, smoothing, sensitivity sweeps.
//! - [`experiment`] — experiment configuration (JSON), dataset assembly and run
//!   summaries shared by the CLI and the browser demo.
//!
//! Every public entry point is a pure function of its inputs and an explicit seed;
//! repeated runs are bit-identical.

pub mod data;
pub mod detection;
pub mod error;
pub mod experiment;
pub mod federation;
pub mod metrics;
pub mod nn;
pub mod seeds;

pub use error::{Error, IdxErrorKind, Result};
