//! The federation loop: per-round local training, anomaly screening,
//! exclusion of flagged updates, and size-weighted aggregation.

pub mod config;
pub mod round;
pub mod run;

pub use config::{AeConfig, ClientState, ExperimentData, LrSchedule, RoundConfig, RunOptions, ServerState};
pub use round::{aggregate, flad_round, local_update, LocalUpdate, RoundReport};
pub use run::{prepare_server, replay_accepted_deltas, run_fedavg, run_flad, RunOutput};
