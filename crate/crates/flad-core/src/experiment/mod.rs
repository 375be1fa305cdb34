//! Experiment assembly: configuration, data pipeline, runs and summaries.

pub mod config;
pub mod scores;
pub mod setup;
pub mod summary;

pub use config::{
    DatasetConfig, DetectionConfig, EvalConfig, ExperimentConfig, FederationConfig, PartitionConfig,
    PoisonConfig, PoisonKindConfig, ReferenceConfig, SensConfig, SfValue,
};
pub use scores::{detector_scores, DetectorKind};
pub use setup::build_data;
pub use summary::{summarize, RunSummary};

use crate::federation::{run_flad, ExperimentData, RunOptions, RunOutput};
use crate::Result;

/// A complete single run: the data bundle, resolved options, outputs, summary.
#[derive(Debug, Clone)]
pub struct SingleRun {
    pub data: ExperimentData,
    pub options: RunOptions,
    pub output: RunOutput,
    pub summary: RunSummary,
}

/// Builds the data, runs FLAD, and summarizes — the shared entry point for
/// the CLI, sweeps and the browser demo.
pub fn run_single(cfg: &ExperimentConfig) -> Result<SingleRun> {
    cfg.validate()?;
    let data = build_data(cfg)?;
    let options = cfg.build_options(data.dataset.d_in(), data.dataset.k())?;
    let output = run_flad(&data, &options)?;
    let summary = summarize(&data, &output)?;
    Ok(SingleRun { data, options, output, summary })
}
