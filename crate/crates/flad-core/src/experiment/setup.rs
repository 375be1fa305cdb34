//! Dataset assembly: base data, clean test split, reference sample,
//! client partition, poison injection.

use crate::data::{
    apply_poison, gen_synthetic, holdout_split, load_idx, partition_pool, select_reference,
    PartitionScheme, PoisonKind, PoisonSpec,
};
use crate::experiment::config::{DatasetConfig, ExperimentConfig, PartitionConfig, PoisonKindConfig};
use crate::federation::{ClientState, ExperimentData};
use crate::seeds;
use crate::{Error, Result};

/// Builds the full data bundle for one run. The reference sample is drawn from
/// the held-out test split *before* poisoning, so it is clean by construction.
pub fn build_data(cfg: &ExperimentConfig) -> Result<ExperimentData> {
    let base = match &cfg.dataset {
        DatasetConfig::Synthetic { k, per_class, d_in, class_sep, std } => {
            gen_synthetic(*k, *per_class, *d_in, *class_sep, *std, cfg.seed)?
        }
        DatasetConfig::Mnist { images_path, labels_path, subset_n } => {
            let full = load_idx(images_path, labels_path)?;
            if *subset_n >= full.n() {
                full
            } else {
                // Stratified desk-scale subset.
                select_reference(&full, *subset_n, seeds::derive(cfg.seed, &[seeds::stream::SUBSET]))?
            }
        }
    };

    let (train_idx, test_idx) = holdout_split(&base, cfg.eval.test_fraction, cfg.seed)?;
    if test_idx.is_empty() {
        return Err(Error::config("eval.test_fraction", "test split is empty"));
    }
    if train_idx.is_empty() {
        return Err(Error::config("eval.test_fraction", "training split is empty"));
    }
    let test = base.subset(&test_idx);
    if cfg.reference.m > test.n() {
        return Err(Error::config(
            "reference.m",
            format!("reference size {} exceeds the test split ({} samples)", cfg.reference.m, test.n()),
        ));
    }
    let reference = select_reference(&test, cfg.reference.m, cfg.seed)?;

    let scheme = match cfg.partition {
        PartitionConfig::Iid => PartitionScheme::Iid,
        PartitionConfig::Dirichlet { alpha } => PartitionScheme::Dirichlet { alpha },
    };
    let partition = partition_pool(&base, &train_idx, cfg.federation.n, scheme, cfg.seed)?;

    let spec = PoisonSpec {
        kind: match cfg.poison.kind {
            PoisonKindConfig::None => PoisonKind::None,
            PoisonKindConfig::LabelFlip { target_class } => PoisonKind::LabelFlip { target_class },
            PoisonKindConfig::FeatureNoise { std } => PoisonKind::FeatureNoise { std },
        },
        malicious_clients: cfg.poison.malicious_clients.clone(),
        poison_fraction: cfg.poison.poison_fraction,
    };
    let (poisoned, mask) = apply_poison(&base, &partition, &spec, cfg.seed)?;

    let clients = partition
        .assignments()
        .iter()
        .enumerate()
        .map(|(id, indices)| ClientState {
            id,
            indices: indices.clone(),
            is_malicious: mask.malicious[id],
        })
        .collect();

    Ok(ExperimentData { dataset: poisoned, clients, reference, test, mask })
}
