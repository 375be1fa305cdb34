//! Poisoning attacks with ground-truth masks.

use rand::seq::SliceRandom;
use rand_distr::{Distribution, Normal};

use crate::data::dataset::Dataset;
use crate::data::partition::ClientPartition;
use crate::seeds;
use crate::{Error, Result};

/// Attack family.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PoisonKind {
    None,
    /// Relabel sampled points to `target_class`; points already labeled the
    /// target get `(target_class + 1) mod k` so every masked sample truly changes.
    LabelFlip { target_class: usize },
    /// Add `N(0, std^2)` per entry, then clamp back to `[0, 1]`.
    FeatureNoise { std: f64 },
}

#[derive(Debug, Clone, PartialEq)]
pub struct PoisonSpec {
    pub kind: PoisonKind,
    pub malicious_clients: Vec<usize>,
    /// Fraction of each malicious client's samples that gets altered.
    pub poison_fraction: f64,
}

impl PoisonSpec {
    pub fn clean() -> Self {
        Self { kind: PoisonKind::None, malicious_clients: Vec::new(), poison_fraction: 0.0 }
    }
}

/// Ground truth for detector evaluation: which samples were altered and which
/// clients are malicious. Hidden from the detector itself.
#[derive(Debug, Clone, PartialEq)]
pub struct PoisonMask {
    pub altered: Vec<bool>,
    pub malicious: Vec<bool>,
}

fn validate(spec: &PoisonSpec, dataset: &Dataset, n_clients: usize) -> Result<()> {
    if !(0.0..=1.0).contains(&spec.poison_fraction) {
        return Err(Error::config("poison_fraction", "must lie in [0, 1]"));
    }
    if let Some(&bad) = spec.malicious_clients.iter().find(|&&c| c >= n_clients) {
        return Err(Error::config("malicious_clients", format!("client {bad} out of range (N = {n_clients})")));
    }
    match spec.kind {
        PoisonKind::LabelFlip { target_class } if target_class >= dataset.k() => {
            Err(Error::config("target_class", format!("class {target_class} out of range (k = {})", dataset.k())))
        }
        PoisonKind::FeatureNoise { std } if std < 0.0 => {
            Err(Error::config("std", "noise std must be non-negative"))
        }
        _ => Ok(()),
    }
}

/// Applies the attack to the malicious clients' shards and returns the
/// poisoned copy plus the ground-truth mask. Clean clients are untouched.
pub fn apply_poison(
    dataset: &Dataset,
    partition: &ClientPartition,
    spec: &PoisonSpec,
    seed: u64,
) -> Result<(Dataset, PoisonMask)> {
    validate(spec, dataset, partition.n_clients())?;
    let mut poisoned = dataset.clone();
    let mut mask = PoisonMask {
        altered: vec![false; dataset.n()],
        malicious: vec![false; partition.n_clients()],
    };
    for &c in &spec.malicious_clients {
        mask.malicious[c] = true;
    }
    if matches!(spec.kind, PoisonKind::None) {
        return Ok((poisoned, mask));
    }
    let k = dataset.k();
    for &c in &spec.malicious_clients {
        let mut rng = seeds::rng(seed, &[seeds::stream::POISON, c as u64]);
        let mut indices = partition.client(c).to_vec();
        indices.shuffle(&mut rng);
        let n_alter = (spec.poison_fraction * indices.len() as f64).round() as usize;
        let chosen = &indices[..n_alter.min(indices.len())];
        match spec.kind {
            PoisonKind::None => unreachable!(),
            PoisonKind::LabelFlip { target_class } => {
                for &i in chosen {
                    let orig = poisoned.labels()[i];
                    poisoned.labels_mut()[i] = if orig == target_class {
                        (target_class + 1) % k
                    } else {
                        target_class
                    };
                    mask.altered[i] = true;
                }
            }
            PoisonKind::FeatureNoise { std } => {
                // std = 0 still marks the sampled indices as altered.
                let noise = Normal::new(0.0, std.max(f64::MIN_POSITIVE))
                    .map_err(|_| Error::config("std", "invalid noise std"))?;
                for &i in chosen {
                    let row = poisoned.features_mut().row_mut(i);
                    if std > 0.0 {
                        for v in row.iter_mut() {
                            *v = (*v + noise.sample(&mut rng)).clamp(0.0, 1.0);
                        }
                    }
                    mask.altered[i] = true;
                }
            }
        }
    }
    Ok((poisoned, mask))
}
