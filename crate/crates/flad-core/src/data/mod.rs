//! Dataset loading, synthesis, partitioning and poisoning.

pub mod dataset;
pub mod idx;
pub mod partition;
pub mod poison;
pub mod reference;
pub mod synthetic;

pub use dataset::{Dataset, DatasetView};
pub use idx::{load_idx, write_idx};
pub use partition::{holdout_split, partition, partition_pool, ClientPartition, PartitionScheme};
pub use poison::{apply_poison, PoisonKind, PoisonMask, PoisonSpec};
pub use reference::select_reference;
pub use synthetic::gen_synthetic;
