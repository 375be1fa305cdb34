//! Evaluation: accuracy, confusion counts, ROC/AUC, smoothing, sweeps.

pub mod accuracy;
pub mod confusion;
pub mod roc;
pub mod smoothing;
pub mod sweep;

pub use accuracy::{accuracy, eval_loss};
pub use confusion::{confusion_counts, detection_rate, ConfusionCounts};
pub use roc::{auc_pair_oracle, roc_curve, RocCurve};
pub use smoothing::moving_average;
pub use sweep::{sweep_sensitivity, SweepRawRow, SweepResult, SweepRow};
