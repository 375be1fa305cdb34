//! Anomaly scoring and flagging: gradient channel, reconstruction channel,
//! their combination, and the PCA baseline.

pub mod gradient;
pub mod pca;
pub mod recon;
pub mod verdict;

pub use gradient::{flag_gradient_anomaly, grad_deviation, population_stats, GradientStats};
pub use pca::{pca_fit, pca_score, PcaModel};
pub use recon::{calibrate_recon_baseline, flag_recon_anomaly, recon_error, ReconBaseline};
pub use verdict::{
    detect_anom, grad_z_scores, recon_z_score, AeMode, AnomalyVerdict, CombineRule, DetectionSettings,
    GradScoreKind, Sensitivity, VerdictFlags,
};
