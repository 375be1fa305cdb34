//! Experiment configuration: the JSON schema consumed by the CLI and the
//! browser demo. Unknown fields are rejected so typos fail loudly.

use serde::de::{self, Visitor};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::detection::{AeMode, CombineRule, DetectionSettings, GradScoreKind, Sensitivity};
use crate::federation::{AeConfig, LrSchedule, RoundConfig, RunOptions};
use crate::nn::{Activation, MlpConfig, OptimizerKind, OutputHead};
use crate::{Error, Result};

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub dataset: DatasetConfig,
    pub partition: PartitionConfig,
    pub poison: PoisonConfig,
    pub federation: FederationConfig,
    pub detection: DetectionConfig,
    pub reference: ReferenceConfig,
    pub eval: EvalConfig,
    pub output_dir: String,
    pub seed: u64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum DatasetConfig {
    Synthetic {
        k: usize,
        per_class: usize,
        d_in: usize,
        class_sep: f64,
        std: f64,
    },
    Mnist {
        images_path: String,
        labels_path: String,
        subset_n: usize,
    },
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum PartitionConfig {
    Iid,
    Dirichlet { alpha: f64 },
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PoisonConfig {
    pub kind: PoisonKindConfig,
    pub malicious_clients: Vec<usize>,
    pub poison_fraction: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum PoisonKindConfig {
    None,
    LabelFlip { target_class: usize },
    FeatureNoise { std: f64 },
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FederationConfig {
    #[serde(rename = "N")]
    pub n: usize,
    #[serde(rename = "R")]
    pub r: usize,
    pub lr: f64,
    pub bs: usize,
    pub local_epochs: usize,
    pub lr_schedule: LrSchedule,
    #[serde(default = "default_optimizer")]
    pub optimizer: OptimizerKind,
}

fn default_optimizer() -> OptimizerKind {
    OptimizerKind::Adam
}

/// A sensitivity factor: a number, or the string `"disabled"` to switch the
/// channel off.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SfValue(pub Option<f64>);

impl Serialize for SfValue {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        match self.0 {
            Some(v) => serializer.serialize_f64(v),
            None => serializer.serialize_str("disabled"),
        }
    }
}

impl<'de> Deserialize<'de> for SfValue {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        struct SfVisitor;
        impl<'de> Visitor<'de> for SfVisitor {
            type Value = SfValue;
            fn expecting(&self, f: &mut std::fmt::Formatter) -> std::fmt::Result {
                f.write_str("a non-negative number or the string \"disabled\"")
            }
            fn visit_f64<E: de::Error>(self, v: f64) -> std::result::Result<SfValue, E> {
                Ok(SfValue(Some(v)))
            }
            fn visit_u64<E: de::Error>(self, v: u64) -> std::result::Result<SfValue, E> {
                Ok(SfValue(Some(v as f64)))
            }
            fn visit_i64<E: de::Error>(self, v: i64) -> std::result::Result<SfValue, E> {
                Ok(SfValue(Some(v as f64)))
            }
            fn visit_str<E: de::Error>(self, v: &str) -> std::result::Result<SfValue, E> {
                if v == "disabled" {
                    Ok(SfValue(None))
                } else {
                    Err(E::custom(format!("expected a number or \"disabled\", got \"{v}\"")))
                }
            }
        }
        deserializer.deserialize_any(SfVisitor)
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SensConfig {
    pub alpha: SfValue,
    pub beta: SfValue,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DetectionConfig {
    /// Single factor applied to both channels (mutually exclusive with `sens`).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sf: Option<SfValue>,
    /// Independent per-channel factors; overrides `sf` when present.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sens: Option<SensConfig>,
    pub combine: CombineRule,
    pub ae_mode: AeMode,
    pub grad_score: GradScoreKind,
    pub robust_stats: bool,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ReferenceConfig {
    pub m: usize,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EvalConfig {
    pub test_fraction: f64,
}

impl DetectionConfig {
    /// Resolves `sens`/`sf` into per-channel factors.
    pub fn sensitivity(&self) -> Result<Sensitivity> {
        let sens = match (&self.sens, &self.sf) {
            (Some(s), _) => Sensitivity { alpha: s.alpha.0, beta: s.beta.0 },
            (None, Some(sf)) => Sensitivity { alpha: sf.0, beta: sf.0 },
            (None, None) => {
                return Err(Error::config("detection.sf", "set either `sf` or `sens`"));
            }
        };
        sens.validate()?;
        Ok(sens)
    }
}

impl ExperimentConfig {
    /// Parses and validates a JSON config.
    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: ExperimentConfig =
            serde_json::from_str(text).map_err(|e| Error::ConfigParse(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    /// Field-by-field validation with spec-style field paths in messages.
    pub fn validate(&self) -> Result<()> {
        match &self.dataset {
            DatasetConfig::Synthetic { k, per_class, d_in, class_sep, std } => {
                if *k < 2 {
                    return Err(Error::config("dataset.synthetic.k", "need at least 2 classes"));
                }
                if *per_class == 0 {
                    return Err(Error::config("dataset.synthetic.per_class", "must be positive"));
                }
                if *d_in == 0 {
                    return Err(Error::config("dataset.synthetic.d_in", "must be positive"));
                }
                if !(0.0..=1.0).contains(class_sep) {
                    return Err(Error::config("dataset.synthetic.class_sep", "must lie in [0, 1]"));
                }
                if !(*std > 0.0) {
                    return Err(Error::config("dataset.synthetic.std", "must be positive"));
                }
            }
            DatasetConfig::Mnist { subset_n, .. } => {
                if *subset_n == 0 {
                    return Err(Error::config("dataset.mnist.subset_n", "must be positive"));
                }
            }
        }
        if let PartitionConfig::Dirichlet { alpha } = self.partition {
            if !(alpha > 0.0) {
                return Err(Error::config("partition.dirichlet.alpha", "must be positive"));
            }
        }
        if self.federation.n == 0 {
            return Err(Error::config("federation.N", "need at least one client"));
        }
        if self.federation.r == 0 {
            return Err(Error::config("federation.R", "need at least one round"));
        }
        if !(self.federation.lr > 0.0) {
            return Err(Error::config("federation.lr", "must be positive"));
        }
        if self.federation.bs == 0 {
            return Err(Error::config("federation.bs", "must be positive"));
        }
        if !(0.0..=1.0).contains(&self.poison.poison_fraction) {
            return Err(Error::config("poison.poison_fraction", "must lie in [0, 1]"));
        }
        if let Some(&bad) = self.poison.malicious_clients.iter().find(|&&c| c >= self.federation.n) {
            return Err(Error::config(
                "poison.malicious_clients",
                format!("client {bad} out of range (N = {})", self.federation.n),
            ));
        }
        if let PoisonKindConfig::FeatureNoise { std } = self.poison.kind {
            if std < 0.0 {
                return Err(Error::config("poison.kind.feature_noise.std", "must be non-negative"));
            }
        }
        self.detection.sensitivity()?;
        if self.reference.m == 0 {
            return Err(Error::config("reference.m", "must be positive"));
        }
        if !(0.0..=1.0).contains(&self.eval.test_fraction) {
            return Err(Error::config("eval.test_fraction", "must lie in [0, 1]"));
        }
        Ok(())
    }

    /// The canonical desk-scale experiment the acceptance suite runs:
    /// two synthetic blobs, ten clients with three full-label-flip attackers,
    /// twenty rounds.
    pub fn canonical() -> Self {
        Self {
            dataset: DatasetConfig::Synthetic {
                k: 2,
                per_class: 300,
                d_in: 16,
                class_sep: 0.8,
                std: 0.1,
            },
            partition: PartitionConfig::Iid,
            poison: PoisonConfig {
                kind: PoisonKindConfig::LabelFlip { target_class: 0 },
                malicious_clients: vec![0, 1, 2],
                poison_fraction: 1.0,
            },
            federation: FederationConfig {
                n: 10,
                r: 20,
                lr: 0.001,
                bs: 64,
                local_epochs: 1,
                lr_schedule: LrSchedule::Constant,
                optimizer: OptimizerKind::Adam,
            },
            detection: DetectionConfig {
                // 3 of 10 clients are malicious; a 30% cluster caps its own
                // population z-score at sqrt(0.7/0.3) ~ 1.53, so factors
                // above that can never fire on this attack. 1.0 flags it
                // while keeping clean rounds quiet.
                sf: Some(SfValue(Some(1.0))),
                sens: None,
                combine: CombineRule::Or,
                ae_mode: AeMode::ServerRef,
                grad_score: GradScoreKind::Deviation,
                robust_stats: false,
            },
            reference: ReferenceConfig { m: 256 },
            eval: EvalConfig { test_fraction: 0.5 },
            output_dir: "out".to_string(),
            seed: 42,
        }
    }

    /// Classifier architecture plus run options derived from this config and
    /// the dataset dimensions.
    pub fn build_options(&self, d_in: usize, k: usize) -> Result<RunOptions> {
        let hidden = if d_in >= 256 { 128 } else { 32 };
        let model = MlpConfig::new(vec![d_in, hidden, k], Activation::Relu, OutputHead::SoftmaxLogits)?;
        Ok(RunOptions {
            round: RoundConfig {
                n_clients: self.federation.n,
                rounds: self.federation.r,
                lr: self.federation.lr,
                bs: self.federation.bs,
                local_epochs: self.federation.local_epochs,
                sens: self.detection.sensitivity()?,
                lr_schedule: self.federation.lr_schedule,
                optimizer: self.federation.optimizer,
                seed: self.seed,
            },
            detection: DetectionSettings {
                combine: self.detection.combine,
                grad_score: self.detection.grad_score,
                ae_mode: self.detection.ae_mode,
                robust_stats: self.detection.robust_stats,
            },
            ae: AeConfig::default_for(d_in),
            model,
        })
    }
}
