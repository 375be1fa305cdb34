//! Confusion counts over (client, round) detection decisions.

use serde::Serialize;

use crate::detection::AnomalyVerdict;
use crate::{Error, Result};

/// Detection confusion matrix against ground-truth malicious flags.
/// For a full run the four counts sum to `R * N`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
pub struct ConfusionCounts {
    pub tp: u64,
    pub fp: u64,
    pub tn: u64,
    #[serde(rename = "fn")]
    pub false_neg: u64,
}

impl ConfusionCounts {
    pub fn total(&self) -> u64 {
        self.tp + self.fp + self.tn + self.false_neg
    }

    /// True-positive rate; 1.0 when no malicious client-rounds exist.
    pub fn detection_rate(&self) -> f64 {
        if self.tp + self.false_neg == 0 {
            1.0
        } else {
            self.tp as f64 / (self.tp + self.false_neg) as f64
        }
    }

    /// False-positive rate; 0.0 when no clean client-rounds exist.
    pub fn false_positive_rate(&self) -> f64 {
        if self.fp + self.tn == 0 {
            0.0
        } else {
            self.fp as f64 / (self.fp + self.tn) as f64
        }
    }
}

/// Tallies verdicts against per-client ground truth (indexed by client id).
pub fn confusion_counts(verdicts: &[AnomalyVerdict], malicious: &[bool]) -> Result<ConfusionCounts> {
    let mut counts = ConfusionCounts::default();
    for v in verdicts {
        let truth = *malicious
            .get(v.client_id)
            .ok_or_else(|| Error::shape("confusion_counts", format!("client < {}", malicious.len()), v.client_id.to_string()))?;
        match (truth, v.flagged) {
            (true, true) => counts.tp += 1,
            (true, false) => counts.false_neg += 1,
            (false, true) => counts.fp += 1,
            (false, false) => counts.tn += 1,
        }
    }
    Ok(counts)
}

/// Anomaly detection rate: flagged malicious client-rounds over all malicious
/// client-rounds.
pub fn detection_rate(verdicts: &[AnomalyVerdict], malicious: &[bool]) -> Result<f64> {
    Ok(confusion_counts(verdicts, malicious)?.detection_rate())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn verdict(client_id: usize, flagged: bool) -> AnomalyVerdict {
        AnomalyVerdict {
            client_id,
            round: 0,
            grad_score: 0.0,
            recon_score: 0.0,
            grad_flag: flagged,
            recon_flag: false,
            flagged,
        }
    }

    #[test]
    fn all_malicious_flagged_gives_rate_one() {
        let verdicts = vec![verdict(0, true), verdict(1, true), verdict(2, false)];
        let rate = detection_rate(&verdicts, &[true, true, false]).unwrap();
        assert_eq!(rate, 1.0);
    }

    #[test]
    fn none_flagged_gives_rate_zero() {
        let verdicts = vec![verdict(0, false), verdict(1, false)];
        assert_eq!(detection_rate(&verdicts, &[true, false]).unwrap(), 0.0);
    }

    #[test]
    fn two_of_three_malicious_flagged() {
        let verdicts = vec![verdict(0, true), verdict(1, true), verdict(2, false), verdict(3, false)];
        let rate = detection_rate(&verdicts, &[true, true, true, false]).unwrap();
        assert!((rate - 2.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn no_malicious_clients_defaults_to_one() {
        let verdicts = vec![verdict(0, false)];
        assert_eq!(detection_rate(&verdicts, &[false]).unwrap(), 1.0);
    }

    #[test]
    fn counts_partition_all_client_rounds() {
        let verdicts = vec![verdict(0, true), verdict(1, false), verdict(0, false), verdict(1, true)];
        let c = confusion_counts(&verdicts, &[true, false]).unwrap();
        assert_eq!(c.total(), 4);
        assert_eq!((c.tp, c.false_neg, c.fp, c.tn), (1, 1, 1, 1));
    }

    #[test]
    fn unknown_client_id_is_an_error() {
        let verdicts = vec![verdict(5, true)];
        assert!(detection_rate(&verdicts, &[false, false]).is_err());
    }
}
