//! ROC curves by threshold sweep and the pair-counting AUC oracle.

use crate::{Error, Result};

/// ROC curve points `(fpr, tpr)` from `(0, 0)` to `(1, 1)`, with the
/// trapezoidal area under it.
#[derive(Debug, Clone, PartialEq)]
pub struct RocCurve {
    pub points: Vec<(f64, f64)>,
    pub auc: f64,
}

fn check_labels(scores: &[f64], labels: &[bool]) -> Result<(usize, usize)> {
    if scores.len() != labels.len() {
        return Err(Error::shape("roc_curve", scores.len().to_string(), labels.len().to_string()));
    }
    let pos = labels.iter().filter(|&&l| l).count();
    let neg = labels.len() - pos;
    if pos == 0 || neg == 0 {
        return Err(Error::UndefinedRoc);
    }
    Ok((pos, neg))
}

/// Sweeps thresholds over the distinct score values in descending order,
/// folding ties into a single step. Scores may be infinite but not NaN.
pub fn roc_curve(scores: &[f64], labels: &[bool]) -> Result<RocCurve> {
    let (pos, neg) = check_labels(scores, labels)?;
    let mut order: Vec<usize> = (0..scores.len()).collect();
    order.sort_by(|&a, &b| scores[b].total_cmp(&scores[a]));
    let mut points = vec![(0.0, 0.0)];
    let mut tp = 0usize;
    let mut fp = 0usize;
    let mut i = 0;
    while i < order.len() {
        let threshold = scores[order[i]];
        while i < order.len() && scores[order[i]] == threshold {
            if labels[order[i]] {
                tp += 1;
            } else {
                fp += 1;
            }
            i += 1;
        }
        points.push((fp as f64 / neg as f64, tp as f64 / pos as f64));
    }
    let auc = points
        .windows(2)
        .map(|w| (w[1].0 - w[0].0) * (w[0].1 + w[1].1) / 2.0)
        .sum();
    Ok(RocCurve { points, auc })
}

/// Independent AUC oracle: fraction of correctly ordered (positive, negative)
/// pairs, counting ties as half.
pub fn auc_pair_oracle(scores: &[f64], labels: &[bool]) -> Result<f64> {
    let (pos, neg) = check_labels(scores, labels)?;
    let mut correct = 0.0f64;
    for (i, &li) in labels.iter().enumerate() {
        if !li {
            continue;
        }
        for (j, &lj) in labels.iter().enumerate() {
            if lj {
                continue;
            }
            if scores[i] > scores[j] {
                correct += 1.0;
            } else if scores[i] == scores[j] {
                correct += 0.5;
            }
        }
    }
    Ok(correct / (pos * neg) as f64)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn perfect_separation_has_auc_one() {
        let scores = [0.9, 0.8, 0.4, 0.1];
        let labels = [true, true, false, false];
        let roc = roc_curve(&scores, &labels).unwrap();
        assert_eq!(roc.auc, 1.0);
        assert_eq!(roc.points.first(), Some(&(0.0, 0.0)));
        assert_eq!(roc.points.last(), Some(&(1.0, 1.0)));
        assert_eq!(auc_pair_oracle(&scores, &labels).unwrap(), 1.0);
    }

    #[test]
    fn three_of_four_pairs_ordered_gives_auc_075() {
        let scores = [0.8, 0.3, 0.5, 0.1];
        let labels = [true, true, false, false];
        let roc = roc_curve(&scores, &labels).unwrap();
        assert!((roc.auc - 0.75).abs() < 1e-15);
    }

    #[test]
    fn label_inversion_flips_auc() {
        let scores = [0.8, 0.3, 0.5, 0.1, 0.45];
        let labels = [true, true, false, false, true];
        let inverted: Vec<bool> = labels.iter().map(|&l| !l).collect();
        let a = roc_curve(&scores, &labels).unwrap().auc;
        let b = roc_curve(&scores, &inverted).unwrap().auc;
        assert!((a + b - 1.0).abs() < 1e-12);
    }

    #[test]
    fn all_equal_scores_give_half() {
        let scores = [0.5; 6];
        let labels = [true, false, true, false, true, false];
        assert_eq!(auc_pair_oracle(&scores, &labels).unwrap(), 0.5);
        assert!((roc_curve(&scores, &labels).unwrap().auc - 0.5).abs() < 1e-15);
    }

    #[test]
    fn single_class_labels_are_undefined() {
        assert!(matches!(roc_curve(&[0.1, 0.2], &[true, true]), Err(Error::UndefinedRoc)));
        assert!(matches!(roc_curve(&[0.1, 0.2], &[false, false]), Err(Error::UndefinedRoc)));
    }

    #[test]
    fn curve_is_monotone_and_matches_oracle_under_heavy_ties() {
        use rand::Rng;
        let mut rng = crate::seeds::rng(77, &[0]);
        for case in 0..200 {
            let n = rng.random_range(4..40);
            // Draw from a small discrete set to force ties.
            let scores: Vec<f64> = (0..n).map(|_| (rng.random_range(0..5) as f64) / 4.0).collect();
            let labels: Vec<bool> = (0..n).map(|_| rng.random_bool(0.4)).collect();
            let pos = labels.iter().filter(|&&l| l).count();
            if pos == 0 || pos == n {
                continue;
            }
            let roc = roc_curve(&scores, &labels).unwrap();
            let oracle = auc_pair_oracle(&scores, &labels).unwrap();
            assert!((roc.auc - oracle).abs() < 1e-9, "case {case}: {} vs {oracle}", roc.auc);
            for w in roc.points.windows(2) {
                assert!(w[1].0 >= w[0].0 && w[1].1 >= w[0].1, "non-monotone curve");
            }
            assert!((0.0..=1.0).contains(&roc.auc));
        }
    }

    #[test]
    fn auc_is_invariant_under_strictly_increasing_transforms() {
        use rand::Rng;
        let mut rng = crate::seeds::rng(78, &[0]);
        let scores: Vec<f64> = (0..30).map(|_| rng.random_range(-3.0..3.0)).collect();
        let labels: Vec<bool> = (0..30).map(|i| i % 3 == 0).collect();
        let base = roc_curve(&scores, &labels).unwrap().auc;
        let exp: Vec<f64> = scores.iter().map(|s| s.exp()).collect();
        let affine: Vec<f64> = scores.iter().map(|s| 2.0 * s + 5.0).collect();
        let atan: Vec<f64> = scores.iter().map(|s| s.atan()).collect();
        for transformed in [exp, affine, atan] {
            let auc = roc_curve(&transformed, &labels).unwrap().auc;
            assert!((auc - base).abs() < 1e-12);
        }
    }
}
