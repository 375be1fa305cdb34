//! Property tests for the spec-level invariants.

use proptest::prelude::*;

use flad_core::detection::{detect_anom, flag_gradient_anomaly, population_stats, CombineRule, ReconBaseline, Sensitivity};
use flad_core::federation::aggregate;
use flad_core::metrics::{auc_pair_oracle, moving_average, roc_curve};
use flad_core::nn::ParamVector;

fn flagged_set(scores: &[f64], alpha: f64) -> Vec<bool> {
    let stats = population_stats(scores).unwrap();
    scores.iter().map(|&s| flag_gradient_anomaly(s, &stats, alpha)).collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    /// Raising alpha can only shrink the flagged set.
    #[test]
    fn flagged_set_is_non_increasing_in_alpha(
        scores in prop::collection::vec(0.0f64..100.0, 2..40),
        alpha1 in 0.0f64..4.0,
        delta in 0.0f64..4.0,
    ) {
        let alpha2 = alpha1 + delta;
        let low = flagged_set(&scores, alpha1);
        let high = flagged_set(&scores, alpha2);
        for (h, l) in high.iter().zip(&low) {
            prop_assert!(!h || *l, "flagged at alpha2 but not at alpha1");
        }
    }

    /// Scaling all scores by a positive constant leaves the flagged set
    /// unchanged (score and threshold scale together).
    #[test]
    fn flagged_set_is_scale_invariant(
        scores in prop::collection::vec(0.001f64..100.0, 2..40),
        alpha in 0.0f64..4.0,
        exponent in -20i32..20,
    ) {
        // Powers of two scale sums and square roots exactly.
        let c = 2.0f64.powi(exponent);
        let scaled: Vec<f64> = scores.iter().map(|s| s * c).collect();
        prop_assert_eq!(flagged_set(&scores, alpha), flagged_set(&scaled, alpha));
    }

    /// Trapezoidal AUC equals the pair-counting oracle, ties included.
    #[test]
    fn roc_auc_equals_pair_counting_oracle(
        raw in prop::collection::vec((0u8..6, any::<bool>()), 4..60),
    ) {
        let scores: Vec<f64> = raw.iter().map(|&(s, _)| s as f64 * 0.25).collect();
        let labels: Vec<bool> = raw.iter().map(|&(_, l)| l).collect();
        let pos = labels.iter().filter(|&&l| l).count();
        prop_assume!(pos > 0 && pos < labels.len());
        let curve = roc_curve(&scores, &labels).unwrap();
        let oracle = auc_pair_oracle(&scores, &labels).unwrap();
        prop_assert!((curve.auc - oracle).abs() < 1e-9);
        prop_assert!((0.0..=1.0).contains(&curve.auc));
    }

    /// Aggregation is the exact size-weighted mean, coordinate by coordinate.
    #[test]
    fn aggregate_matches_scalar_weighted_mean(
        deltas in prop::collection::vec(prop::collection::vec(-10.0f64..10.0, 3), 1..8),
        sizes_raw in prop::collection::vec(1usize..50, 8),
    ) {
        let sizes: Vec<usize> = sizes_raw[..deltas.len()].to_vec();
        let vectors: Vec<ParamVector> = deltas.iter().cloned().map(ParamVector::from_vec).collect();
        let agg = aggregate(&vectors, &sizes).unwrap();
        let total: f64 = sizes.iter().map(|&s| s as f64).sum();
        for j in 0..3 {
            let expected: f64 = deltas.iter().zip(&sizes).map(|(d, &s)| s as f64 * d[j]).sum::<f64>() / total;
            prop_assert!((agg.as_slice()[j] - expected).abs() <= 1e-12 * expected.abs().max(1.0));
        }
    }

    /// The verdict bit is exactly grad_flag OR recon_flag under the default rule.
    #[test]
    fn verdict_is_the_or_of_its_channels(
        scores in prop::collection::vec(0.0f64..10.0, 2..20),
        idx_raw in 0usize..20,
        recon in 0.0f64..1.0,
        alpha in 0.0f64..3.0,
        beta in 0.0f64..3.0,
    ) {
        let idx = idx_raw % scores.len();
        let base = ReconBaseline { mu_r: 0.3, sigma_r: 0.1 };
        let sens = Sensitivity { alpha: Some(alpha), beta: Some(beta) };
        let v = detect_anom(scores[idx], &scores, recon, &base, &sens, CombineRule::Or, false).unwrap();
        prop_assert_eq!(v.flagged, v.grad_flag || v.recon_flag);
    }

    /// Smoothing stays inside the data range and preserves length.
    #[test]
    fn moving_average_is_bounded_and_length_preserving(
        series in prop::collection::vec(-100.0f64..100.0, 1..50),
        window in 1usize..10,
    ) {
        let out = moving_average(&series, window);
        prop_assert_eq!(out.len(), series.len());
        let lo = series.iter().cloned().fold(f64::INFINITY, f64::min);
        let hi = series.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        for v in out {
            prop_assert!(v >= lo - 1e-9 && v <= hi + 1e-9);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    /// Partitions are disjoint, non-empty, and cover the pool, per scheme.
    #[test]
    fn partitions_are_disjoint_and_complete(
        seed in any::<u64>(),
        n_clients in 1usize..9,
        dirichlet in any::<bool>(),
    ) {
        use flad_core::data::{gen_synthetic, partition, PartitionScheme};
        let ds = gen_synthetic(3, 30, 4, 0.5, 0.1, 11).unwrap();
        let scheme = if dirichlet {
            PartitionScheme::Dirichlet { alpha: 0.4 }
        } else {
            PartitionScheme::Iid
        };
        let p = partition(&ds, n_clients, scheme, seed).unwrap();
        let mut seen = vec![false; ds.n()];
        for c in 0..p.n_clients() {
            prop_assert!(!p.client(c).is_empty());
            for &i in p.client(c) {
                prop_assert!(!seen[i]);
                seen[i] = true;
            }
        }
        prop_assert!(seen.iter().all(|&s| s));
    }

    /// Label flips stay inside malicious shards and always change the label.
    #[test]
    fn poison_masks_are_truthful(seed in any::<u64>(), fraction in 0.0f64..1.0) {
        use flad_core::data::{apply_poison, gen_synthetic, partition, PartitionScheme, PoisonKind, PoisonSpec};
        let ds = gen_synthetic(3, 20, 4, 0.5, 0.1, 13).unwrap();
        let p = partition(&ds, 5, PartitionScheme::Iid, 17).unwrap();
        let spec = PoisonSpec {
            kind: PoisonKind::LabelFlip { target_class: 1 },
            malicious_clients: vec![1, 3],
            poison_fraction: fraction,
        };
        let (out, mask) = apply_poison(&ds, &p, &spec, seed).unwrap();
        let allowed: std::collections::HashSet<usize> =
            p.client(1).iter().chain(p.client(3)).copied().collect();
        for i in 0..ds.n() {
            if mask.altered[i] {
                prop_assert!(allowed.contains(&i));
                prop_assert_ne!(out.labels()[i], ds.labels()[i]);
            } else {
                prop_assert_eq!(out.labels()[i], ds.labels()[i]);
            }
        }
    }
}
