//! Series smoothing for the figure-backing outputs.

/// Centered moving average with windows that shrink at the edges; the output
/// has the same length as the input. For even windows the extra slot extends
/// to the right.
pub fn moving_average(series: &[f64], window: usize) -> Vec<f64> {
    assert!(window >= 1, "window must be positive");
    let n = series.len();
    let half_lo = (window - 1) / 2;
    let half_hi = window / 2;
    (0..n)
        .map(|i| {
            let lo = i.saturating_sub(half_lo);
            let hi = (i + half_hi).min(n.saturating_sub(1));
            let slice = &series[lo..=hi];
            slice.iter().sum::<f64>() / slice.len() as f64
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn window_one_is_identity() {
        let s = [3.0, -1.0, 2.5];
        assert_eq!(moving_average(&s, 1), s.to_vec());
    }

    #[test]
    fn constant_series_is_unchanged() {
        let s = [0.7; 9];
        for (out, orig) in moving_average(&s, 5).iter().zip(&s) {
            assert!((out - orig).abs() < 1e-12);
        }
    }

    #[test]
    fn spike_spreads_over_the_window() {
        let s = [0.0, 0.0, 3.0, 0.0, 0.0];
        assert_eq!(moving_average(&s, 3), vec![0.0, 1.0, 1.0, 1.0, 0.0]);
    }

    #[test]
    fn output_stays_inside_window_bounds() {
        use rand::Rng;
        let mut rng = crate::seeds::rng(55, &[0]);
        let s: Vec<f64> = (0..50).map(|_| rng.random_range(-10.0..10.0)).collect();
        for window in [1, 2, 3, 5, 8] {
            let out = moving_average(&s, window);
            assert_eq!(out.len(), s.len());
            let lo = s.iter().cloned().fold(f64::INFINITY, f64::min);
            let hi = s.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
            assert!(out.iter().all(|&v| v >= lo - 1e-12 && v <= hi + 1e-12));
        }
    }
}
