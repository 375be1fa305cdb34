//! Reference-dataset selection (the server's clean sample).

use rand::seq::SliceRandom;

use crate::data::dataset::Dataset;
use crate::seeds;
use crate::{Error, Result};

/// Samples `m` points without replacement, stratified by class when `m >= k`.
/// The caller is responsible for drawing from data that is known clean
/// (in the experiment pipeline the reference is taken from the held-out test
/// split before any poisoning). Selected indices are returned in ascending
/// order, so `m == n` yields the whole dataset unchanged.
pub fn select_reference(dataset: &Dataset, m: usize, seed: u64) -> Result<Dataset> {
    let n = dataset.n();
    if m > n {
        return Err(Error::InsufficientData { context: "select_reference", needed: m, available: n });
    }
    if m == n {
        let all: Vec<usize> = (0..n).collect();
        return Ok(dataset.subset(&all));
    }
    let mut rng = seeds::rng(seed, &[seeds::stream::REFERENCE]);
    let k = dataset.k();
    let mut chosen: Vec<usize> = Vec::with_capacity(m);
    if m >= k {
        // Per-class quota: m/k each, remainder to the lowest class ids.
        let mut by_class = dataset.indices_by_class();
        for c in by_class.iter_mut() {
            c.shuffle(&mut rng);
        }
        let base = m / k;
        let rem = m % k;
        let mut leftovers: Vec<usize> = Vec::new();
        for (class, indices) in by_class.iter().enumerate() {
            let quota = base + usize::from(class < rem);
            let take = quota.min(indices.len());
            chosen.extend_from_slice(&indices[..take]);
            leftovers.extend_from_slice(&indices[take..]);
        }
        // Classes short of their quota push the shortfall onto a uniform draw.
        if chosen.len() < m {
            leftovers.shuffle(&mut rng);
            let need = m - chosen.len();
            chosen.extend_from_slice(&leftovers[..need]);
        }
    } else {
        let mut all: Vec<usize> = (0..n).collect();
        all.shuffle(&mut rng);
        chosen.extend_from_slice(&all[..m]);
    }
    chosen.sort_unstable();
    Ok(dataset.subset(&chosen))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::synthetic::gen_synthetic;

    #[test]
    fn full_selection_preserves_the_dataset() {
        let ds = gen_synthetic(2, 6, 3, 0.5, 0.1, 1).unwrap();
        let sel = select_reference(&ds, ds.n(), 7).unwrap();
        assert_eq!(sel, ds);
    }

    #[test]
    fn m_equals_k_takes_exactly_one_per_class() {
        let ds = gen_synthetic(4, 10, 3, 0.5, 0.1, 1).unwrap();
        let sel = select_reference(&ds, 4, 7).unwrap();
        let mut classes: Vec<usize> = sel.labels().to_vec();
        classes.sort_unstable();
        assert_eq!(classes, vec![0, 1, 2, 3]);
    }

    #[test]
    fn fixed_seed_repeats_the_selection() {
        let ds = gen_synthetic(3, 12, 3, 0.5, 0.1, 1).unwrap();
        let a = select_reference(&ds, 9, 42).unwrap();
        let b = select_reference(&ds, 9, 42).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn oversized_request_is_an_error() {
        let ds = gen_synthetic(2, 3, 3, 0.5, 0.1, 1).unwrap();
        assert!(select_reference(&ds, 7, 0).is_err());
    }
}
