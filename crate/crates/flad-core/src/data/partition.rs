//! Client partitioning: IID equal splits and Dirichlet class skew.

use rand::seq::SliceRandom;
use rand_distr::{Distribution, Gamma};

use crate::data::dataset::Dataset;
use crate::seeds;
use crate::{Error, Result};

/// How samples are spread across clients.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PartitionScheme {
    Iid,
    /// Per-class client proportions drawn from `Dirichlet(alpha)`; smaller
    /// alpha means more single-class skew per client.
    Dirichlet { alpha: f64 },
}

/// Disjoint per-client index lists into a parent dataset. The union may be a
/// strict subset (held-out data stays outside); every list is non-empty.
#[derive(Debug, Clone, PartialEq)]
pub struct ClientPartition {
    assignments: Vec<Vec<usize>>,
}

impl ClientPartition {
    pub fn n_clients(&self) -> usize {
        self.assignments.len()
    }

    pub fn client(&self, c: usize) -> &[usize] {
        &self.assignments[c]
    }

    pub fn assignments(&self) -> &[Vec<usize>] {
        &self.assignments
    }

    pub fn sizes(&self) -> Vec<usize> {
        self.assignments.iter().map(Vec::len).collect()
    }
}

/// Partitions the whole dataset across `n_clients`.
pub fn partition(dataset: &Dataset, n_clients: usize, scheme: PartitionScheme, seed: u64) -> Result<ClientPartition> {
    let pool: Vec<usize> = (0..dataset.n()).collect();
    partition_pool(dataset, &pool, n_clients, scheme, seed)
}

/// Partitions the index subset `pool` (e.g. the training split) across clients.
pub fn partition_pool(
    dataset: &Dataset,
    pool: &[usize],
    n_clients: usize,
    scheme: PartitionScheme,
    seed: u64,
) -> Result<ClientPartition> {
    if n_clients == 0 {
        return Err(Error::config("N", "need at least one client"));
    }
    if pool.is_empty() || pool.len() < n_clients {
        return Err(Error::InfeasiblePartition { samples: pool.len(), clients: n_clients });
    }
    if n_clients == 1 {
        return Ok(ClientPartition { assignments: vec![pool.to_vec()] });
    }
    let mut rng = seeds::rng(seed, &[seeds::stream::PARTITION]);
    match scheme {
        PartitionScheme::Iid => {
            let mut shuffled = pool.to_vec();
            shuffled.shuffle(&mut rng);
            let base = shuffled.len() / n_clients;
            let rem = shuffled.len() % n_clients;
            let mut assignments = Vec::with_capacity(n_clients);
            let mut at = 0;
            for c in 0..n_clients {
                let take = base + usize::from(c < rem);
                assignments.push(shuffled[at..at + take].to_vec());
                at += take;
            }
            Ok(ClientPartition { assignments })
        }
        PartitionScheme::Dirichlet { alpha } => {
            if !(alpha > 0.0) {
                return Err(Error::config("alpha", "Dirichlet concentration must be positive"));
            }
            // Group the pool by class, then apportion each class by a fresh
            // Dirichlet draw. Redraw if any client ends up empty.
            let mut by_class: Vec<Vec<usize>> = vec![Vec::new(); dataset.k()];
            for &i in pool {
                by_class[dataset.labels()[i]].push(i);
            }
            let gamma = Gamma::new(alpha, 1.0).map_err(|_| Error::config("alpha", "invalid Dirichlet parameter"))?;
            for _attempt in 0..100 {
                let mut assignments: Vec<Vec<usize>> = vec![Vec::new(); n_clients];
                for class_indices in by_class.iter().filter(|c| !c.is_empty()) {
                    let mut shuffled = class_indices.clone();
                    shuffled.shuffle(&mut rng);
                    // Dirichlet sample via normalized Gamma draws.
                    let mut w: Vec<f64> = (0..n_clients).map(|_| gamma.sample(&mut rng).max(1e-300)).collect();
                    let total: f64 = w.iter().sum();
                    for v in &mut w {
                        *v /= total;
                    }
                    // Largest-remainder apportionment of the class count.
                    let m = shuffled.len();
                    let quotas: Vec<f64> = w.iter().map(|&p| p * m as f64).collect();
                    let mut counts: Vec<usize> = quotas.iter().map(|&q| q.floor() as usize).collect();
                    let mut short = m - counts.iter().sum::<usize>();
                    let mut order: Vec<usize> = (0..n_clients).collect();
                    order.sort_by(|&a, &b| {
                        let ra = quotas[a] - quotas[a].floor();
                        let rb = quotas[b] - quotas[b].floor();
                        rb.partial_cmp(&ra).unwrap().then(a.cmp(&b))
                    });
                    for &c in order.iter().cycle().take(n_clients * 2) {
                        if short == 0 {
                            break;
                        }
                        counts[c] += 1;
                        short -= 1;
                    }
                    let mut at = 0;
                    for (c, &cnt) in counts.iter().enumerate() {
                        assignments[c].extend_from_slice(&shuffled[at..at + cnt]);
                        at += cnt;
                    }
                }
                if assignments.iter().all(|a| !a.is_empty()) {
                    return Ok(ClientPartition { assignments });
                }
            }
            Err(Error::InfeasiblePartition { samples: pool.len(), clients: n_clients })
        }
    }
}

/// Stratified train/test split: per class, a seeded shuffle sends
/// `round(test_fraction * class size)` indices to the test side.
/// Returns `(train, test)`, both ascending.
pub fn holdout_split(dataset: &Dataset, test_fraction: f64, seed: u64) -> Result<(Vec<usize>, Vec<usize>)> {
    if !(0.0..=1.0).contains(&test_fraction) {
        return Err(Error::config("test_fraction", "must lie in [0, 1]"));
    }
    let mut rng = seeds::rng(seed, &[seeds::stream::SPLIT]);
    let mut train = Vec::new();
    let mut test = Vec::new();
    for class_indices in dataset.indices_by_class() {
        let mut shuffled = class_indices;
        shuffled.shuffle(&mut rng);
        let n_test = (test_fraction * shuffled.len() as f64).round() as usize;
        test.extend_from_slice(&shuffled[..n_test]);
        train.extend_from_slice(&shuffled[n_test..]);
    }
    train.sort_unstable();
    test.sort_unstable();
    Ok((train, test))
}
