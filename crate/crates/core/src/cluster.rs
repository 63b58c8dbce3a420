//! Representative-day selection by k-medoids.
//!
//! Squared Euclidean distance on equal-length feature vectors (typically the
//! concatenated hourly price and demand profile of one day). Initial medoids are
//! drawn with k-means++ style seeding from a ChaCha stream, then improved by PAM
//! swaps until no swap lowers the total distance.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[derive(Debug, thiserror::Error, PartialEq)]
pub enum ClusterError {
    #[error("no series to cluster")]
    EmptySeries,
    #[error("k = {k} exceeds the number of series ({n})")]
    KExceedsN { k: usize, n: usize },
    #[error("k must be at least 1")]
    ZeroK,
    #[error("series {index} has {len} features, expected {expected}")]
    RaggedFeatures {
        index: usize,
        len: usize,
        expected: usize,
    },
}

#[derive(Clone, Debug, PartialEq)]
pub struct Clustering {
    /// Indices of the representative series, ascending.
    pub medoids: Vec<usize>,
    /// Cluster (position in `medoids`) of each input series.
    pub assignments: Vec<usize>,
    /// Cluster size fractions, summing to one.
    pub weights: Vec<f64>,
    /// Sum of distances to the assigned medoid.
    pub cost: f64,
}

pub fn squared_distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

pub fn cluster_representatives(
    series: &[Vec<f64>],
    k: usize,
    seed: u64,
) -> Result<Clustering, ClusterError> {
    let n = series.len();
    if n == 0 {
        return Err(ClusterError::EmptySeries);
    }
    if k == 0 {
        return Err(ClusterError::ZeroK);
    }
    if k > n {
        return Err(ClusterError::KExceedsN { k, n });
    }
    let dim = series[0].len();
    for (index, s) in series.iter().enumerate() {
        if s.len() != dim {
            return Err(ClusterError::RaggedFeatures {
                index,
                len: s.len(),
                expected: dim,
            });
        }
    }
    let dist: Vec<Vec<f64>> = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| squared_distance(&series[i], &series[j]))
                .collect()
        })
        .collect();

    let mut medoids = seed_medoids(&dist, k, seed);
    let mut cost = total_cost(&dist, &medoids);
    loop {
        let mut best: Option<(usize, usize, f64)> = None;
        for slot in 0..k {
            for cand in 0..n {
                if medoids.contains(&cand) {
                    continue;
                }
                let old = medoids[slot];
                medoids[slot] = cand;
                let c = total_cost(&dist, &medoids);
                medoids[slot] = old;
                if c < best.map_or(cost, |b| b.2) - 1e-12 * cost.max(1.0) {
                    best = Some((slot, cand, c));
                }
            }
        }
        match best {
            Some((slot, cand, c)) => {
                medoids[slot] = cand;
                cost = c;
            }
            None => break,
        }
    }
    medoids.sort_unstable();
    let assignments: Vec<usize> = (0..n).map(|i| nearest(&dist[i], &medoids)).collect();
    let mut counts = vec![0usize; k];
    for &a in &assignments {
        counts[a] += 1;
    }
    let weights = counts.iter().map(|&c| c as f64 / n as f64).collect();
    let cost = (0..n).map(|i| dist[i][medoids[assignments[i]]]).sum();
    Ok(Clustering {
        medoids,
        assignments,
        weights,
        cost,
    })
}

fn nearest(row: &[f64], medoids: &[usize]) -> usize {
    let mut best = 0;
    for (c, &m) in medoids.iter().enumerate() {
        if row[m] < row[medoids[best]] {
            best = c;
        }
    }
    best
}

fn total_cost(dist: &[Vec<f64>], medoids: &[usize]) -> f64 {
    dist.iter()
        .map(|row| {
            medoids
                .iter()
                .map(|&m| row[m])
                .fold(f64::INFINITY, f64::min)
        })
        .sum()
}

fn seed_medoids(dist: &[Vec<f64>], k: usize, seed: u64) -> Vec<usize> {
    let n = dist.len();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut medoids = vec![rng.random_range(0..n)];
    while medoids.len() < k {
        let weights: Vec<f64> = (0..n)
            .map(|i| {
                if medoids.contains(&i) {
                    0.0
                } else {
                    medoids
                        .iter()
                        .map(|&m| dist[i][m])
                        .fold(f64::INFINITY, f64::min)
                }
            })
            .collect();
        let total: f64 = weights.iter().sum();
        let pick = if total > 0.0 {
            let mut target = rng.random::<f64>() * total;
            let mut chosen = None;
            for (i, &w) in weights.iter().enumerate() {
                if w > 0.0 {
                    chosen = Some(i);
                    if target < w {
                        break;
                    }
                    target -= w;
                }
            }
            chosen.unwrap()
        } else {
            (0..n).find(|i| !medoids.contains(i)).unwrap()
        };
        medoids.push(pick);
    }
    medoids
}
