use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{nearest_centroid, sq_dist, ClusterModel, Dataset};
use crate::error::{Error, Result};
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LloydConfig {
    pub max_iter: usize,
    /// Largest centroid displacement still counted as movement.
    pub tol: f64,
}

impl Default for LloydConfig {
    fn default() -> Self {
        LloydConfig { max_iter: 300, tol: 1e-9 }
    }
}

/// k-means++ seeding: the first centre uniformly at random, every further
/// centre with probability proportional to its squared distance from the
/// nearest centre chosen so far.
pub fn kmeanspp_init<T: Scalar>(data: &Dataset<T>, k: usize, seed: u64) -> Result<Dataset<T>> {
    if k == 0 {
        return Err(Error::InvalidParameter("k must be positive".into()));
    }
    let distinct = data.distinct_count();
    if k > distinct {
        return Err(Error::TooFewDistinctPoints { k, distinct });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = data.len();
    let mut centroids = Dataset::zeros(k, data.dim());
    let first = rng.gen_range(0..n);
    centroids.row_mut(0).copy_from_slice(data.row(first));

    let mut weights: Vec<f64> = data.rows().map(|p| sq_dist(p, data.row(first)).as_f64()).collect();
    for c in 1..k {
        let total: f64 = weights.iter().sum();
        let target = rng.gen::<f64>() * total;
        let mut acc = 0.0;
        let mut pick = None;
        for (i, &w) in weights.iter().enumerate() {
            if w <= 0.0 {
                continue;
            }
            acc += w;
            pick = Some(i);
            if acc > target {
                break;
            }
        }
        let pick = pick.expect("k <= distinct points leaves positive weight");
        centroids.row_mut(c).copy_from_slice(data.row(pick));
        for (w, p) in weights.iter_mut().zip(data.rows()) {
            *w = w.min(sq_dist(p, data.row(pick)).as_f64());
        }
    }
    Ok(centroids)
}

fn assign<T: Scalar>(data: &Dataset<T>, centroids: &Dataset<T>) -> Vec<usize> {
    data.rows().map(|p| nearest_centroid(p, centroids).0).collect()
}

fn cost<T: Scalar>(data: &Dataset<T>, centroids: &Dataset<T>, labels: &[usize]) -> T {
    let sum: T = data.rows().zip(labels).map(|(p, &l)| sq_dist(p, centroids.row(l))).sum();
    sum / T::from_count(data.len().max(1))
}

fn means<T: Scalar>(data: &Dataset<T>, labels: &[usize], k: usize) -> (Dataset<T>, Vec<usize>) {
    let mut sums = Dataset::zeros(k, data.dim());
    let mut counts = vec![0usize; k];
    for (p, &l) in data.rows().zip(labels) {
        counts[l] += 1;
        for (s, &x) in sums.row_mut(l).iter_mut().zip(p) {
            *s = *s + x;
        }
    }
    for (c, &count) in counts.iter().enumerate() {
        if count > 0 {
            let n = T::from_count(count);
            for s in sums.row_mut(c) {
                *s = *s / n;
            }
        }
    }
    (sums, counts)
}

/// Recomputes centroids as cluster means, moving any empty cluster onto the
/// point farthest from its own centroid.
fn update<T: Scalar>(data: &Dataset<T>, labels: &mut [usize], k: usize) -> Dataset<T> {
    let (mut centroids, mut counts) = means(data, labels, k);
    while let Some(empty) = counts.iter().position(|&c| c == 0) {
        let far = (0..data.len())
            .filter(|&i| counts[labels[i]] > 1)
            .map(|i| (i, sq_dist(data.row(i), centroids.row(labels[i]))))
            .fold(None, |best: Option<(usize, T)>, (i, d)| match best {
                Some((_, bd)) if bd >= d => best,
                _ => Some((i, d)),
            });
        let Some((point, _)) = far else { break };
        labels[point] = empty;
        (centroids, counts) = means(data, labels, k);
    }
    centroids
}

/// Lloyd iterations from the given centres until the assignment stops
/// changing or `max_iter` is reached. The cost never increases between
/// iterations.
pub fn lloyd<T: Scalar>(data: &Dataset<T>, init: &Dataset<T>, config: &LloydConfig) -> ClusterModel<T> {
    let k = init.len();
    let mut centroids = init.clone();
    let mut labels = assign(data, &centroids);
    let mut cost_trace = vec![cost(data, &centroids, &labels)];
    let mut iterations = 0;
    let mut converged = false;
    let tol = T::of(config.tol);

    while iterations < config.max_iter {
        iterations += 1;
        let updated = update(data, &mut labels, k);
        let shift = (0..k)
            .map(|c| sq_dist(centroids.row(c), updated.row(c)).sqrt())
            .fold(T::zero(), T::max);
        centroids = updated;
        let next = assign(data, &centroids);
        let c = cost(data, &centroids, &next);
        let prev = *cost_trace.last().expect("seeded");
        debug_assert!(
            c <= prev + prev.abs() * T::of(1e-9) + T::epsilon(),
            "Lloyd cost increased from {prev} to {c}"
        );
        cost_trace.push(c);
        let stable = next == labels;
        labels = next;
        if stable {
            converged = true;
            break;
        }
        if shift < tol {
            // Centres have settled; refresh them against the last assignment.
            centroids = update(data, &mut labels, k);
            converged = true;
            break;
        }
    }
    if !converged {
        centroids = update(data, &mut labels, k);
    }
    debug_assert!(centroids_are_means(data, &centroids, &labels), "centroid differs from its cluster mean");
    let final_cost = cost(data, &centroids, &labels);
    ClusterModel {
        k,
        centroids,
        labels,
        cost: final_cost,
        mean_silhouette: None,
        iterations,
        converged,
        cost_trace,
    }
}

/// True when every non-empty cluster's centre is the mean of its members.
pub fn centroids_are_means<T: Scalar>(data: &Dataset<T>, centroids: &Dataset<T>, labels: &[usize]) -> bool {
    let k = centroids.len();
    let mut sums = vec![0.0f64; k * data.dim()];
    let mut counts = vec![0usize; k];
    for (p, &l) in data.rows().zip(labels) {
        counts[l] += 1;
        for (s, &x) in sums[l * data.dim()..(l + 1) * data.dim()].iter_mut().zip(p) {
            *s += x.as_f64();
        }
    }
    let tol = (T::epsilon().as_f64() * 64.0).max(1e-12);
    (0..k).filter(|&c| counts[c] > 0).all(|c| {
        centroids.row(c).iter().zip(&sums[c * data.dim()..(c + 1) * data.dim()]).all(|(&m, &s)| {
            let mean = s / counts[c] as f64;
            (m.as_f64() - mean).abs() <= tol * (1.0 + mean.abs())
        })
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn line(xs: &[f64]) -> Dataset<f64> {
        Dataset::new(1, xs.to_vec()).unwrap()
    }

    #[test]
    fn identical_points_single_centre() {
        let d = line(&[0.3, 0.3, 0.3]);
        let c = kmeanspp_init(&d, 1, 9).unwrap();
        assert_eq!(c.row(0), &[0.3]);
        assert!(matches!(kmeanspp_init(&d, 2, 9), Err(Error::TooFewDistinctPoints { k: 2, distinct: 1 })));
    }

    #[test]
    fn seeding_is_deterministic() {
        let d = line(&[0.0, 0.1, 0.5, 0.9, 1.3, 2.0, 7.0]);
        assert_eq!(kmeanspp_init(&d, 3, 11).unwrap(), kmeanspp_init(&d, 3, 11).unwrap());
    }

    #[test]
    fn seeding_picks_distinct_points() {
        let d = line(&[1.0, 1.0, 1.0, 1.0, 2.0, 3.0]);
        for seed in 0..200 {
            let c = kmeanspp_init(&d, 3, seed).unwrap();
            assert_eq!(c.distinct_count(), 3);
        }
    }

    #[test]
    fn three_points_two_clusters() {
        // Partitions of {0, 0.1, 2.0} into two groups:
        //   {0},{0.1,2.0}: SSE = 2 * 0.95^2 = 1.805
        //   {0,0.1},{2.0}: SSE = 2 * 0.05^2 = 0.005   <- optimum
        //   {0,2.0},{0.1}: SSE = 2 * 1.0^2  = 2.0
        let d = line(&[0.0, 0.1, 2.0]);
        let m = lloyd(&d, &line(&[0.0, 2.0]), &LloydConfig::default());
        assert_eq!(m.labels, vec![0, 0, 1]);
        assert!((m.centroids.row(0)[0] - 0.05).abs() < 1e-15);
        assert_eq!(m.centroids.row(1), &[2.0]);
        assert!((m.cost - 0.005 / 3.0).abs() < 1e-15);
        assert!(m.converged);
    }

    #[test]
    fn fixed_point_converges_immediately() {
        let d = line(&[1.0, 1.0, 5.0]);
        let m = lloyd(&d, &line(&[1.0, 5.0]), &LloydConfig::default());
        assert_eq!(m.iterations, 1);
        assert_eq!(m.cost, 0.0);
    }

    #[test]
    fn empty_cluster_is_reseeded() {
        // Third centre starts far away and captures nothing.
        let d = line(&[0.0, 0.1, 0.2, 5.0, 5.1]);
        let m = lloyd(&d, &line(&[0.1, 5.0, 100.0]), &LloydConfig::default());
        assert!(m.cluster_sizes().iter().all(|&s| s > 0));
        assert!(m.cost_trace.windows(2).all(|w| w[1] <= w[0]));
    }
}
