use std::collections::BTreeMap;

use rayon::prelude::*;

use super::{dist, Dataset};
use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Distinct (point, label) pairs with multiplicities. Feature data is heavily
/// duplicated, so silhouettes are evaluated per distinct pair.
struct Grouped<'a, T> {
    reps: Vec<(&'a [T], usize, usize)>,
    index_of_point: Vec<usize>,
    cluster_sizes: Vec<usize>,
}

fn group<'a, T: Scalar>(data: &'a Dataset<T>, labels: &[usize]) -> Result<Grouped<'a, T>> {
    if labels.len() != data.len() {
        return Err(Error::InvalidParameter(format!(
            "{} labels for {} points",
            labels.len(),
            data.len()
        )));
    }
    let k = labels.iter().max().map_or(0, |&m| m + 1);
    let mut cluster_sizes = vec![0usize; k];
    for &l in labels {
        cluster_sizes[l] += 1;
    }
    if cluster_sizes.iter().filter(|&&s| s > 0).count() < 2 {
        return Err(Error::SilhouetteUndefined);
    }
    let mut slots: BTreeMap<(usize, Vec<u64>), usize> = BTreeMap::new();
    let mut reps: Vec<(&[T], usize, usize)> = Vec::new();
    let mut index_of_point = Vec::with_capacity(labels.len());
    for (p, &l) in data.rows().zip(labels) {
        let key = (l, p.iter().map(|x| x.as_f64().to_bits()).collect());
        let slot = *slots.entry(key).or_insert_with(|| {
            reps.push((p, l, 0));
            reps.len() - 1
        });
        reps[slot].2 += 1;
        index_of_point.push(slot);
    }
    Ok(Grouped { reps, index_of_point, cluster_sizes })
}

fn group_scores<T: Scalar>(g: &Grouped<'_, T>) -> Vec<T> {
    let k = g.cluster_sizes.len();
    g.reps
        .par_iter()
        .map(|&(p, label, _)| {
            if g.cluster_sizes[label] <= 1 {
                return T::zero();
            }
            let mut sums = vec![T::zero(); k];
            for &(q, lq, w) in &g.reps {
                sums[lq] = sums[lq] + T::from_count(w) * dist(p, q);
            }
            let a = sums[label] / T::from_count(g.cluster_sizes[label] - 1);
            let b = (0..k)
                .filter(|&c| c != label && g.cluster_sizes[c] > 0)
                .map(|c| sums[c] / T::from_count(g.cluster_sizes[c]))
                .fold(T::infinity(), T::min);
            let denom = a.max(b);
            if denom > T::zero() {
                (b - a) / denom
            } else {
                T::zero()
            }
        })
        .collect()
}

/// Per-point silhouette `(b - a) / max(a, b)`, where `a` is the mean distance
/// to the other members of the point's cluster and `b` the smallest mean
/// distance to the members of another cluster. Singleton clusters score 0.
pub fn silhouette_samples<T: Scalar>(data: &Dataset<T>, labels: &[usize]) -> Result<Vec<T>> {
    let g = group(data, labels)?;
    let scores = group_scores(&g);
    Ok(g.index_of_point.iter().map(|&slot| scores[slot]).collect())
}

/// Average silhouette over all points.
pub fn mean_silhouette<T: Scalar>(data: &Dataset<T>, labels: &[usize]) -> Result<T> {
    let g = group(data, labels)?;
    let scores = group_scores(&g);
    let total: T = g.reps.iter().zip(&scores).map(|(&(_, _, w), &s)| T::from_count(w) * s).sum();
    Ok(total / T::from_count(data.len()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn three_point_example() {
        let d = Dataset::<f64>::new(1, vec![0.0, 0.1, 2.0]).unwrap();
        let s = mean_silhouette(&d, &[0, 0, 1]).unwrap();
        let want = ((2.0 - 0.1) / 2.0 + (1.9 - 0.1) / 1.9 + 0.0) / 3.0;
        assert!((s - want).abs() < 1e-12);
        assert!((s - 0.6324).abs() < 1e-4);
    }

    #[test]
    fn two_singletons_score_zero() {
        let d = Dataset::new(1, vec![0.0, 1.0]).unwrap();
        assert_eq!(mean_silhouette(&d, &[0, 1]).unwrap(), 0.0);
    }

    #[test]
    fn separated_duplicate_groups_score_one() {
        let d = Dataset::new(2, vec![0.0, 0.0, 0.0, 0.0, 9.0, 9.0, 9.0, 9.0]).unwrap();
        assert_eq!(mean_silhouette(&d, &[0, 0, 1, 1]).unwrap(), 1.0);
    }

    #[test]
    fn single_cluster_is_undefined() {
        let d = Dataset::new(1, vec![0.0, 1.0, 2.0]).unwrap();
        assert!(matches!(mean_silhouette(&d, &[0, 0, 0]), Err(Error::SilhouetteUndefined)));
        assert!(matches!(mean_silhouette(&d, &[2, 2, 2]), Err(Error::SilhouetteUndefined)));
    }

    #[test]
    fn gaps_in_label_range_are_ignored() {
        let d = Dataset::<f64>::new(1, vec![0.0, 0.1, 2.0]).unwrap();
        let a = mean_silhouette(&d, &[0, 0, 1]).unwrap();
        let b = mean_silhouette(&d, &[0, 0, 3]).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn samples_agree_with_mean() {
        let d = Dataset::new(1, vec![0.0, 0.1, 0.1, 2.0, 2.2]).unwrap();
        let labels = [0, 0, 0, 1, 1];
        let samples = silhouette_samples(&d, &labels).unwrap();
        let mean: f64 = samples.iter().sum::<f64>() / 5.0;
        assert!((mean - mean_silhouette(&d, &labels).unwrap()).abs() < 1e-15);
        assert_eq!(samples[1], samples[2]);
    }
}
