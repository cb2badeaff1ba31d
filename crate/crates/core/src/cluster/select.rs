use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use super::{kmeanspp_init, lloyd, mean_silhouette, sq_dist, ClusterModel, Dataset, LloydConfig};
use crate::derive_seed;
use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Silhouettes closer than this are treated as equal; the smaller K wins.
const TIE_EPS: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct SelectConfig {
    pub k_min: usize,
    pub k_max: usize,
    pub seed: u64,
    /// k-means++ restarts per K; the lowest-cost run is kept.
    pub restarts: usize,
    pub lloyd: LloydConfig,
}

impl Default for SelectConfig {
    fn default() -> Self {
        SelectConfig { k_min: 2, k_max: 10, seed: 42, restarts: 10, lloyd: LloydConfig::default() }
    }
}

impl SelectConfig {
    pub fn with_seed(seed: u64) -> Self {
        SelectConfig { seed, ..Default::default() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct KSelection<T> {
    /// Mean silhouette of the kept model for each K.
    pub per_k: BTreeMap<usize, T>,
    pub per_k_cost: BTreeMap<usize, T>,
    pub k_star: usize,
    pub model: ClusterModel<T>,
    /// Upper end of the searched range after clamping to the distinct-point count.
    pub k_max_used: usize,
    pub warnings: Vec<String>,
}

fn clamp_range<T: Scalar>(data: &Dataset<T>, k_min: usize, k_max: usize) -> Result<(usize, Vec<String>)> {
    if k_min < 2 || k_min > k_max {
        return Err(Error::InvalidParameter(format!("K range {k_min}..={k_max} must satisfy 2 <= k_min <= k_max")));
    }
    let distinct = data.distinct_count();
    if distinct < 2 {
        return Err(Error::TooFewDistinctPoints { k: 2, distinct });
    }
    let mut warnings = Vec::new();
    let mut k_max_used = k_max;
    if distinct < k_max {
        k_max_used = distinct;
        warnings.push(format!("only {distinct} distinct points; K search clamped to {k_min}..={distinct}"));
    }
    if k_min > k_max_used {
        return Err(Error::TooFewDistinctPoints { k: k_min, distinct });
    }
    Ok((k_max_used, warnings))
}

fn pick_k_star<T: Scalar>(per_k: &BTreeMap<usize, T>) -> usize {
    let mut best: Option<(usize, T)> = None;
    for (&k, &s) in per_k {
        match best {
            Some((_, bs)) if s <= bs + T::of(TIE_EPS) => {}
            _ => best = Some((k, s)),
        }
    }
    best.expect("non-empty K range").0
}

/// Runs K-Means for every K in range and keeps the K with the highest mean
/// silhouette. Output depends only on the data, seed and parameters.
pub fn select_k<T: Scalar>(data: &Dataset<T>, config: &SelectConfig) -> Result<KSelection<T>> {
    let (k_max, warnings) = clamp_range(data, config.k_min, config.k_max)?;
    let restarts = config.restarts.max(1);
    let runs: Vec<(usize, ClusterModel<T>, T)> = (config.k_min..=k_max)
        .into_par_iter()
        .map(|k| {
            let mut best: Option<ClusterModel<T>> = None;
            for r in 0..restarts {
                let init = kmeanspp_init(data, k, derive_seed(config.seed, &[k as u64, r as u64]))?;
                let model = lloyd(data, &init, &config.lloyd);
                if best.as_ref().is_none_or(|b| model.cost < b.cost) {
                    best = Some(model);
                }
            }
            let mut model = best.expect("at least one restart");
            let s = mean_silhouette(data, &model.labels)?;
            model.mean_silhouette = Some(s);
            Ok((k, model, s))
        })
        .collect::<Result<_>>()?;

    let per_k: BTreeMap<usize, T> = runs.iter().map(|(k, _, s)| (*k, *s)).collect();
    let per_k_cost = runs.iter().map(|(k, m, _)| (*k, m.cost)).collect();
    let k_star = pick_k_star(&per_k);
    let model = runs.into_iter().find(|(k, _, _)| *k == k_star).expect("k_star was evaluated").1;
    Ok(KSelection { per_k, per_k_cost, k_star, model, k_max_used: k_max, warnings })
}

/// Assigns every point to one of K clusters uniformly at random and scores
/// the result exactly like [`select_k`]. A floor for judging real structure.
pub fn random_baseline<T: Scalar>(data: &Dataset<T>, seed: u64, k_min: usize, k_max: usize) -> Result<KSelection<T>> {
    let (k_max, warnings) = clamp_range(data, k_min, k_max)?;
    let runs: Vec<(usize, ClusterModel<T>, T)> = (k_min..=k_max)
        .into_par_iter()
        .map(|k| {
            let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(seed, &[k as u64]));
            let mut labels: Vec<usize> = (0..data.len()).map(|_| rng.gen_range(0..k)).collect();
            while labels.iter().all(|&l| l == labels[0]) {
                labels = (0..data.len()).map(|_| rng.gen_range(0..k)).collect();
            }
            let s = mean_silhouette(data, &labels)?;
            let model = labelled_model(data, labels, k, s);
            Ok((k, model, s))
        })
        .collect::<Result<_>>()?;
    let per_k: BTreeMap<usize, T> = runs.iter().map(|(k, _, s)| (*k, *s)).collect();
    let per_k_cost = runs.iter().map(|(k, m, _)| (*k, m.cost)).collect();
    let k_star = pick_k_star(&per_k);
    let model = runs.into_iter().find(|(k, _, _)| *k == k_star).expect("k_star was evaluated").1;
    Ok(KSelection { per_k, per_k_cost, k_star, model, k_max_used: k_max, warnings })
}

fn labelled_model<T: Scalar>(data: &Dataset<T>, labels: Vec<usize>, k: usize, s: T) -> ClusterModel<T> {
    let mut centroids = Dataset::zeros(k, data.dim());
    let mut counts = vec![0usize; k];
    for (p, &l) in data.rows().zip(&labels) {
        counts[l] += 1;
        for (c, &x) in centroids.row_mut(l).iter_mut().zip(p) {
            *c = *c + x;
        }
    }
    for (c, &n) in counts.iter().enumerate() {
        if n > 0 {
            for x in centroids.row_mut(c) {
                *x = *x / T::from_count(n);
            }
        }
    }
    let cost: T = data.rows().zip(&labels).map(|(p, &l)| sq_dist(p, centroids.row(l))).sum::<T>()
        / T::from_count(data.len());
    ClusterModel {
        k,
        centroids,
        labels,
        cost,
        mean_silhouette: Some(s),
        iterations: 0,
        converged: false,
        cost_trace: vec![cost],
    }
}
