//! K-Means with k-means++ seeding, silhouette-driven choice of K, a random
//! labelling baseline and a PCA projection for inspecting separation.

mod kmeans;
mod pca;
mod select;
mod silhouette;

use std::cmp::Ordering;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::scalar::Scalar;

pub use kmeans::{centroids_are_means, kmeanspp_init, lloyd, LloydConfig};
pub use pca::{pca_project, symmetric_eigen, Projection};
pub use select::{random_baseline, select_k, KSelection, SelectConfig};
pub use silhouette::{mean_silhouette, silhouette_samples};

/// Row-major matrix of points.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Dataset<T> {
    dim: usize,
    data: Vec<T>,
}

impl<T: Scalar> Dataset<T> {
    pub fn new(dim: usize, data: Vec<T>) -> Result<Self> {
        if dim == 0 || !data.len().is_multiple_of(dim) {
            return Err(Error::InvalidParameter(format!(
                "{} values cannot be split into rows of {dim}",
                data.len()
            )));
        }
        if data.iter().any(|x| !x.is_finite()) {
            return Err(Error::InvalidParameter("non-finite coordinate".into()));
        }
        Ok(Dataset { dim, data })
    }

    pub fn from_rows<R: AsRef<[T]>>(rows: &[R]) -> Result<Self> {
        let dim = rows.first().map(|r| r.as_ref().len()).unwrap_or(1);
        let mut data = Vec::with_capacity(rows.len() * dim);
        for row in rows {
            if row.as_ref().len() != dim {
                return Err(Error::InvalidParameter("ragged rows".into()));
            }
            data.extend_from_slice(row.as_ref());
        }
        Dataset::new(dim, data)
    }

    pub(crate) fn zeros(rows: usize, dim: usize) -> Self {
        Dataset { dim, data: vec![T::zero(); rows * dim] }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.data.len() / self.dim
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn row(&self, i: usize) -> &[T] {
        &self.data[i * self.dim..(i + 1) * self.dim]
    }

    pub(crate) fn row_mut(&mut self, i: usize) -> &mut [T] {
        &mut self.data[i * self.dim..(i + 1) * self.dim]
    }

    pub fn rows(&self) -> impl ExactSizeIterator<Item = &[T]> + '_ {
        self.data.chunks_exact(self.dim)
    }

    pub fn as_slice(&self) -> &[T] {
        &self.data
    }

    /// Same points in the given order.
    pub fn permuted(&self, order: &[usize]) -> Self {
        let mut data = Vec::with_capacity(self.data.len());
        for &i in order {
            data.extend_from_slice(self.row(i));
        }
        Dataset { dim: self.dim, data }
    }

    /// Number of distinct rows.
    pub fn distinct_count(&self) -> usize {
        let mut rows: Vec<&[T]> = self.rows().collect();
        rows.sort_unstable_by(|a, b| cmp_rows(a, b));
        rows.dedup_by(|a, b| cmp_rows(a, b) == Ordering::Equal);
        rows.len()
    }
}

pub(crate) fn cmp_rows<T: Scalar>(a: &[T], b: &[T]) -> Ordering {
    a.iter()
        .zip(b)
        .map(|(x, y)| x.partial_cmp(y).unwrap_or(Ordering::Equal))
        .find(|o| o.is_ne())
        .unwrap_or(Ordering::Equal)
}

pub fn sq_dist<T: Scalar>(a: &[T], b: &[T]) -> T {
    a.iter().zip(b).map(|(&x, &y)| (x - y) * (x - y)).sum()
}

pub fn dist<T: Scalar>(a: &[T], b: &[T]) -> T {
    sq_dist(a, b).sqrt()
}

/// A K-Means partition.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ClusterModel<T> {
    pub k: usize,
    pub centroids: Dataset<T>,
    pub labels: Vec<usize>,
    /// Mean squared distance of points to their centroid.
    pub cost: T,
    /// Filled in by model selection.
    pub mean_silhouette: Option<T>,
    pub iterations: usize,
    pub converged: bool,
    /// Cost after each Lloyd iteration, starting with the seeded assignment.
    pub cost_trace: Vec<T>,
}

impl<T: Scalar> ClusterModel<T> {
    pub fn cluster_sizes(&self) -> Vec<usize> {
        let mut sizes = vec![0; self.k];
        for &l in &self.labels {
            sizes[l] += 1;
        }
        sizes
    }

    /// Index of the point closest to each centroid.
    pub fn nearest_members(&self, data: &Dataset<T>) -> Vec<Option<usize>> {
        let mut best: Vec<Option<(usize, T)>> = vec![None; self.k];
        for (i, (p, &l)) in data.rows().zip(&self.labels).enumerate() {
            let d = sq_dist(p, self.centroids.row(l));
            if best[l].is_none_or(|(_, bd)| d < bd) {
                best[l] = Some((i, d));
            }
        }
        best.into_iter().map(|b| b.map(|(i, _)| i)).collect()
    }
}

/// Index of the nearest centroid; ties go to the lowest index.
pub fn nearest_centroid<T: Scalar>(point: &[T], centroids: &Dataset<T>) -> (usize, T) {
    let mut best = (0, sq_dist(point, centroids.row(0)));
    for c in 1..centroids.len() {
        let d = sq_dist(point, centroids.row(c));
        if d < best.1 {
            best = (c, d);
        }
    }
    best
}
