use serde::Serialize;

use super::Archetype;
use crate::cluster::ClusterModel;
use crate::scalar::Scalar;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ArchetypeLabels {
    /// Archetype of each cluster index.
    pub by_cluster: Vec<Archetype>,
    /// True when the four named archetypes were each assigned once.
    pub named: bool,
}

impl ArchetypeLabels {
    pub fn of(&self, cluster: usize) -> Archetype {
        self.by_cluster[cluster]
    }

    /// Display order: named archetypes in ascending activity, then variants.
    pub fn ordered(&self) -> Vec<Archetype> {
        let mut all = self.by_cluster.clone();
        all.sort();
        all
    }
}

/// Names clusters by snapping each centroid's two Boolean coordinates to the
/// nearest corner of the unit square. Only a four-cluster model whose
/// centroids land on four different corners is named; anything else falls
/// back to `Variant(i)`, ranked by ascending total activity of the cluster.
///
/// `cluster_activity[c]` is the summed activity of the users in cluster `c`.
pub fn label_clusters<T: Scalar>(model: &ClusterModel<T>, cluster_activity: &[u64]) -> ArchetypeLabels {
    let half = T::of(0.5);
    if model.k == 4 {
        let corners: Vec<Archetype> = model
            .centroids
            .rows()
            .map(|c| Archetype::from_corner(c[0] >= half, c[1] >= half))
            .collect();
        let mut seen = corners.clone();
        seen.sort();
        seen.dedup();
        if seen.len() == 4 {
            return ArchetypeLabels { by_cluster: corners, named: true };
        }
    }
    let mut order: Vec<usize> = (0..model.k).collect();
    order.sort_by_key(|&c| (cluster_activity.get(c).copied().unwrap_or(0), c));
    let mut by_cluster = vec![Archetype::Variant(0); model.k];
    for (rank, c) in order.into_iter().enumerate() {
        by_cluster[c] = Archetype::Variant(rank);
    }
    ArchetypeLabels { by_cluster, named: false }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cluster::Dataset;

    fn model(centroids: &[[f64; 3]]) -> ClusterModel<f64> {
        ClusterModel {
            k: centroids.len(),
            centroids: Dataset::from_rows(centroids).unwrap(),
            labels: vec![],
            cost: 0.0,
            mean_silhouette: None,
            iterations: 1,
            converged: true,
            cost_trace: vec![0.0],
        }
    }

    #[test]
    fn exact_corners_are_named() {
        let m = model(&[[1.0, 1.0, 0.3], [0.0, 0.0, 0.02], [1.0, 0.0, 0.2], [0.0, 1.0, 0.9]]);
        let l = label_clusters(&m, &[0, 0, 0, 0]);
        assert!(l.named);
        assert_eq!(
            l.by_cluster,
            vec![Archetype::Permanent, Archetype::NonRecurring, Archetype::Frequent, Archetype::Sporadic]
        );
    }

    #[test]
    fn near_corners_snap() {
        let m = model(&[[0.02, 0.1, 0.0], [0.0, 0.97, 0.0], [0.9, 0.2, 0.0], [0.8, 0.6, 0.0]]);
        assert!(label_clusters(&m, &[1, 2, 3, 4]).named);
    }

    #[test]
    fn six_clusters_are_variants() {
        let m = model(&[[0.0; 3], [1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [1.0, 1.0, 0.0], [0.0, 0.0, 0.5], [1.0, 0.0, 0.5]]);
        let l = label_clusters(&m, &[50, 10, 30, 60, 20, 40]);
        assert!(!l.named);
        let ranks: Vec<_> = l.by_cluster.iter().map(|a| match a {
            Archetype::Variant(i) => *i,
            _ => panic!("expected variant"),
        }).collect();
        assert_eq!(ranks, vec![4, 0, 2, 5, 1, 3]);
    }

    #[test]
    fn corner_collision_falls_back() {
        let m = model(&[[0.0, 0.0, 0.0], [0.1, 0.0, 0.5], [1.0, 0.0, 0.0], [1.0, 1.0, 0.0]]);
        let l = label_clusters(&m, &[4, 3, 2, 1]);
        assert!(!l.named);
        assert_eq!(l.by_cluster[3], Archetype::Variant(0));
    }
}
