//! Activity archetypes of question-and-answer communities.
//!
//! Events from a Stack Exchange dump (or a plain CSV) are binned into
//! per-user monthly series, summarised by three Boolean-ish features,
//! clustered with K-Means, and the clusters named after the four activity
//! archetypes. The mix of archetypes classifies the community as emerging,
//! transitioning or sustainable.

pub mod archetype;
pub mod cluster;
pub mod error;
pub mod features;
pub mod ingest;
pub mod pipeline;
pub mod report;
pub mod scalar;
pub mod series;
pub mod synth;

pub use error::{Error, Result};
pub use scalar::Scalar;

pub type FeatureVectorF64 = features::FeatureVector<f64>;
pub type FeatureVectorF32 = features::FeatureVector<f32>;
pub type DatasetF64 = cluster::Dataset<f64>;
pub type DatasetF32 = cluster::Dataset<f32>;
pub type ClusterModelF64 = cluster::ClusterModel<f64>;
pub type ClusterModelF32 = cluster::ClusterModel<f32>;
pub type KSelectionF64 = cluster::KSelection<f64>;
pub type KSelectionF32 = cluster::KSelection<f32>;
pub type ProjectionF64 = cluster::Projection<f64>;
pub type ProjectionF32 = cluster::Projection<f32>;
pub type AnalysisF64 = pipeline::Analysis<f64>;
pub type AnalysisF32 = pipeline::Analysis<f32>;

/// Mixes a base seed with a path of integers into an independent seed.
pub fn derive_seed(base: u64, parts: &[u64]) -> u64 {
    fn splitmix(mut z: u64) -> u64 {
        z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
        z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
        z ^ (z >> 31)
    }
    parts.iter().fold(splitmix(base), |acc, &p| splitmix(acc ^ splitmix(p)))
}
