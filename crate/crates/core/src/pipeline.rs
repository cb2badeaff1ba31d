//! End-to-end analysis: events → series → features → clustering →
//! archetypes → instance type, plus trend and evolution.

use rayon::prelude::*;
use serde::Serialize;

use crate::archetype::{
    activity_composition, archetype_stats, classify_instance, label_clusters, trend_slope, ArchetypeLabels,
    ArchetypeStats, Composition, InstanceType, TrendFit, DEFAULT_SUSTAINABLE_THRESHOLD,
};
use crate::cluster::{pca_project, random_baseline, select_k, Dataset, KSelection, Projection, SelectConfig};
use crate::derive_seed;
use crate::error::{Error, Result};
use crate::features::{extract_features, FeatureRow, SeriesKind, DEFAULT_PEAK_THRESHOLD};
use crate::ingest::{ActivityEvent, InstanceWindow};
use crate::scalar::Scalar;
use crate::series::{build_user_series, truncate_events, Granularity, SeriesSet, UserActivitySeries};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct EvolutionConfig {
    pub step: usize,
    pub horizon: usize,
}

impl Default for EvolutionConfig {
    fn default() -> Self {
        EvolutionConfig { step: 6, horizon: 36 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AnalysisConfig {
    pub granularity: Granularity,
    /// Series whose features are clustered; labels, K* and the instance type
    /// all come from this clustering.
    pub cluster_on: SeriesKind,
    pub peak_threshold: usize,
    pub select: SelectConfig,
    pub sustainable_threshold: f64,
    pub projection: bool,
    pub baseline: bool,
    pub evolution: Option<EvolutionConfig>,
}

impl Default for AnalysisConfig {
    fn default() -> Self {
        AnalysisConfig {
            granularity: Granularity::Month,
            cluster_on: SeriesKind::Answers,
            peak_threshold: DEFAULT_PEAK_THRESHOLD,
            select: SelectConfig::default(),
            sustainable_threshold: DEFAULT_SUSTAINABLE_THRESHOLD,
            projection: true,
            baseline: false,
            evolution: None,
        }
    }
}

/// Feature points for one series kind, in user-id order.
pub fn feature_points<T: Scalar>(set: &SeriesSet, kind: SeriesKind, peak_threshold: usize) -> (Vec<String>, Dataset<T>) {
    let mut ids = Vec::with_capacity(set.user_count());
    let mut data = Vec::with_capacity(set.user_count() * 3);
    for (id, s) in &set.users {
        ids.push(id.clone());
        data.extend(extract_features::<T>(kind.of(s), peak_threshold).to_array());
    }
    let points = Dataset::new(3, data).expect("features are finite and 3-dimensional");
    (ids, points)
}

/// Feature rows for both series of every user.
pub fn feature_table<T: Scalar>(set: &SeriesSet, peak_threshold: usize) -> Vec<FeatureRow<T>> {
    set.users
        .values()
        .flat_map(|s| {
            [SeriesKind::Questions, SeriesKind::Answers].map(|kind| FeatureRow {
                user_id: s.user_id.clone(),
                kind,
                features: extract_features(kind.of(s), peak_threshold),
            })
        })
        .collect()
}

/// Clustering, naming and classification of one series set.
#[derive(Debug, Clone)]
pub struct Clustered<T> {
    pub user_ids: Vec<String>,
    pub points: Dataset<T>,
    pub selection: KSelection<T>,
    pub labels: ArchetypeLabels,
    pub composition: Composition,
    pub instance_type: Result<InstanceType, String>,
}

impl<T: Scalar> Clustered<T> {
    pub fn series<'a>(&self, set: &'a SeriesSet) -> Vec<&'a UserActivitySeries> {
        self.user_ids.iter().map(|id| &set.users[id]).collect()
    }
}

pub fn cluster_series<T: Scalar>(set: &SeriesSet, config: &AnalysisConfig, seed: u64) -> Result<Clustered<T>> {
    let (user_ids, points) = feature_points::<T>(set, config.cluster_on, config.peak_threshold);
    if points.is_empty() {
        return Err(Error::NoEvents);
    }
    let select = SelectConfig { seed, ..config.select.clone() };
    let selection = select_k(&points, &select)?;
    let series: Vec<&UserActivitySeries> = user_ids.iter().map(|id| &set.users[id]).collect();
    let mut cluster_activity = vec![0u64; selection.model.k];
    for (s, &c) in series.iter().zip(&selection.model.labels) {
        cluster_activity[c] += s.total();
    }
    let labels = label_clusters(&selection.model, &cluster_activity);
    let composition = activity_composition(&series, &selection.model.labels, &labels);
    let instance_type =
        classify_instance(selection.k_star, &composition, config.sustainable_threshold).map_err(|e| e.to_string());
    Ok(Clustered { user_ids, points, selection, labels, composition, instance_type })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum CheckpointOutcome {
    Classified(InstanceType),
    InsufficientData,
    Unclassified,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Checkpoint {
    /// Months since the start of the instance window.
    pub cutoff_month: usize,
    pub outcome: CheckpointOutcome,
    pub k_star: Option<usize>,
}

/// Classifies every prefix of `step`, `2·step`, … months (up to `horizon`
/// and the window length) from scratch, each with a seed derived from the
/// base seed and the cutoff.
pub fn evolution<T: Scalar>(
    events: &[ActivityEvent],
    window: &InstanceWindow,
    config: &AnalysisConfig,
    evolution: &EvolutionConfig,
) -> Result<Vec<Checkpoint>> {
    if evolution.step == 0 {
        return Err(Error::InvalidParameter("evolution step must be positive".into()));
    }
    if window.month_count() < evolution.step {
        return Err(Error::InvalidParameter(format!(
            "instance spans {} months, fewer than the {}-month evolution step",
            window.month_count(),
            evolution.step
        )));
    }
    let last = evolution.horizon.min(window.month_count());
    let cutoffs: Vec<usize> = (evolution.step..=last).step_by(evolution.step).collect();
    cutoffs
        .into_par_iter()
        .map(|cutoff| {
            let prefix = window.prefix(cutoff)?;
            let truncated = truncate_events(events, prefix.end_month());
            let set = build_user_series(&truncated, &prefix, config.granularity);
            let (_, points) = feature_points::<T>(&set, config.cluster_on, config.peak_threshold);
            if points.is_empty() || points.distinct_count() < config.select.k_max {
                return Ok(Checkpoint { cutoff_month: cutoff, outcome: CheckpointOutcome::InsufficientData, k_star: None });
            }
            let run = cluster_series::<T>(&set, config, derive_seed(config.select.seed, &[cutoff as u64]))?;
            let outcome = match run.instance_type {
                Ok(t) => CheckpointOutcome::Classified(t),
                Err(_) => CheckpointOutcome::Unclassified,
            };
            Ok(Checkpoint { cutoff_month: cutoff, outcome, k_star: Some(run.selection.k_star) })
        })
        .collect()
}

#[derive(Debug, Clone)]
pub struct Analysis<T> {
    pub series: SeriesSet,
    pub clustered: Clustered<T>,
    pub stats: Vec<ArchetypeStats>,
    pub trend: TrendFit<T>,
    pub projection: Option<Projection<T>>,
    pub baseline: Option<KSelection<T>>,
    pub evolution: Vec<Checkpoint>,
    pub event_count: usize,
    pub cluster_on: SeriesKind,
    pub warnings: Vec<String>,
}

impl<T: Scalar> Analysis<T> {
    pub fn instance_type(&self) -> Option<InstanceType> {
        self.clustered.instance_type.as_ref().ok().copied()
    }
}

/// Runs the whole pipeline over `events` observed in `window`.
pub fn analyze<T: Scalar>(events: &[ActivityEvent], window: &InstanceWindow, config: &AnalysisConfig) -> Result<Analysis<T>> {
    if events.is_empty() {
        return Err(Error::NoEvents);
    }
    let series = build_user_series(events, window, config.granularity);
    if series.is_empty() {
        return Err(Error::NoEvents);
    }
    let mut warnings = Vec::new();
    if series.dropped > 0 {
        warnings.push(format!("{} events outside the observation window were dropped", series.dropped));
    }
    let clustered = cluster_series::<T>(&series, config, config.select.seed)?;
    warnings.extend(clustered.selection.warnings.iter().cloned());

    let members = clustered.series(&series);
    let stats = archetype_stats(&members, &clustered.selection.model.labels, &clustered.labels);

    let totals: Vec<T> = series.totals().totals.iter().map(|&v| T::of(v as f64)).collect();
    let trend = trend_slope(&totals);
    if trend.degenerate {
        warnings.push("total activity is constant; trend slope reported as 0".into());
    }

    let projection = if config.projection && clustered.points.len() >= 2 {
        let p = pca_project(&clustered.points, 2)?;
        if p.degenerate {
            warnings.push("feature points have zero variance; PCA projection is all zeros".into());
        }
        Some(p)
    } else {
        None
    };

    let baseline = if config.baseline {
        Some(random_baseline(
            &clustered.points,
            derive_seed(config.select.seed, &[u64::MAX]),
            config.select.k_min,
            config.select.k_max,
        )?)
    } else {
        None
    };

    let evolution = match &config.evolution {
        Some(evo) => match evolution::<T>(events, window, config, evo) {
            Ok(track) => track,
            Err(Error::InvalidParameter(msg)) => {
                warnings.push(format!("evolution skipped: {msg}"));
                Vec::new()
            }
            Err(e) => return Err(e),
        },
        None => Vec::new(),
    };

    Ok(Analysis {
        event_count: events.len() - series.dropped as usize,
        series,
        clustered,
        stats,
        trend,
        projection,
        baseline,
        evolution,
        cluster_on: config.cluster_on,
        warnings,
    })
}
