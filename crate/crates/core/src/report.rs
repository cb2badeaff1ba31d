//! Serialized outputs: the instance report, the model export and the PCA
//! scatter plot. Floats are written with at most 12 significant digits so
//! identical runs produce byte-identical files.

use std::collections::BTreeMap;
use std::io::Write;

use serde::{Serialize, Serializer};

use crate::archetype::{Archetype, InstanceType};
use crate::error::Result;
use crate::pipeline::{Analysis, CheckpointOutcome};
use crate::scalar::Scalar;

pub const SIGNIFICANT_DIGITS: usize = 12;

pub fn round_sig(x: f64) -> f64 {
    if x == 0.0 || !x.is_finite() {
        return if x == 0.0 { 0.0 } else { x };
    }
    let r: f64 = format!("{:.*e}", SIGNIFICANT_DIGITS - 1, x).parse().expect("formatted float");
    if r == 0.0 {
        0.0
    } else {
        r
    }
}

pub fn format_float(x: f64) -> String {
    round_sig(x).to_string()
}

/// A float serialized with [`SIGNIFICANT_DIGITS`] significant digits.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct Num(pub f64);

impl Serialize for Num {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_f64(round_sig(self.0))
    }
}

fn num<T: Scalar>(x: T) -> Num {
    Num(x.as_f64())
}

#[derive(Debug, Clone, Serialize)]
pub struct WindowInfo {
    pub start: String,
    pub end: String,
    pub months: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct ArchetypeEntry {
    pub name: Archetype,
    pub users: usize,
    pub user_fraction: Num,
    pub median_questions: Option<Num>,
    pub median_answers: Option<Num>,
    pub median_active_months: Option<Num>,
    pub median_tenure_months: Option<Num>,
    pub question_fraction: Option<Num>,
    pub answer_fraction: Option<Num>,
}

#[derive(Debug, Clone, Serialize)]
pub struct EvolutionEntry {
    pub cutoff_month: usize,
    #[serde(rename = "type")]
    pub kind: String,
    pub k_star: Option<usize>,
}

/// Stable JSON report of one instance.
#[derive(Debug, Clone, Serialize)]
pub struct InstanceReport {
    pub instance_type: Option<InstanceType>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub classification_error: Option<String>,
    pub k_star: usize,
    pub silhouette: Num,
    pub per_k_silhouette: BTreeMap<usize, Num>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub baseline_per_k_silhouette: Option<BTreeMap<usize, Num>>,
    pub archetypes: Vec<ArchetypeEntry>,
    pub trend_slope: Num,
    pub evolution: Vec<EvolutionEntry>,
    pub window: WindowInfo,
    pub users: usize,
    pub events: usize,
    pub clustered_series: String,
    pub warnings: Vec<String>,
}

impl InstanceReport {
    pub fn from_analysis<T: Scalar>(a: &Analysis<T>) -> Self {
        let sel = &a.clustered.selection;
        let archetypes = a
            .stats
            .iter()
            .map(|s| ArchetypeEntry {
                name: s.name,
                users: s.users,
                user_fraction: Num(s.user_fraction),
                median_questions: s.median_questions.map(Num),
                median_answers: s.median_answers.map(Num),
                median_active_months: s.median_active_months.map(Num),
                median_tenure_months: s.median_tenure_months.map(Num),
                question_fraction: s.question_fraction.map(Num),
                answer_fraction: s.answer_fraction.map(Num),
            })
            .collect();
        let evolution = a
            .evolution
            .iter()
            .map(|c| EvolutionEntry {
                cutoff_month: c.cutoff_month,
                kind: match c.outcome {
                    CheckpointOutcome::Classified(t) => t.to_string(),
                    CheckpointOutcome::InsufficientData => "insufficient data".into(),
                    CheckpointOutcome::Unclassified => "unclassified".into(),
                },
                k_star: c.k_star,
            })
            .collect();
        let w = &a.series.window;
        InstanceReport {
            instance_type: a.instance_type(),
            classification_error: a.clustered.instance_type.as_ref().err().cloned(),
            k_star: sel.k_star,
            silhouette: num(sel.per_k[&sel.k_star]),
            per_k_silhouette: sel.per_k.iter().map(|(&k, &s)| (k, num(s))).collect(),
            baseline_per_k_silhouette: a.baseline.as_ref().map(|b| b.per_k.iter().map(|(&k, &s)| (k, num(s))).collect()),
            archetypes,
            trend_slope: num(a.trend.slope),
            evolution,
            window: WindowInfo {
                start: w.start_month().to_string(),
                end: w.end_month().to_string(),
                months: w.month_count(),
            },
            users: a.series.user_count(),
            events: a.event_count,
            clustered_series: a.cluster_on.as_str().to_string(),
            warnings: a.warnings.clone(),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes") + "\n"
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct PcaExport {
    pub coordinates: Vec<[Num; 2]>,
    pub explained_variance: Vec<Num>,
    pub components: Vec<Vec<Num>>,
}

/// Clustering export: K*, silhouettes, centroids, labels and PCA coordinates.
#[derive(Debug, Clone, Serialize)]
pub struct ModelExport {
    pub k_star: usize,
    pub per_k_silhouette: BTreeMap<usize, Num>,
    pub centroids: Vec<Vec<Num>>,
    pub cluster_names: Vec<Archetype>,
    pub user_ids: Vec<String>,
    pub labels: Vec<usize>,
    pub pca: Option<PcaExport>,
}

impl ModelExport {
    pub fn from_analysis<T: Scalar>(a: &Analysis<T>) -> Self {
        let sel = &a.clustered.selection;
        let pca = a.projection.as_ref().map(|p| PcaExport {
            coordinates: p.coordinates.rows().map(|r| [num(r[0]), num(r[1])]).collect(),
            explained_variance: p.explained_variance.iter().map(|&v| num(v)).collect(),
            components: p.components.rows().map(|r| r.iter().map(|&v| num(v)).collect()).collect(),
        });
        ModelExport {
            k_star: sel.k_star,
            per_k_silhouette: sel.per_k.iter().map(|(&k, &s)| (k, num(s))).collect(),
            centroids: sel.model.centroids.rows().map(|r| r.iter().map(|&v| num(v)).collect()).collect(),
            cluster_names: a.clustered.labels.by_cluster.clone(),
            user_ids: a.clustered.user_ids.clone(),
            labels: sel.model.labels.clone(),
            pca,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("model serializes") + "\n"
    }
}

const PALETTE: [&str; 10] =
    ["#4c72b0", "#dd8452", "#55a868", "#c44e52", "#8172b3", "#937860", "#da8bc3", "#8c8c8c", "#ccb974", "#64b5cd"];

/// SVG 1.1 scatter of 2-D points coloured by archetype. Coincident points
/// of the same archetype are drawn once, with the multiplicity in a tooltip.
pub fn write_scatter_svg<W: Write>(points: &[[f64; 2]], names: &[Archetype], mut out: W) -> Result<()> {
    const W_PX: f64 = 640.0;
    const H_PX: f64 = 480.0;
    const MARGIN: f64 = 48.0;
    let mut legend: Vec<Archetype> = names.to_vec();
    legend.sort();
    legend.dedup();

    let (mut x0, mut x1, mut y0, mut y1) = (f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY);
    for p in points {
        x0 = x0.min(p[0]);
        x1 = x1.max(p[0]);
        y0 = y0.min(p[1]);
        y1 = y1.max(p[1]);
    }
    if !x0.is_finite() {
        (x0, x1, y0, y1) = (-1.0, 1.0, -1.0, 1.0);
    }
    let pad = |lo: f64, hi: f64| if hi - lo < 1e-12 { (lo - 1.0, hi + 1.0) } else { (lo - 0.05 * (hi - lo), hi + 0.05 * (hi - lo)) };
    let (x0, x1) = pad(x0, x1);
    let (y0, y1) = pad(y0, y1);
    let sx = |x: f64| MARGIN + (x - x0) / (x1 - x0) * (W_PX - 2.0 * MARGIN);
    let sy = |y: f64| H_PX - MARGIN - (y - y0) / (y1 - y0) * (H_PX - 2.0 * MARGIN);

    let mut marks: BTreeMap<(usize, String, String), usize> = BTreeMap::new();
    for (p, name) in points.iter().zip(names) {
        let series = legend.binary_search(name).expect("in legend");
        *marks.entry((series, format!("{:.2}", sx(p[0])), format!("{:.2}", sy(p[1])))).or_default() += 1;
    }

    writeln!(out, r#"<?xml version="1.0" encoding="UTF-8" standalone="no"?>"#)?;
    writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{W_PX}" height="{H_PX}" viewBox="0 0 {W_PX} {H_PX}">"#
    )?;
    writeln!(out, r#"<rect width="100%" height="100%" fill="white"/>"#)?;
    writeln!(
        out,
        r##"<g stroke="#333" stroke-width="1"><line x1="{m}" y1="{b}" x2="{r}" y2="{b}"/><line x1="{m}" y1="{m}" x2="{m}" y2="{b}"/></g>"##,
        m = MARGIN,
        b = H_PX - MARGIN,
        r = W_PX - MARGIN
    )?;
    writeln!(
        out,
        r#"<text x="{}" y="{}" font-family="sans-serif" font-size="12" text-anchor="middle">PC1</text>"#,
        W_PX / 2.0,
        H_PX - 14.0
    )?;
    writeln!(
        out,
        r#"<text x="14" y="{}" font-family="sans-serif" font-size="12" text-anchor="middle" transform="rotate(-90 14 {})">PC2</text>"#,
        H_PX / 2.0,
        H_PX / 2.0
    )?;
    for ((series, x, y), count) in &marks {
        let r = 3.0 + (*count as f64).ln().max(0.0);
        writeln!(
            out,
            r#"<circle cx="{x}" cy="{y}" r="{r:.2}" fill="{}" fill-opacity="0.7"><title>{} ({count})</title></circle>"#,
            PALETTE[series % PALETTE.len()],
            legend[*series]
        )?;
    }
    for (i, name) in legend.iter().enumerate() {
        let y = MARGIN + 16.0 * i as f64;
        writeln!(
            out,
            r#"<circle cx="{}" cy="{y}" r="5" fill="{}"/><text x="{}" y="{}" font-family="sans-serif" font-size="11">{name}</text>"#,
            W_PX - MARGIN - 90.0,
            PALETTE[i % PALETTE.len()],
            W_PX - MARGIN - 80.0,
            y + 4.0
        )?;
    }
    writeln!(out, "</svg>")?;
    Ok(())
}
