use serde::Serialize;

use super::{Archetype, ArchetypeLabels};
use crate::series::UserActivitySeries;

fn median(values: &mut [f64]) -> Option<f64> {
    if values.is_empty() {
        return None;
    }
    values.sort_by(f64::total_cmp);
    let mid = values.len() / 2;
    Some(if values.len().is_multiple_of(2) { (values[mid - 1] + values[mid]) / 2.0 } else { values[mid] })
}

fn fraction(part: u64, total: u64) -> Option<f64> {
    (total > 0).then(|| part as f64 / total as f64)
}

/// Activity attributed to each archetype, per series kind.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Composition {
    pub entries: Vec<CompositionEntry>,
    pub total_questions: u64,
    pub total_answers: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CompositionEntry {
    pub archetype: Archetype,
    pub questions: u64,
    pub answers: u64,
    /// Absent when the instance has no activity of that kind.
    pub question_fraction: Option<f64>,
    pub answer_fraction: Option<f64>,
}

impl Composition {
    pub fn get(&self, archetype: Archetype) -> Option<&CompositionEntry> {
        self.entries.iter().find(|e| e.archetype == archetype)
    }

    /// Builds a composition directly from per-archetype totals.
    pub fn from_totals(totals: &[(Archetype, u64, u64)]) -> Self {
        let total_questions = totals.iter().map(|t| t.1).sum();
        let total_answers = totals.iter().map(|t| t.2).sum();
        let entries = totals
            .iter()
            .map(|&(archetype, questions, answers)| CompositionEntry {
                archetype,
                questions,
                answers,
                question_fraction: fraction(questions, total_questions),
                answer_fraction: fraction(answers, total_answers),
            })
            .collect();
        Composition { entries, total_questions, total_answers }
    }
}

/// Breakdown of total question and reply activity by archetype.
pub fn activity_composition(
    series: &[&UserActivitySeries],
    point_labels: &[usize],
    labels: &ArchetypeLabels,
) -> Composition {
    let totals: Vec<(Archetype, u64, u64)> = labels
        .ordered()
        .into_iter()
        .map(|archetype| {
            let (q, a) = series
                .iter()
                .zip(point_labels)
                .filter(|(_, &c)| labels.of(c) == archetype)
                .fold((0, 0), |(q, a), (s, _)| (q + s.total_questions(), a + s.total_answers()));
            (archetype, q, a)
        })
        .collect();
    Composition::from_totals(&totals)
}

/// Descriptive statistics of one archetype. Medians are absent for an
/// archetype without users.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ArchetypeStats {
    pub name: Archetype,
    pub users: usize,
    pub user_fraction: f64,
    pub median_questions: Option<f64>,
    pub median_answers: Option<f64>,
    pub median_active_months: Option<f64>,
    pub median_tenure_months: Option<f64>,
    pub question_fraction: Option<f64>,
    pub answer_fraction: Option<f64>,
}

/// Per-archetype medians of user totals, active months and tenure, plus user
/// and activity shares. Tenure counts months from first to last activity, so
/// a single-burst user has tenure 0.
pub fn archetype_stats(
    series: &[&UserActivitySeries],
    point_labels: &[usize],
    labels: &ArchetypeLabels,
) -> Vec<ArchetypeStats> {
    let composition = activity_composition(series, point_labels, labels);
    let n = series.len();
    labels
        .ordered()
        .into_iter()
        .map(|archetype| {
            let members: Vec<&UserActivitySeries> = series
                .iter()
                .zip(point_labels)
                .filter(|(_, &c)| labels.of(c) == archetype)
                .map(|(s, _)| *s)
                .collect();
            let mut qs: Vec<f64> = members.iter().map(|s| s.total_questions() as f64).collect();
            let mut as_: Vec<f64> = members.iter().map(|s| s.total_answers() as f64).collect();
            let mut active: Vec<f64> = members.iter().map(|s| s.active_count() as f64).collect();
            let mut tenure: Vec<f64> = members
                .iter()
                .map(|s| {
                    debug_assert!(s.active_count() <= s.tenure() + 1 && s.tenure() < s.len().max(1));
                    s.tenure() as f64
                })
                .collect();
            let entry = composition.get(archetype);
            ArchetypeStats {
                name: archetype,
                users: members.len(),
                user_fraction: if n > 0 { members.len() as f64 / n as f64 } else { 0.0 },
                median_questions: median(&mut qs),
                median_answers: median(&mut as_),
                median_active_months: median(&mut active),
                median_tenure_months: median(&mut tenure),
                question_fraction: entry.and_then(|e| e.question_fraction),
                answer_fraction: entry.and_then(|e| e.answer_fraction),
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn user(id: &str, q: &[u32], a: &[u32]) -> UserActivitySeries {
        UserActivitySeries { user_id: id.into(), questions: q.to_vec(), answers: a.to_vec() }
    }

    fn named() -> ArchetypeLabels {
        ArchetypeLabels { by_cluster: Archetype::NAMED.to_vec(), named: true }
    }

    #[test]
    fn single_burst_and_long_tenure() {
        let burst = user("b", &[0, 2, 0, 0], &[0, 1, 0, 0]);
        assert_eq!((burst.tenure(), burst.active_count()), (0, 1));
        let mut q = vec![0; 12];
        q[0] = 1;
        q[11] = 1;
        let long = user("l", &q, &[0; 12]);
        assert_eq!(long.tenure(), 11);
        assert_eq!(long.active_count(), 2);
    }

    #[test]
    fn medians_and_fractions() {
        let users = [
            user("a", &[1, 0, 0], &[1, 0, 0]),
            user("b", &[0, 1, 0], &[0, 2, 0]),
            user("c", &[0, 0, 1], &[0, 0, 1]),
            user("d", &[2, 0, 3], &[4, 0, 4]),
        ];
        let refs: Vec<&UserActivitySeries> = users.iter().collect();
        let stats = archetype_stats(&refs, &[0, 0, 0, 2], &named());
        assert_eq!(stats.len(), 4);
        let nr = &stats[0];
        assert_eq!(nr.users, 3);
        assert_eq!(nr.median_questions, Some(1.0));
        assert_eq!(nr.median_answers, Some(1.0));
        assert_eq!(nr.median_tenure_months, Some(0.0));
        assert_eq!(nr.question_fraction, Some(3.0 / 8.0));
        assert_eq!(stats[1].users, 0);
        assert_eq!(stats[1].median_questions, None);
        assert_eq!(stats[1].answer_fraction, Some(0.0));
        let frequent = &stats[2];
        assert_eq!(frequent.median_tenure_months, Some(2.0));
        assert_eq!(frequent.median_active_months, Some(2.0));
        let users_total: f64 = stats.iter().map(|s| s.user_fraction).sum();
        assert!((users_total - 1.0).abs() < 1e-12);
    }

    #[test]
    fn one_archetype_owns_all_activity() {
        let users = [user("a", &[1], &[3]), user("b", &[0], &[0])];
        let refs: Vec<&UserActivitySeries> = users.iter().collect();
        let c = activity_composition(&refs, &[2, 0], &named());
        assert_eq!(c.get(Archetype::Frequent).unwrap().answer_fraction, Some(1.0));
        assert_eq!(c.get(Archetype::NonRecurring).unwrap().answer_fraction, Some(0.0));
    }

    #[test]
    fn no_answers_means_absent_fraction() {
        let users = [user("a", &[1], &[0])];
        let refs: Vec<&UserActivitySeries> = users.iter().collect();
        let c = activity_composition(&refs, &[0], &named());
        assert!(c.entries.iter().all(|e| e.answer_fraction.is_none()));
        assert_eq!(c.get(Archetype::NonRecurring).unwrap().question_fraction, Some(1.0));
    }
}
