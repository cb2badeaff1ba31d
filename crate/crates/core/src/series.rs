//! Per-user monthly activity series, zero-filled over the instance window.

use std::collections::BTreeMap;
use std::io::Write;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::ingest::{ActivityEvent, InstanceWindow, Month};

/// Width of one series bucket. Calendar months are the default; coarser
/// buckets smear bursts and are offered only for exploration.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Granularity {
    #[default]
    Month,
    Quarter,
    Year,
}

impl Granularity {
    pub fn months_per_bucket(self) -> usize {
        match self {
            Granularity::Month => 1,
            Granularity::Quarter => 3,
            Granularity::Year => 12,
        }
    }

    pub fn buckets(self, window: &InstanceWindow) -> usize {
        window.month_count().div_ceil(self.months_per_bucket())
    }
}

impl std::str::FromStr for Granularity {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "month" => Ok(Granularity::Month),
            "quarter" => Ok(Granularity::Quarter),
            "year" => Ok(Granularity::Year),
            _ => Err(Error::InvalidParameter(format!("unknown granularity `{s}`"))),
        }
    }
}

/// A user's question counts and reply (answer + comment) counts per bucket.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct UserActivitySeries {
    pub user_id: String,
    pub questions: Vec<u32>,
    pub answers: Vec<u32>,
}

impl UserActivitySeries {
    pub fn zeros(user_id: impl Into<String>, len: usize) -> Self {
        UserActivitySeries { user_id: user_id.into(), questions: vec![0; len], answers: vec![0; len] }
    }

    pub fn len(&self) -> usize {
        self.questions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.questions.is_empty()
    }

    pub fn total_questions(&self) -> u64 {
        self.questions.iter().map(|&c| c as u64).sum()
    }

    pub fn total_answers(&self) -> u64 {
        self.answers.iter().map(|&c| c as u64).sum()
    }

    pub fn total(&self) -> u64 {
        self.total_questions() + self.total_answers()
    }

    /// Buckets with at least one question or reply.
    pub fn active(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.len()).filter(|&t| self.questions[t] + self.answers[t] > 0)
    }

    pub fn active_count(&self) -> usize {
        self.active().count()
    }

    /// Buckets between the first and last active bucket; 0 for a single burst.
    pub fn tenure(&self) -> usize {
        let mut active = self.active();
        match active.next() {
            Some(first) => active.last().unwrap_or(first) - first,
            None => 0,
        }
    }

    /// The first `len` buckets.
    pub fn truncated(&self, len: usize) -> Self {
        UserActivitySeries {
            user_id: self.user_id.clone(),
            questions: self.questions[..len].to_vec(),
            answers: self.answers[..len].to_vec(),
        }
    }
}

/// All users' series over one window.
#[derive(Debug, Clone, PartialEq)]
pub struct SeriesSet {
    pub window: InstanceWindow,
    pub granularity: Granularity,
    pub users: BTreeMap<String, UserActivitySeries>,
    /// Events outside the window.
    pub dropped: u64,
}

impl SeriesSet {
    pub fn buckets(&self) -> usize {
        self.granularity.buckets(&self.window)
    }

    pub fn is_empty(&self) -> bool {
        self.users.is_empty()
    }

    pub fn user_count(&self) -> usize {
        self.users.len()
    }

    pub fn totals(&self) -> MonthlyTotals {
        total_activity(self.users.values(), self.buckets())
    }

    /// Long-form export: `user_id,kind,month_index,count`, non-zero cells only.
    pub fn write_long_csv<W: Write>(&self, output: W) -> Result<()> {
        let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(output);
        w.write_record(["user_id", "kind", "month_index", "count"])?;
        for s in self.users.values() {
            for (kind, counts) in [("question", &s.questions), ("answer", &s.answers)] {
                for (t, &c) in counts.iter().enumerate() {
                    if c > 0 {
                        w.write_record([s.user_id.as_str(), kind, &t.to_string(), &c.to_string()])?;
                    }
                }
            }
        }
        w.flush()?;
        Ok(())
    }
}

/// Counts every event into its user's bucket. Question events feed
/// `questions`, answers and comments feed `answers`; events outside the
/// window are dropped and tallied.
pub fn build_user_series(events: &[ActivityEvent], window: &InstanceWindow, granularity: Granularity) -> SeriesSet {
    let len = granularity.buckets(window);
    let per_bucket = granularity.months_per_bucket();
    let mut users: BTreeMap<String, UserActivitySeries> = BTreeMap::new();
    let mut dropped = 0;
    for event in events {
        let Some(idx) = window.index_of(event.month()) else {
            dropped += 1;
            continue;
        };
        let bucket = idx / per_bucket;
        let series = users
            .entry(event.user_id.clone())
            .or_insert_with(|| UserActivitySeries::zeros(event.user_id.clone(), len));
        if event.kind.is_question() {
            series.questions[bucket] += 1;
        } else {
            series.answers[bucket] += 1;
        }
    }
    SeriesSet { window: *window, granularity, users, dropped }
}

/// Events whose calendar month is at or before `cutoff`.
pub fn truncate_events(events: &[ActivityEvent], cutoff: Month) -> Vec<ActivityEvent> {
    events.iter().filter(|e| e.month() <= cutoff).cloned().collect()
}

/// Instance-wide activity per bucket, overall and per series kind.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct MonthlyTotals {
    pub totals: Vec<u64>,
    pub questions: Vec<u64>,
    pub answers: Vec<u64>,
}

pub fn total_activity<'a, I>(series: I, len: usize) -> MonthlyTotals
where
    I: IntoIterator<Item = &'a UserActivitySeries>,
{
    let mut questions = vec![0u64; len];
    let mut answers = vec![0u64; len];
    for s in series {
        for t in 0..len {
            questions[t] += s.questions[t] as u64;
            answers[t] += s.answers[t] as u64;
        }
    }
    let totals = questions.iter().zip(&answers).map(|(q, a)| q + a).collect();
    MonthlyTotals { totals, questions, answers }
}
