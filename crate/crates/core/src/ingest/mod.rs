//! Raw activity ingestion: Stack Exchange dump XML, a generic event CSV,
//! and the calendar window the events span.

mod csv;
mod dump;

use std::fmt;
use std::str::FromStr;

use chrono::{DateTime, Datelike, NaiveDate, Timelike, Utc};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use self::csv::{parse_event_csv, write_event_csv, EventCsvReader};
pub use self::dump::{
    parse_stackexchange_comments, parse_stackexchange_dump, parse_stackexchange_posts, DumpKind,
    DumpReader,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum ActivityKind {
    Question,
    Answer,
    Comment,
}

impl ActivityKind {
    pub fn as_str(self) -> &'static str {
        match self {
            ActivityKind::Question => "question",
            ActivityKind::Answer => "answer",
            ActivityKind::Comment => "comment",
        }
    }

    /// Answers and comments share the reply series.
    pub fn is_question(self) -> bool {
        matches!(self, ActivityKind::Question)
    }
}

impl FromStr for ActivityKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "question" => Ok(ActivityKind::Question),
            "answer" => Ok(ActivityKind::Answer),
            "comment" => Ok(ActivityKind::Comment),
            other => Err(Error::InvalidParameter(format!("unknown activity kind `{other}`"))),
        }
    }
}

impl fmt::Display for ActivityKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// One question, answer or comment by one user.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ActivityEvent {
    pub user_id: String,
    pub timestamp: DateTime<Utc>,
    pub kind: ActivityKind,
}

impl ActivityEvent {
    /// Builds a validated event. The user id is trimmed and must be non-empty;
    /// the timestamp is truncated to whole seconds.
    pub fn new(user_id: &str, timestamp: DateTime<Utc>, kind: ActivityKind) -> Result<Self> {
        let user_id = user_id.trim();
        if user_id.is_empty() {
            return Err(Error::InvalidParameter("empty user id".into()));
        }
        let timestamp = timestamp.with_nanosecond(0).unwrap_or(timestamp);
        Ok(ActivityEvent { user_id: user_id.to_owned(), timestamp, kind })
    }

    pub fn month(&self) -> Month {
        Month::of(&self.timestamp)
    }
}

/// A UTC calendar month.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Month {
    year: i32,
    month: u32,
}

impl Month {
    pub fn new(year: i32, month: u32) -> Result<Self> {
        if !(1..=12).contains(&month) {
            return Err(Error::InvalidParameter(format!("month {month} out of range 1..=12")));
        }
        Ok(Month { year, month })
    }

    pub fn of(ts: &DateTime<Utc>) -> Self {
        Month { year: ts.year(), month: ts.month() }
    }

    pub fn year(self) -> i32 {
        self.year
    }

    pub fn month(self) -> u32 {
        self.month
    }

    /// Months since year 0, January.
    pub fn ordinal(self) -> i64 {
        self.year as i64 * 12 + (self.month as i64 - 1)
    }

    pub fn from_ordinal(ordinal: i64) -> Self {
        Month { year: ordinal.div_euclid(12) as i32, month: ordinal.rem_euclid(12) as u32 + 1 }
    }

    pub fn offset(self, months: i64) -> Self {
        Month::from_ordinal(self.ordinal() + months)
    }

    /// Signed number of months from `self` to `other`.
    pub fn months_until(self, other: Month) -> i64 {
        other.ordinal() - self.ordinal()
    }

    pub fn first_day(self) -> NaiveDate {
        NaiveDate::from_ymd_opt(self.year, self.month, 1).expect("valid month")
    }

    pub fn days(self) -> u32 {
        let next = self.offset(1).first_day();
        (next - self.first_day()).num_days() as u32
    }
}

impl fmt::Display for Month {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:04}-{:02}", self.year, self.month)
    }
}

impl FromStr for Month {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::InvalidParameter(format!("expected YYYY-MM, found `{s}`"));
        let (y, m) = s.trim().split_once('-').ok_or_else(bad)?;
        Month::new(y.parse().map_err(|_| bad())?, m.parse().map_err(|_| bad())?)
    }
}

impl Serialize for Month {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

/// The inclusive range of calendar months an instance is observed over.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct InstanceWindow {
    start_month: Month,
    end_month: Month,
    month_count: usize,
}

impl InstanceWindow {
    pub fn new(start_month: Month, end_month: Month) -> Result<Self> {
        if end_month < start_month {
            return Err(Error::Window(format!("end {end_month} precedes start {start_month}")));
        }
        let month_count = start_month.months_until(end_month) as usize + 1;
        Ok(InstanceWindow { start_month, end_month, month_count })
    }

    pub fn start_month(&self) -> Month {
        self.start_month
    }

    pub fn end_month(&self) -> Month {
        self.end_month
    }

    pub fn month_count(&self) -> usize {
        self.month_count
    }

    /// Zero-based index of `month` inside the window.
    pub fn index_of(&self, month: Month) -> Option<usize> {
        let idx = self.start_month.months_until(month);
        (0..self.month_count as i64).contains(&idx).then_some(idx as usize)
    }

    pub fn contains(&self, month: Month) -> bool {
        self.index_of(month).is_some()
    }

    /// The window's first `months` months.
    pub fn prefix(&self, months: usize) -> Result<Self> {
        if months == 0 || months > self.month_count {
            return Err(Error::Window(format!(
                "prefix of {months} months outside a {}-month window",
                self.month_count
            )));
        }
        InstanceWindow::new(self.start_month, self.start_month.offset(months as i64 - 1))
    }
}

/// Calendar window spanned by `events`. `end_override` replaces the month of
/// the latest event, e.g. to pin a fixed observation cutoff.
pub fn derive_window(events: &[ActivityEvent], end_override: Option<Month>) -> Result<InstanceWindow> {
    let first = events.iter().map(ActivityEvent::month).min().ok_or(Error::NoEvents)?;
    let last = events.iter().map(ActivityEvent::month).max().ok_or(Error::NoEvents)?;
    InstanceWindow::new(first, end_override.unwrap_or(last))
}

/// Tally of input rows that did not become events.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct SkipReport {
    pub rows: u64,
    pub missing_user: u64,
    pub other_post_type: u64,
    pub bad_timestamp: u64,
    pub bad_line: u64,
    /// Line numbers of rejected CSV lines (empty for XML input).
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub lines: Vec<u64>,
}

impl SkipReport {
    pub fn skipped(&self) -> u64 {
        self.missing_user + self.other_post_type + self.bad_timestamp + self.bad_line
    }

    pub fn merge(&mut self, other: &SkipReport) {
        self.rows += other.rows;
        self.missing_user += other.missing_user;
        self.other_post_type += other.other_post_type;
        self.bad_timestamp += other.bad_timestamp;
        self.bad_line += other.bad_line;
        self.lines.extend_from_slice(&other.lines);
    }
}

/// Events parsed from one input together with the rows that were skipped.
#[derive(Debug, Clone, Default)]
pub struct Parsed {
    pub events: Vec<ActivityEvent>,
    pub skips: SkipReport,
}

#[cfg(test)]
mod tests {
    use super::*;
    use chrono::TimeZone;

    fn at(y: i32, m: u32, d: u32) -> ActivityEvent {
        let ts = Utc.with_ymd_and_hms(y, m, d, 12, 0, 0).unwrap();
        ActivityEvent::new("u", ts, ActivityKind::Answer).unwrap()
    }

    #[test]
    fn window_spanning_eleven_months() {
        let events = vec![at(2014, 4, 3), at(2014, 9, 1), at(2015, 2, 20)];
        let w = derive_window(&events, None).unwrap();
        assert_eq!(w.start_month(), Month::new(2014, 4).unwrap());
        assert_eq!(w.end_month(), Month::new(2015, 2).unwrap());
        assert_eq!(w.month_count(), 11);
    }

    #[test]
    fn single_event_window() {
        let w = derive_window(&[at(2016, 6, 10)], None).unwrap();
        assert_eq!(w.month_count(), 1);
        assert_eq!(w.start_month(), w.end_month());
    }

    #[test]
    fn empty_window_is_an_error() {
        assert!(matches!(derive_window(&[], None), Err(Error::NoEvents)));
    }

    #[test]
    fn end_override_extends_window() {
        let cutoff = Month::new(2017, 2).unwrap();
        let w = derive_window(&[at(2016, 6, 10)], Some(cutoff)).unwrap();
        assert_eq!(w.month_count(), 9);
        assert!(derive_window(&[at(2016, 6, 10)], Some(Month::new(2016, 5).unwrap())).is_err());
    }

    #[test]
    fn month_arithmetic() {
        let m = Month::new(2014, 11).unwrap();
        assert_eq!(m.offset(3), Month::new(2015, 2).unwrap());
        assert_eq!(m.offset(-11), Month::new(2013, 12).unwrap());
        assert_eq!("2017-02".parse::<Month>().unwrap(), Month::new(2017, 2).unwrap());
        assert!("2017-13".parse::<Month>().is_err());
        assert_eq!(Month::new(2016, 2).unwrap().days(), 29);
    }

    #[test]
    fn blank_user_rejected() {
        let ts = Utc.with_ymd_and_hms(2016, 1, 1, 0, 0, 0).unwrap();
        assert!(ActivityEvent::new("  ", ts, ActivityKind::Question).is_err());
    }
}
