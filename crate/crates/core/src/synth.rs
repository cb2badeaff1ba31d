//! Synthetic Q&A instances built from archetype mixtures with known
//! ground-truth labels. Counts are Poisson draws calibrated to typical
//! per-archetype medians; the Boolean feature of each archetype is enforced
//! by construction.

use std::collections::BTreeMap;
use std::fmt;
use std::io::Write;
use std::str::FromStr;

use chrono::{Duration, TimeZone, Utc};
use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Poisson};
use serde::{Deserialize, Serialize};

use crate::archetype::Archetype;
use crate::derive_seed;
use crate::error::{Error, Result};
use crate::ingest::{ActivityEvent, ActivityKind, InstanceWindow, Month};
use crate::series::UserActivitySeries;

/// Behaviour a synthetic user is drawn from. `Irregular` users have a few
/// runs of activity with varied counts and belong to no named archetype.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum UserProfile {
    NonRecurring,
    Sporadic,
    Frequent,
    Permanent,
    Irregular,
}

impl UserProfile {
    pub const ALL: [UserProfile; 5] = [
        UserProfile::NonRecurring,
        UserProfile::Sporadic,
        UserProfile::Frequent,
        UserProfile::Permanent,
        UserProfile::Irregular,
    ];

    pub fn ground_truth(self) -> Option<Archetype> {
        match self {
            UserProfile::NonRecurring => Some(Archetype::NonRecurring),
            UserProfile::Sporadic => Some(Archetype::Sporadic),
            UserProfile::Frequent => Some(Archetype::Frequent),
            UserProfile::Permanent => Some(Archetype::Permanent),
            UserProfile::Irregular => None,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            UserProfile::NonRecurring => "non_recurring",
            UserProfile::Sporadic => "sporadic",
            UserProfile::Frequent => "frequent",
            UserProfile::Permanent => "permanent",
            UserProfile::Irregular => "irregular",
        }
    }

    /// Calibrated defaults; `users` is 0.
    pub fn default_params(self) -> ProfileParams {
        let p = |question_rate, answer_rate, min_active_months, max_active_months, extra_active_months, tenure_months| {
            ProfileParams {
                users: 0,
                question_rate,
                answer_rate,
                min_active_months,
                max_active_months,
                extra_active_months,
                tenure_months,
            }
        };
        match self {
            UserProfile::NonRecurring => p(1.0, 1.3, 1, 1, 0.0, 0),
            UserProfile::Sporadic => p(1.0, 1.1, 2, 3, 0.1, 6),
            UserProfile::Frequent => p(1.6, 2.35, 12, 20, 0.5, 32),
            UserProfile::Permanent => p(1.85, 4.05, 14, 24, 0.5, 33),
            UserProfile::Irregular => p(0.8, 3.0, 2, 6, 1.5, 8),
        }
    }

    /// Shortest window that fits the minimum number of active months.
    pub fn min_months(self, params: &ProfileParams) -> usize {
        match self {
            UserProfile::NonRecurring => 1,
            UserProfile::Irregular => params.min_active_months.max(1),
            _ => (2 * params.min_active_months).saturating_sub(1).max(1),
        }
    }
}

impl fmt::Display for UserProfile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for UserProfile {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let norm: String = s.chars().filter(|c| c.is_ascii_alphanumeric()).collect::<String>().to_ascii_lowercase();
        UserProfile::ALL
            .into_iter()
            .find(|p| p.as_str().replace('_', "") == norm)
            .ok_or_else(|| Error::InvalidParameter(format!("unknown user profile `{s}`")))
    }
}

/// Generation parameters of one profile. Rates are mean events per active
/// month; reply counts in an active month are at least one.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProfileParams {
    pub users: usize,
    pub question_rate: f64,
    pub answer_rate: f64,
    pub min_active_months: usize,
    pub max_active_months: usize,
    /// Poisson mean of active months beyond the minimum.
    pub extra_active_months: f64,
    /// Typical months between first and last activity.
    pub tenure_months: usize,
}

/// Users of one profile whose activity lies in `months` months starting
/// `offset` months into the instance.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Cohort {
    pub profile: UserProfile,
    pub params: ProfileParams,
    pub offset: usize,
    pub months: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MixtureSpec {
    pub months: usize,
    pub seed: u64,
    pub start_month: Month,
    pub cohorts: Vec<Cohort>,
}

/// User-count shares of Non-Recurring, Sporadic, Frequent and Permanent users.
pub const TYPICAL_SHARES: [f64; 4] = [0.884, 0.101, 0.013, 0.002];

impl MixtureSpec {
    pub fn empty(months: usize, seed: u64) -> Self {
        MixtureSpec { months, seed, start_month: Month::new(2012, 1).expect("valid"), cohorts: Vec::new() }
    }

    /// Adds `users` users of `profile` active anywhere in the window.
    pub fn with(mut self, profile: UserProfile, users: usize) -> Self {
        let params = ProfileParams { users, ..profile.default_params() };
        self.cohorts.push(Cohort { profile, params, offset: 0, months: self.months });
        self
    }

    pub fn with_cohort(mut self, cohort: Cohort) -> Self {
        self.cohorts.push(cohort);
        self
    }

    /// Four-archetype mixture with the typical user shares, split by largest
    /// remainder so the counts add up to `users`.
    pub fn typical(users: usize, months: usize, seed: u64) -> Self {
        let raw: Vec<f64> = TYPICAL_SHARES.iter().map(|s| s * users as f64).collect();
        let mut counts: Vec<usize> = raw.iter().map(|r| r.floor() as usize).collect();
        let mut order: Vec<usize> = (0..4).collect();
        order.sort_by(|&a, &b| (raw[b] - raw[b].floor()).total_cmp(&(raw[a] - raw[a].floor())).then(a.cmp(&b)));
        let missing = users - counts.iter().sum::<usize>();
        for &i in order.iter().take(missing) {
            counts[i] += 1;
        }
        let named = [UserProfile::NonRecurring, UserProfile::Sporadic, UserProfile::Frequent, UserProfile::Permanent];
        named.iter().zip(counts).fold(MixtureSpec::empty(months, seed), |spec, (&p, n)| spec.with(p, n))
    }

    /// A 36-month community that grows up: a first year of irregular
    /// newcomers, a second year with a flood of one-off users, and a third
    /// year carried by a Frequent/Permanent backbone active throughout.
    pub fn staged(seed: u64) -> Self {
        let cohort = |profile: UserProfile, users, offset, months| Cohort {
            profile,
            params: ProfileParams { users, ..profile.default_params() },
            offset,
            months,
        };
        MixtureSpec::empty(36, seed)
            .with_cohort(cohort(UserProfile::Irregular, 120, 0, 12))
            .with_cohort(cohort(UserProfile::NonRecurring, 150, 0, 12))
            .with_cohort(cohort(UserProfile::Sporadic, 15, 0, 12))
            .with_cohort(cohort(UserProfile::Frequent, 180, 0, 36))
            .with_cohort(cohort(UserProfile::Permanent, 10, 0, 36))
            .with_cohort(cohort(UserProfile::NonRecurring, 4000, 12, 12))
            .with_cohort(cohort(UserProfile::Sporadic, 444, 12, 12))
            .with_cohort(cohort(UserProfile::NonRecurring, 300, 24, 12))
            .with_cohort(cohort(UserProfile::Sporadic, 35, 24, 12))
    }

    pub fn user_count(&self) -> usize {
        self.cohorts.iter().map(|c| c.params.users).sum()
    }

    pub fn window(&self) -> Result<InstanceWindow> {
        InstanceWindow::new(self.start_month, self.start_month.offset(self.months as i64 - 1))
    }

    pub fn validate(&self) -> Result<()> {
        let spec_err = |field: String, message: String| Err(Error::Spec { field, message });
        if self.months == 0 {
            return spec_err("months".into(), "must be at least 1".into());
        }
        for (i, c) in self.cohorts.iter().enumerate() {
            let name = |f: &str| format!("{}.{f}", c.profile);
            let p = &c.params;
            if p.users == 0 {
                continue;
            }
            if !(p.question_rate > 0.0 && p.question_rate.is_finite()) {
                return spec_err(name("question_rate"), "must be positive".into());
            }
            if !(p.answer_rate > 0.0 && p.answer_rate.is_finite()) {
                return spec_err(name("answer_rate"), "must be positive".into());
            }
            if !(p.extra_active_months >= 0.0 && p.extra_active_months.is_finite()) {
                return spec_err(name("extra_active_months"), "must be non-negative".into());
            }
            if p.min_active_months == 0 || p.min_active_months > p.max_active_months {
                return spec_err(name("min_active_months"), "must satisfy 1 <= min <= max_active_months".into());
            }
            if c.months == 0 || c.offset + c.months > self.months {
                return spec_err(format!("cohort[{i}]"), format!("does not fit in {} months", self.months));
            }
            let need = c.profile.min_months(p);
            if c.months < need {
                return spec_err(
                    name("min_active_months"),
                    format!("{} active months need at least {need} months, have {}", p.min_active_months, c.months),
                );
            }
        }
        Ok(())
    }

    /// Parses the key-value spec file. Top-level keys: `months`, `seed`,
    /// `start_month` ("YYYY-MM"). One table per profile (`[non_recurring]`,
    /// `[sporadic]`, `[frequent]`, `[permanent]`, `[irregular]`) sets `users`
    /// and optionally overrides any [`ProfileParams`] field. `[[cohort]]`
    /// entries add users confined to `months` months from `offset`.
    pub fn from_toml(text: &str) -> Result<Self> {
        let file: SpecFile = toml::from_str(text).map_err(|e| Error::Spec {
            field: e.span().map(|s| text[s].to_string()).unwrap_or_default(),
            message: e.message().to_string(),
        })?;
        let start_month = match &file.start_month {
            Some(s) => s.parse().map_err(|_| Error::Spec { field: "start_month".into(), message: format!("expected YYYY-MM, found `{s}`") })?,
            None => Month::new(2012, 1).expect("valid"),
        };
        let mut spec = MixtureSpec { months: file.months, seed: file.seed.unwrap_or(42), start_month, cohorts: Vec::new() };
        let sections = [
            (UserProfile::NonRecurring, &file.non_recurring),
            (UserProfile::Sporadic, &file.sporadic),
            (UserProfile::Frequent, &file.frequent),
            (UserProfile::Permanent, &file.permanent),
            (UserProfile::Irregular, &file.irregular),
        ];
        for (profile, section) in sections {
            if let Some(overrides) = section {
                let params = overrides.apply(profile.default_params());
                spec.cohorts.push(Cohort { profile, params, offset: 0, months: spec.months });
            }
        }
        for c in &file.cohort {
            let params = c.overrides().apply(c.profile.default_params());
            let offset = c.offset.unwrap_or(0);
            let months = c.months.unwrap_or(spec.months.saturating_sub(offset));
            spec.cohorts.push(Cohort { profile: c.profile, params, offset, months });
        }
        spec.validate()?;
        Ok(spec)
    }
}

impl Default for MixtureSpec {
    /// 1,000 users over 60 months, seed 42.
    fn default() -> Self {
        MixtureSpec::typical(1000, 60, 42)
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct SpecFile {
    months: usize,
    seed: Option<u64>,
    start_month: Option<String>,
    non_recurring: Option<Overrides>,
    sporadic: Option<Overrides>,
    frequent: Option<Overrides>,
    permanent: Option<Overrides>,
    irregular: Option<Overrides>,
    #[serde(default)]
    cohort: Vec<CohortEntry>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct CohortEntry {
    profile: UserProfile,
    offset: Option<usize>,
    months: Option<usize>,
    users: Option<usize>,
    question_rate: Option<f64>,
    answer_rate: Option<f64>,
    min_active_months: Option<usize>,
    max_active_months: Option<usize>,
    extra_active_months: Option<f64>,
    tenure_months: Option<usize>,
}

impl CohortEntry {
    fn overrides(&self) -> Overrides {
        Overrides {
            users: self.users,
            question_rate: self.question_rate,
            answer_rate: self.answer_rate,
            min_active_months: self.min_active_months,
            max_active_months: self.max_active_months,
            extra_active_months: self.extra_active_months,
            tenure_months: self.tenure_months,
        }
    }
}

#[derive(Deserialize, Default)]
#[serde(deny_unknown_fields)]
struct Overrides {
    users: Option<usize>,
    question_rate: Option<f64>,
    answer_rate: Option<f64>,
    min_active_months: Option<usize>,
    max_active_months: Option<usize>,
    extra_active_months: Option<f64>,
    tenure_months: Option<usize>,
}

impl Overrides {
    fn apply(&self, d: ProfileParams) -> ProfileParams {
        ProfileParams {
            users: self.users.unwrap_or(d.users),
            question_rate: self.question_rate.unwrap_or(d.question_rate),
            answer_rate: self.answer_rate.unwrap_or(d.answer_rate),
            min_active_months: self.min_active_months.unwrap_or(d.min_active_months),
            max_active_months: self.max_active_months.unwrap_or(d.max_active_months).max(self.min_active_months.unwrap_or(0)),
            extra_active_months: self.extra_active_months.unwrap_or(d.extra_active_months),
            tenure_months: self.tenure_months.unwrap_or(d.tenure_months),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GeneratedUser {
    pub questions: Vec<u32>,
    pub answers: Vec<u32>,
    pub profile: UserProfile,
}

fn poisson<R: Rng>(rng: &mut R, mean: f64) -> u32 {
    if mean <= 0.0 {
        return 0;
    }
    Poisson::new(mean).expect("positive mean").sample(rng) as u32
}

/// At least one event, `mean` on average.
fn at_least_one<R: Rng>(rng: &mut R, mean: f64) -> u32 {
    1 + poisson(rng, mean - 1.0)
}

/// `m` sorted positions in `0..span`, no two adjacent.
fn separated_positions<R: Rng>(rng: &mut R, m: usize, span: usize) -> Vec<usize> {
    debug_assert!(span + 1 >= 2 * m);
    let mut picks = sample(rng, span + 1 - m, m).into_vec();
    picks.sort_unstable();
    picks.iter().enumerate().map(|(i, &p)| p + i).collect()
}

fn active_month_count<R: Rng>(rng: &mut R, p: &ProfileParams) -> usize {
    (p.min_active_months + poisson(rng, p.extra_active_months) as usize).min(p.max_active_months)
}

/// Length of the stretch a user's active months are spread over.
fn tenure_span<R: Rng>(rng: &mut R, p: &ProfileParams, minimum: usize, months: usize) -> usize {
    let t = p.tenure_months.max(1);
    let drawn = rng.gen_range(t.div_ceil(2)..=t + t / 2);
    drawn.clamp(minimum.min(months), months)
}

/// Draws one user of `profile` over `months` months with default parameters.
pub fn generate_user(profile: UserProfile, months: usize, seed: u64) -> Result<GeneratedUser> {
    generate_user_with(profile, &profile.default_params(), months, seed)
}

pub fn generate_user_with(profile: UserProfile, p: &ProfileParams, months: usize, seed: u64) -> Result<GeneratedUser> {
    let need = profile.min_months(p);
    if months < need {
        return Err(Error::Spec {
            field: format!("{profile}.min_active_months"),
            message: format!("{} active months need at least {need} months, have {months}", p.min_active_months),
        });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut questions = vec![0u32; months];
    let mut answers = vec![0u32; months];
    match profile {
        UserProfile::NonRecurring => {
            let t = rng.gen_range(0..months);
            questions[t] = at_least_one(&mut rng, p.question_rate);
            answers[t] = at_least_one(&mut rng, p.answer_rate);
        }
        UserProfile::Sporadic => {
            let m = active_month_count(&mut rng, p).min(months.div_ceil(2));
            let span = tenure_span(&mut rng, p, 2 * m - 1, months);
            let start = rng.gen_range(0..=months - span);
            let q = at_least_one(&mut rng, p.question_rate);
            let a = at_least_one(&mut rng, p.answer_rate);
            for t in separated_positions(&mut rng, m, span) {
                questions[start + t] = q;
                answers[start + t] = a;
            }
        }
        UserProfile::Frequent | UserProfile::Permanent => {
            let m = active_month_count(&mut rng, p).min(months.div_ceil(2));
            let span = tenure_span(&mut rng, p, 2 * m - 1, months);
            let start = rng.gen_range(0..=months - span);
            let active: Vec<usize> = separated_positions(&mut rng, m, span).into_iter().map(|t| start + t).collect();
            for &t in &active {
                questions[t] = poisson(&mut rng, p.question_rate);
                answers[t] = at_least_one(&mut rng, p.answer_rate);
            }
            let top = active.iter().map(|&t| answers[t]).max().unwrap_or(0);
            let at_top: Vec<usize> = active.iter().copied().filter(|&t| answers[t] == top).collect();
            if profile == UserProfile::Frequent && at_top.len() > 1 {
                answers[at_top[0]] += 1;
            }
            if profile == UserProfile::Permanent && at_top.len() == 1 {
                let others: Vec<usize> = active.iter().copied().filter(|&t| t != at_top[0]).collect();
                if let Some(&t) = others.get(rng.gen_range(0..others.len().max(1))) {
                    answers[t] = top;
                }
            }
        }
        UserProfile::Irregular => {
            let m = active_month_count(&mut rng, p).min(months);
            let span = tenure_span(&mut rng, p, m, months);
            let start = rng.gen_range(0..=months - span);
            for t in sample(&mut rng, span, m).into_iter() {
                questions[start + t] = poisson(&mut rng, p.question_rate);
                answers[start + t] = at_least_one(&mut rng, p.answer_rate);
            }
        }
    }
    Ok(GeneratedUser { questions, answers, profile })
}

#[derive(Debug, Clone)]
pub struct SyntheticInstance {
    pub window: InstanceWindow,
    pub events: Vec<ActivityEvent>,
    pub profiles: BTreeMap<String, UserProfile>,
    pub series: BTreeMap<String, UserActivitySeries>,
}

impl SyntheticInstance {
    /// Ground-truth CSV: `user_id,profile`.
    pub fn write_labels_csv<W: Write>(&self, output: W) -> Result<()> {
        let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(output);
        w.write_record(["user_id", "profile"])?;
        for (user, profile) in &self.profiles {
            w.write_record([user.as_str(), profile.as_str()])?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Realizes every cohort's users as events spread uniformly inside their
/// months. User ids are zero-padded sequence numbers.
pub fn generate_instance(spec: &MixtureSpec) -> Result<SyntheticInstance> {
    spec.validate()?;
    let window = spec.window()?;
    let width = spec.user_count().max(1).to_string().len();
    let mut profiles = BTreeMap::new();
    let mut series = BTreeMap::new();
    let mut events = Vec::new();
    let mut next_id = 1usize;
    for (ci, cohort) in spec.cohorts.iter().enumerate() {
        for ui in 0..cohort.params.users {
            let user_id = format!("{next_id:0width$}");
            next_id += 1;
            let user_seed = derive_seed(spec.seed, &[ci as u64, ui as u64]);
            let user = generate_user_with(cohort.profile, &cohort.params, cohort.months, user_seed)?;
            let mut s = UserActivitySeries::zeros(user_id.clone(), spec.months);
            s.questions[cohort.offset..cohort.offset + cohort.months].copy_from_slice(&user.questions);
            s.answers[cohort.offset..cohort.offset + cohort.months].copy_from_slice(&user.answers);

            let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(user_seed, &[u64::MAX]));
            for t in 0..spec.months {
                let month = spec.start_month.offset(t as i64);
                let kinds = std::iter::repeat_n(ActivityKind::Question, s.questions[t] as usize)
                    .chain((0..s.answers[t]).map(|i| if i % 3 == 2 { ActivityKind::Comment } else { ActivityKind::Answer }));
                for kind in kinds {
                    let offset = rng.gen_range(0..month.days() as i64 * 86_400);
                    let midnight = Utc.from_utc_datetime(&month.first_day().and_hms_opt(0, 0, 0).expect("midnight"));
                    let ts = midnight + Duration::seconds(offset);
                    events.push(ActivityEvent::new(&user_id, ts, kind)?);
                }
            }
            profiles.insert(user_id.clone(), cohort.profile);
            series.insert(user_id, s);
        }
    }
    events.sort_by(|a, b| {
        a.timestamp.cmp(&b.timestamp).then_with(|| a.user_id.cmp(&b.user_id)).then(a.kind.cmp(&b.kind))
    });
    Ok(SyntheticInstance { window, events, profiles, series })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::features::{detect_peaks, duplicate_max, many_peaks};
    use crate::series::{build_user_series, Granularity};

    #[test]
    fn non_recurring_has_one_active_month() {
        for seed in 0..200 {
            let u = generate_user(UserProfile::NonRecurring, 60, seed).unwrap();
            let active = (0..60).filter(|&t| u.questions[t] + u.answers[t] > 0).count();
            assert_eq!(active, 1);
            assert_eq!(u.questions.iter().sum::<u32>(), 1);
        }
    }

    #[test]
    fn booleans_hold_by_construction() {
        for seed in 0..300 {
            let s = generate_user(UserProfile::Sporadic, 60, seed).unwrap();
            assert!(duplicate_max(&s.answers) && !many_peaks(&s.answers, 5));
            let f = generate_user(UserProfile::Frequent, 60, seed).unwrap();
            assert!(many_peaks(&f.answers, 5) && !duplicate_max(&f.answers));
            let p = generate_user(UserProfile::Permanent, 60, seed).unwrap();
            assert!(many_peaks(&p.answers, 5) && duplicate_max(&p.answers));
            assert!(detect_peaks(&p.answers).len() >= 14);
        }
    }

    #[test]
    fn deterministic_per_seed() {
        assert_eq!(generate_user(UserProfile::Permanent, 60, 5).unwrap(), generate_user(UserProfile::Permanent, 60, 5).unwrap());
        assert_ne!(generate_user(UserProfile::Permanent, 60, 5).unwrap(), generate_user(UserProfile::Permanent, 60, 6).unwrap());
    }

    #[test]
    fn short_window_rejected() {
        assert!(generate_user(UserProfile::Frequent, 2, 1).is_err());
        let spec = MixtureSpec::empty(2, 1).with(UserProfile::Frequent, 3);
        assert!(matches!(generate_instance(&spec), Err(Error::Spec { .. })));
    }

    #[test]
    fn typical_split_adds_up() {
        let spec = MixtureSpec::typical(1000, 60, 42);
        let counts: Vec<usize> = spec.cohorts.iter().map(|c| c.params.users).collect();
        assert_eq!(counts, vec![884, 101, 13, 2]);
        assert_eq!(MixtureSpec::typical(2000, 60, 42).user_count(), 2000);
    }

    #[test]
    fn events_rebuild_generated_series() {
        let spec = MixtureSpec::empty(60, 3)
            .with(UserProfile::NonRecurring, 30)
            .with(UserProfile::Sporadic, 10)
            .with(UserProfile::Frequent, 4)
            .with(UserProfile::Permanent, 2)
            .with(UserProfile::Irregular, 5);
        let inst = generate_instance(&spec).unwrap();
        let rebuilt = build_user_series(&inst.events, &inst.window, Granularity::Month);
        assert_eq!(rebuilt.dropped, 0);
        assert_eq!(rebuilt.users, inst.series);
    }

    #[test]
    fn zero_users_zero_events() {
        let inst = generate_instance(&MixtureSpec::empty(12, 1)).unwrap();
        assert!(inst.events.is_empty());
    }

    #[test]
    fn spec_file_parsing() {
        let spec = MixtureSpec::from_toml(
            r#"
            months = 48
            seed = 7
            start_month = "2010-03"
            [non_recurring]
            users = 90
            [frequent]
            users = 4
            answer_rate = 3.0
            [[cohort]]
            profile = "irregular"
            users = 5
            offset = 12
            months = 12
            "#,
        )
        .unwrap();
        assert_eq!(spec.months, 48);
        assert_eq!(spec.cohorts.len(), 3);
        assert_eq!(spec.cohorts[1].params.answer_rate, 3.0);
        assert_eq!(spec.cohorts[2].offset, 12);

        let err = MixtureSpec::from_toml("months = 12\n[frequent]\nusers = 1\nanswer_rate = -1.0\n").unwrap_err();
        assert!(err.to_string().contains("frequent.answer_rate"), "{err}");
        let err = MixtureSpec::from_toml("months = 12\n[frequent]\nuser = 1\n").unwrap_err();
        assert!(err.to_string().contains("user"), "{err}");
    }
}
