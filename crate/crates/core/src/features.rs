//! The three per-series features: more-than-threshold peak count,
//! duplicated maximum peak, and the ratio of distinct non-zero values to
//! series length. All three lie in [0, 1].

use std::collections::BTreeSet;
use std::io::Write;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::series::UserActivitySeries;

/// Default peak-count threshold: more than five peaks.
pub const DEFAULT_PEAK_THRESHOLD: usize = 5;

/// Indices whose value is strictly greater than both neighbours. Positions
/// beyond either end of the series count as zero, so a burst in the first or
/// last month is a peak. Plateaus are not peaks.
pub fn detect_peaks(series: &[u32]) -> Vec<usize> {
    let n = series.len();
    (0..n)
        .filter(|&t| {
            let left = if t == 0 { 0 } else { series[t - 1] };
            let right = if t + 1 == n { 0 } else { series[t + 1] };
            series[t] > left && series[t] > right
        })
        .collect()
}

pub fn many_peaks(series: &[u32], threshold: usize) -> bool {
    detect_peaks(series).len() > threshold
}

/// Whether at least two peaks share the highest peak value.
pub fn duplicate_max(series: &[u32]) -> bool {
    let peaks = detect_peaks(series);
    let Some(top) = peaks.iter().map(|&t| series[t]).max() else {
        return false;
    };
    peaks.iter().filter(|&&t| series[t] == top).count() >= 2
}

pub fn unique_nonzero_ratio<T: Scalar>(series: &[u32]) -> T {
    if series.is_empty() {
        return T::zero();
    }
    let distinct: BTreeSet<u32> = series.iter().copied().filter(|&v| v > 0).collect();
    T::from_count(distinct.len()) / T::from_count(series.len())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FeatureVector<T> {
    pub many_peaks: T,
    pub duplicate_max: T,
    pub unique_nonzero_ratio: T,
}

impl<T: Scalar> FeatureVector<T> {
    pub fn to_array(self) -> [T; 3] {
        [self.many_peaks, self.duplicate_max, self.unique_nonzero_ratio]
    }

    pub fn from_slice(p: &[T]) -> Self {
        FeatureVector { many_peaks: p[0], duplicate_max: p[1], unique_nonzero_ratio: p[2] }
    }
}

fn indicator<T: Scalar>(b: bool) -> T {
    if b {
        T::one()
    } else {
        T::zero()
    }
}

pub fn extract_features<T: Scalar>(series: &[u32], peak_threshold: usize) -> FeatureVector<T> {
    let peaks = detect_peaks(series);
    let top = peaks.iter().map(|&t| series[t]).max();
    let top_count = peaks.iter().filter(|&&t| Some(series[t]) == top).count();
    FeatureVector {
        many_peaks: indicator(peaks.len() > peak_threshold),
        duplicate_max: indicator(top_count >= 2),
        unique_nonzero_ratio: unique_nonzero_ratio(series),
    }
}

/// Nearest-rank `q`-quantile of the per-series peak counts.
pub fn peak_count_quantile<'a, I>(all_series: I, q: f64) -> Result<usize>
where
    I: IntoIterator<Item = &'a [u32]>,
{
    if !(q > 0.0 && q <= 1.0) {
        return Err(Error::InvalidParameter(format!("quantile {q} outside (0, 1]")));
    }
    let mut counts: Vec<usize> = all_series.into_iter().map(|s| detect_peaks(s).len()).collect();
    if counts.is_empty() {
        return Err(Error::EmptyCorpus);
    }
    counts.sort_unstable();
    let rank = (q * counts.len() as f64).ceil().max(1.0) as usize;
    Ok(counts[rank.min(counts.len()) - 1])
}

/// Which of a user's two series a feature row describes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum SeriesKind {
    Questions,
    #[default]
    Answers,
}

impl SeriesKind {
    pub fn as_str(self) -> &'static str {
        match self {
            SeriesKind::Questions => "questions",
            SeriesKind::Answers => "answers",
        }
    }

    pub fn of(self, series: &UserActivitySeries) -> &[u32] {
        match self {
            SeriesKind::Questions => &series.questions,
            SeriesKind::Answers => &series.answers,
        }
    }
}

impl std::str::FromStr for SeriesKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "questions" | "question" => Ok(SeriesKind::Questions),
            "answers" | "answer" => Ok(SeriesKind::Answers),
            _ => Err(Error::InvalidParameter(format!("unknown series kind `{s}`"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FeatureRow<T> {
    pub user_id: String,
    pub kind: SeriesKind,
    pub features: FeatureVector<T>,
}

/// Feature export: `user_id,kind,many_peaks,duplicate_max,unique_nonzero_ratio`.
pub fn write_feature_csv<T: Scalar, W: Write>(rows: &[FeatureRow<T>], output: W) -> Result<()> {
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(output);
    w.write_record(["user_id", "kind", "many_peaks", "duplicate_max", "unique_nonzero_ratio"])?;
    for row in rows {
        let f = row.features;
        w.write_record([
            row.user_id.clone(),
            row.kind.as_str().to_owned(),
            f.many_peaks.as_f64().to_string(),
            f.duplicate_max.as_f64().to_string(),
            crate::report::format_float(f.unique_nonzero_ratio.as_f64()),
        ])?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn peak_examples() {
        assert_eq!(detect_peaks(&[1, 2, 1]), vec![1]);
        assert_eq!(detect_peaks(&[0, 0, 0]), Vec::<usize>::new());
        assert_eq!(detect_peaks(&[3]), vec![0]);
        assert_eq!(detect_peaks(&[0, 2, 0, 2, 0, 5, 0]), vec![1, 3, 5]);
        assert_eq!(detect_peaks(&[0, 3, 3, 0]), Vec::<usize>::new());
        assert_eq!(detect_peaks(&[4, 0, 0, 2]), vec![0, 3]);
    }

    #[test]
    fn many_peaks_threshold_is_strict() {
        let six: Vec<u32> = (0..13).map(|t| if t % 2 == 1 { 1 } else { 0 }).collect();
        assert!(many_peaks(&six, 5));
        let five: Vec<u32> = (0..11).map(|t| if t % 2 == 1 { 1 } else { 0 }).collect();
        assert_eq!(detect_peaks(&five).len(), 5);
        assert!(!many_peaks(&five, 5));
        assert!(!many_peaks(&[0; 12], 5));
    }

    #[test]
    fn duplicate_max_examples() {
        assert!(duplicate_max(&[0, 3, 0, 3, 0]));
        assert!(!duplicate_max(&[0, 3, 0, 2, 0]));
        assert!(!duplicate_max(&[0, 4, 0]));
        assert!(!duplicate_max(&[]));
    }

    #[test]
    fn ratio_examples() {
        assert_eq!(unique_nonzero_ratio::<f64>(&[0, 2, 0, 2, 3]), 0.4);
        assert_eq!(unique_nonzero_ratio::<f64>(&[0; 10]), 0.0);
        assert_eq!(unique_nonzero_ratio::<f32>(&[1, 2, 3, 4]), 1.0);
    }

    #[test]
    fn extract_examples() {
        let mut single = vec![0u32; 12];
        single[1] = 1;
        let f = extract_features::<f64>(&single, 5);
        assert_eq!(f.to_array(), [0.0, 0.0, 1.0 / 12.0]);

        let spikes = [0, 3, 0, 3, 0, 3, 0, 3, 0, 3, 0, 3, 0];
        assert_eq!(extract_features::<f64>(&spikes, 5).to_array(), [1.0, 1.0, 1.0 / 13.0]);

        let hill = [5, 6, 7, 8, 9, 10, 9, 8, 7, 6, 5, 4];
        assert_eq!(extract_features::<f64>(&hill, 5).to_array(), [0.0, 0.0, 7.0 / 12.0]);
    }

    #[test]
    fn quantile_examples() {
        let as_series = |counts: &[usize]| -> Vec<Vec<u32>> {
            counts.iter().map(|&c| (0..2 * c + 1).map(|t| (t % 2) as u32).collect()).collect()
        };
        let uniform: Vec<usize> = (1..=100).collect();
        let s = as_series(&uniform);
        assert_eq!(peak_count_quantile(s.iter().map(Vec::as_slice), 0.9).unwrap(), 90);
        let s = as_series(&[2; 7]);
        assert_eq!(peak_count_quantile(s.iter().map(Vec::as_slice), 0.9).unwrap(), 2);
        // Nearest rank: ceil(0.9 * 10) = 9th smallest.
        let s = as_series(&[0, 0, 0, 0, 0, 0, 0, 0, 0, 5]);
        assert_eq!(peak_count_quantile(s.iter().map(Vec::as_slice), 0.9).unwrap(), 0);
        assert_eq!(peak_count_quantile(s.iter().map(Vec::as_slice), 0.95).unwrap(), 5);
        assert!(matches!(peak_count_quantile(std::iter::empty(), 0.9), Err(Error::EmptyCorpus)));
    }

    proptest! {
        #[test]
        fn reversal_leaves_features_unchanged(series in proptest::collection::vec(0u32..20, 1..80)) {
            let mut rev = series.clone();
            rev.reverse();
            prop_assert_eq!(extract_features::<f64>(&series, 5), extract_features::<f64>(&rev, 5));
        }

        #[test]
        fn peaks_are_positive_and_ratio_bounded(series in proptest::collection::vec(0u32..50, 1..80)) {
            for t in detect_peaks(&series) {
                prop_assert!(series[t] > 0);
            }
            let r: f64 = unique_nonzero_ratio(&series);
            let nonzero = series.iter().filter(|&&v| v > 0).count() as f64 / series.len() as f64;
            prop_assert!(r >= 0.0 && r <= nonzero.min(1.0));
        }
    }
}
