use serde::Serialize;

use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TrendFit<T> {
    /// Normalized activity per month.
    pub slope: T,
    /// Constant (or too short) input; the slope is reported as 0.
    pub degenerate: bool,
}

/// Least-squares slope of min-max normalized totals against the month index.
pub fn trend_slope<T: Scalar>(totals: &[T]) -> TrendFit<T> {
    let n = totals.len();
    let lo = totals.iter().copied().fold(T::infinity(), T::min);
    let hi = totals.iter().copied().fold(T::neg_infinity(), T::max);
    if n < 2 || hi.partial_cmp(&lo) != Some(std::cmp::Ordering::Greater) {
        return TrendFit { slope: T::zero(), degenerate: true };
    }
    let range = hi - lo;
    let x_mean = T::from_count(n - 1) / T::of(2.0);
    let y: Vec<T> = totals.iter().map(|&v| (v - lo) / range).collect();
    let y_mean = y.iter().copied().sum::<T>() / T::from_count(n);
    let (mut sxy, mut sxx) = (T::zero(), T::zero());
    for (i, &yi) in y.iter().enumerate() {
        let dx = T::from_count(i) - x_mean;
        sxy = sxy + dx * (yi - y_mean);
        sxx = sxx + dx * dx;
    }
    TrendFit { slope: sxy / sxx, degenerate: false }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_line() {
        let fit = trend_slope(&[0.0f64, 5.0, 10.0]);
        assert!((fit.slope - 0.5).abs() < 1e-15);
        assert!(!fit.degenerate);
    }

    #[test]
    fn decreasing_is_negative() {
        assert!(trend_slope(&[9.0f32, 7.0, 4.0, 1.0]).slope < 0.0);
    }

    #[test]
    fn constant_is_degenerate() {
        let fit = trend_slope(&[3.0, 3.0, 3.0]);
        assert_eq!(fit.slope, 0.0);
        assert!(fit.degenerate);
        assert!(trend_slope::<f64>(&[1.0]).degenerate);
    }
}
