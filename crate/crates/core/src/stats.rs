//! Small order-statistics helpers shared across modules.

use crate::scalar::{total_cmp, Scalar};

/// Median of a non-empty slice; mean of the two middle values for even length.
pub fn median<T: Scalar>(values: &[T]) -> Option<T> {
    if values.is_empty() {
        return None;
    }
    let mut sorted = values.to_vec();
    sorted.sort_by(total_cmp);
    Some(median_sorted(&sorted))
}

pub(crate) fn median_sorted<T: Scalar>(sorted: &[T]) -> T {
    let n = sorted.len();
    if n % 2 == 1 {
        sorted[n / 2]
    } else {
        (sorted[n / 2 - 1] + sorted[n / 2]) / T::lit(2.0)
    }
}

/// Median absolute deviation scaled by 1.4826 so it estimates a normal sigma.
pub fn scaled_mad<T: Scalar>(values: &[T]) -> Option<T> {
    let med = median(values)?;
    let deviations: Vec<T> = values.iter().map(|v| (*v - med).abs()).collect();
    median(&deviations).map(|m| m * T::lit(1.4826))
}

/// Quantile with linear interpolation between closest ranks (`h = (n-1) q`).
pub fn quantile_linear<T: Scalar>(values: &[T], q: f64) -> Option<T> {
    if values.is_empty() || !(0.0..=1.0).contains(&q) {
        return None;
    }
    let mut sorted = values.to_vec();
    sorted.sort_by(total_cmp);
    let h = (sorted.len() - 1) as f64 * q;
    let lo = h.floor() as usize;
    let hi = h.ceil() as usize;
    let frac = T::lit(h - lo as f64);
    Some(sorted[lo] + (sorted[hi] - sorted[lo]) * frac)
}
