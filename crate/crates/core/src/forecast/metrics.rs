//! Mean absolute error and the three comparisons reported per series.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::scalar::Scalar;

pub fn mae<T: Scalar>(a: &[T], b: &[T]) -> Result<T> {
    if a.len() != b.len() {
        return Err(Error::LengthMismatch { left: a.len(), right: b.len() });
    }
    if a.is_empty() {
        return Err(Error::InsufficientData { needed: 1, got: 0 });
    }
    let sum: T = a.iter().zip(b).map(|(&x, &y)| (x - y).abs()).sum();
    Ok(sum / T::from_count(a.len()))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MaeTriplet<T> {
    pub model_vs_true: T,
    pub baseline_vs_true: T,
    pub model_vs_baseline: T,
}

impl<T: Scalar> MaeTriplet<T> {
    pub fn compute(truth: &[T], predicted: &[T], baseline: &[T]) -> Result<Self> {
        Ok(Self {
            model_vs_true: mae(predicted, truth)?,
            baseline_vs_true: mae(baseline, truth)?,
            model_vs_baseline: mae(predicted, baseline)?,
        })
    }

    /// Sample-weighted average of several triplets.
    pub fn pooled(parts: &[(Self, usize)]) -> Result<Self> {
        let n: usize = parts.iter().map(|p| p.1).sum();
        if n == 0 {
            return Err(Error::InsufficientData { needed: 1, got: 0 });
        }
        let avg = |f: fn(&Self) -> T| parts.iter().map(|(m, c)| f(m) * T::from_count(*c)).sum::<T>() / T::from_count(n);
        Ok(Self {
            model_vs_true: avg(|m| m.model_vs_true),
            baseline_vs_true: avg(|m| m.baseline_vs_true),
            model_vs_baseline: avg(|m| m.model_vs_baseline),
        })
    }
}
