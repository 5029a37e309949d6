use super::ar::fit_ar;
use super::dynamics::{mean_abs_change, mean_autocorrelation};
use super::stats::{distribution_features, sample_statistics};
use crate::error::{Error, Result};
use crate::scalar::Scalar;

pub const DEFAULT_WINDOW: usize = 48;
pub const DEFAULT_MAX_LAG: usize = 20;
/// Number of slots besides the AR coefficients.
pub const FIXED_FEATURES: usize = 13;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FeatureConfig {
    /// Samples per window (W).
    pub window: usize,
    /// Maximum AR lag; also the number of coefficient slots.
    pub max_lag: usize,
}

impl Default for FeatureConfig {
    fn default() -> Self {
        Self { window: DEFAULT_WINDOW, max_lag: DEFAULT_MAX_LAG }
    }
}

impl FeatureConfig {
    pub fn new(window: usize, max_lag: usize) -> Result<Self> {
        let c = Self { window, max_lag };
        c.validate()?;
        Ok(c)
    }

    pub fn validate(&self) -> Result<()> {
        if self.window < 2 {
            return Err(Error::InvalidArgument(format!("window {} < 2", self.window)));
        }
        if self.max_lag < 1 {
            return Err(Error::InvalidArgument("max_lag must be >= 1".into()));
        }
        Ok(())
    }

    /// Lag actually fitted: `min(max_lag, (window - 1) / 2)`.
    pub fn effective_lag(&self) -> usize {
        self.max_lag.min((self.window - 1) / 2)
    }

    pub fn width(&self) -> usize {
        FIXED_FEATURES + self.max_lag
    }

    pub fn feature_names(&self) -> Vec<String> {
        let mut names: Vec<String> = [
            "max",
            "min",
            "mean",
            "variance",
            "skewness",
            "kurtosis",
            "median",
            "var_gt_std",
            "count_above_median",
            "count_below_median",
            "ar_intercept",
        ]
        .iter()
        .map(|s| s.to_string())
        .collect();
        names.extend((1..=self.max_lag).map(|k| format!("ar_coeff_{k}")));
        names.push("mean_abs_change".into());
        names.push("mean_autocorrelation".into());
        names
    }
}

/// Conditions hit while extracting a vector; the values stay finite.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct FeatureFlags {
    pub constant: bool,
    pub short_window: bool,
    pub ar_singular: bool,
}

/// Fixed-order feature encoding of one window:
///
/// `max, min, mean, variance, skewness, kurtosis, median, var_gt_std,
/// count_above_median, count_below_median, ar_intercept,
/// ar_coeff_1..ar_coeff_{max_lag}, mean_abs_change, mean_autocorrelation`
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureVector<T> {
    pub values: Vec<T>,
    pub max_lag: usize,
    pub flags: FeatureFlags,
}

impl<T: Scalar> FeatureVector<T> {
    pub const MAX: usize = 0;
    pub const MIN: usize = 1;
    pub const MEAN: usize = 2;
    pub const VARIANCE: usize = 3;
    pub const SKEWNESS: usize = 4;
    pub const KURTOSIS: usize = 5;
    pub const MEDIAN: usize = 6;
    pub const VAR_GT_STD: usize = 7;
    pub const COUNT_ABOVE: usize = 8;
    pub const COUNT_BELOW: usize = 9;
    pub const AR_INTERCEPT: usize = 10;
    pub const AR_COEFFS: usize = 11;

    pub fn width(&self) -> usize {
        self.values.len()
    }

    pub fn as_slice(&self) -> &[T] {
        &self.values
    }

    pub fn ar_coefficients(&self) -> &[T] {
        &self.values[Self::AR_COEFFS..Self::AR_COEFFS + self.max_lag]
    }

    pub fn mean_abs_change(&self) -> T {
        self.values[Self::AR_COEFFS + self.max_lag]
    }

    pub fn mean_autocorrelation(&self) -> T {
        self.values[Self::AR_COEFFS + self.max_lag + 1]
    }
}

pub fn extract_features<T: Scalar>(window: &[T], config: &FeatureConfig) -> Result<FeatureVector<T>> {
    config.validate()?;
    if window.len() != config.window {
        return Err(if window.len() < config.window {
            Error::InsufficientData { needed: config.window, got: window.len() }
        } else {
            Error::LengthMismatch { left: window.len(), right: config.window }
        });
    }
    if window.iter().any(|v| !v.is_finite()) {
        return Err(Error::InvalidArgument("feature window contains non-finite values".into()));
    }
    let stats = sample_statistics(window)?;
    let dist = distribution_features(window)?;
    let ar = fit_ar(window, config.effective_lag())?;

    let mut values = Vec::with_capacity(config.width());
    values.extend([
        stats.max,
        stats.min,
        stats.mean,
        stats.variance,
        stats.skewness,
        stats.kurtosis,
        stats.median,
        if dist.variance_gt_std { T::one() } else { T::zero() },
        T::from_count(dist.count_above_median),
        T::from_count(dist.count_below_median),
        ar.intercept,
    ]);
    values.extend(ar.coefficients.iter().copied());
    values.resize(FIXED_FEATURES - 2 + config.max_lag, T::zero());
    values.push(mean_abs_change(window));
    values.push(mean_autocorrelation(window));
    debug_assert_eq!(values.len(), config.width());

    if values.iter().any(|v| !v.is_finite()) {
        return Err(Error::InvalidArgument("feature extraction produced a non-finite value".into()));
    }
    Ok(FeatureVector {
        values,
        max_lag: config.max_lag,
        flags: FeatureFlags { constant: stats.constant, short_window: stats.short_window, ar_singular: ar.singular },
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_width_is_33() {
        let c = FeatureConfig::default();
        assert_eq!(c.width(), 33);
        assert_eq!(c.feature_names().len(), 33);
        let v = extract_features(&(0..48).map(|i| (i as f64 * 0.3).sin()).collect::<Vec<_>>(), &c).unwrap();
        assert_eq!(v.width(), 33);
    }

    #[test]
    fn effective_lag_clamps_to_window() {
        assert_eq!(FeatureConfig::new(10, 20).unwrap().effective_lag(), 4);
        assert_eq!(FeatureConfig::default().effective_lag(), 20);
        assert!(FeatureConfig::new(1, 20).is_err());
        assert!(FeatureConfig::new(10, 0).is_err());
    }

    #[test]
    fn constant_window_has_zero_dynamics() {
        let c = FeatureConfig::default();
        let v = extract_features(&[0.7f64; 48], &c).unwrap();
        assert!(v.flags.constant);
        assert_eq!(v.values[FeatureVector::<f64>::VAR_GT_STD], 0.0);
        assert!(v.ar_coefficients().iter().all(|c| c.abs() < 1e-12));
        assert_eq!(v.mean_abs_change(), 0.0);
        assert_eq!(v.mean_autocorrelation(), 0.0);
        assert!((v.values[FeatureVector::<f64>::AR_INTERCEPT] - 0.7).abs() < 1e-12);
    }

    #[test]
    fn short_window_is_rejected() {
        let c = FeatureConfig::default();
        assert!(matches!(extract_features(&[1.0; 47], &c), Err(Error::InsufficientData { .. })));
    }

    #[test]
    fn coefficients_beyond_effective_lag_are_zero_padded() {
        let c = FeatureConfig::new(10, 20).unwrap();
        let w: Vec<f64> = (0..10).map(|i| ((i * 7) % 5) as f64).collect();
        let v = extract_features(&w, &c).unwrap();
        assert_eq!(v.width(), 33);
        assert!(v.ar_coefficients()[4..].iter().all(|&c| c == 0.0));
    }

    #[test]
    fn single_precision_works() {
        let w: Vec<f32> = (0..48).map(|i| (i as f32 * 0.5).cos()).collect();
        let v = extract_features(&w, &FeatureConfig::default()).unwrap();
        assert!(v.values.iter().all(|x| x.is_finite()));
    }
}
