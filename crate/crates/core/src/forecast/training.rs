//! Supervised rows built from sliding windows of one series.

use super::tree::FeatureMatrix;
use crate::error::{Error, Result};
use crate::features::{extract_features, FeatureConfig};
use crate::scalar::Scalar;

#[derive(Debug, Clone, PartialEq)]
pub struct TrainingSet<T> {
    pub features: FeatureMatrix<T>,
    pub targets: Vec<T>,
    /// Position of each target in the source series; strictly increasing.
    pub target_indices: Vec<usize>,
    pub config: FeatureConfig,
}

impl<T: Scalar> TrainingSet<T> {
    pub fn len(&self) -> usize {
        self.targets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.targets.is_empty()
    }
}

/// Features of the `W` samples before `target`.
pub fn feature_row<T: Scalar>(series: &[T], target: usize, config: &FeatureConfig) -> Result<Vec<T>> {
    if target < config.window || target > series.len() {
        return Err(Error::InvalidArgument(format!(
            "target index {target} needs {} preceding samples within a series of length {}",
            config.window,
            series.len()
        )));
    }
    Ok(extract_features(&series[target - config.window..target], config)?.values)
}

/// Row `j` pairs the features of `series[j..j+W]` with `series[j+W]`.
pub fn build_training_set<T: Scalar>(series: &[T], config: &FeatureConfig) -> Result<TrainingSet<T>> {
    config.validate()?;
    if series.len() < config.window + 1 {
        return Err(Error::InsufficientData { needed: config.window + 1, got: series.len() });
    }
    let mut features = FeatureMatrix::new(config.width());
    let mut targets = Vec::with_capacity(series.len() - config.window);
    let mut target_indices = Vec::with_capacity(series.len() - config.window);
    for t in config.window..series.len() {
        if !series[t].is_finite() {
            return Err(Error::InvalidArgument(format!("non-finite target at index {t}")));
        }
        features.push_row(&feature_row(series, t, config)?)?;
        targets.push(series[t]);
        target_indices.push(t);
    }
    Ok(TrainingSet { features, targets, target_indices, config: *config })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn row_counts() {
        let cfg = FeatureConfig::default();
        let s: Vec<f64> = (0..168).map(|i| (i as f64 * 0.26).sin()).collect();
        let ts = build_training_set(&s, &cfg).unwrap();
        assert_eq!(ts.len(), 120);
        assert_eq!(ts.targets, s[48..].to_vec());
        assert_eq!(build_training_set(&s[..49], &cfg).unwrap().len(), 1);
        assert!(build_training_set(&s[..48], &cfg).is_err());
    }
}
