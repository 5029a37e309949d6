//! Walk-forward one-step evaluation.
//!
//! [`WalkForward`] is lazy: the step for target `t` touches only samples
//! before `t` (plus `series[t]` as the reported truth), and nothing past `t`
//! is read until the next step is requested.

use chrono::{DateTime, Utc};

use super::adaboost::{adaboost_fit, AdaBoostModel, AdaBoostParams};
use super::metrics::MaeTriplet;
use super::training::feature_row;
use super::tree::FeatureMatrix;
use crate::error::{Error, Result};
use crate::features::FeatureConfig;
use crate::ingest::KpiKind;
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WalkForwardConfig {
    pub features: FeatureConfig,
    pub boost: AdaBoostParams,
    /// Refit the model every this many steps (1 = every step).
    pub refit_every: usize,
}

impl Default for WalkForwardConfig {
    fn default() -> Self {
        Self { features: FeatureConfig::default(), boost: AdaBoostParams::default(), refit_every: 1 }
    }
}

impl WalkForwardConfig {
    pub fn validate(&self) -> Result<()> {
        self.features.validate()?;
        self.boost.validate()?;
        if self.refit_every == 0 {
            return Err(Error::InvalidArgument("refit_every must be at least 1".into()));
        }
        Ok(())
    }

    /// First target index that gets a prediction.
    pub fn first_target(&self) -> usize {
        self.features.window + self.boost.min_rows
    }

    pub fn prediction_count(&self, len: usize) -> usize {
        len.saturating_sub(self.first_target())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepPrediction<T> {
    pub target_index: usize,
    pub truth: T,
    pub predicted: T,
    /// Last observed value before the target.
    pub last_value: T,
}

pub struct WalkForward<'a, T> {
    series: &'a [T],
    config: WalkForwardConfig,
    seed: u64,
    next_target: usize,
    rows: FeatureMatrix<T>,
    targets: Vec<T>,
    model: Option<AdaBoostModel<T>>,
    since_refit: usize,
    failed: bool,
}

impl<'a, T: Scalar> WalkForward<'a, T> {
    pub fn new(series: &'a [T], config: &WalkForwardConfig, seed: u64) -> Result<Self> {
        config.validate()?;
        let needed = config.first_target() + 1;
        if series.len() < needed {
            return Err(Error::InsufficientData { needed, got: series.len() });
        }
        Ok(Self {
            series,
            config: *config,
            seed,
            next_target: config.first_target(),
            rows: FeatureMatrix::new(config.features.width()),
            targets: Vec::new(),
            model: None,
            since_refit: 0,
            failed: false,
        })
    }

    /// Ensures feature rows exist for every target below `t`.
    fn extend_rows(&mut self, t: usize) -> Result<()> {
        let w = self.config.features.window;
        while w + self.targets.len() < t {
            let target = w + self.targets.len();
            let y = self.series[target];
            if !y.is_finite() {
                return Err(Error::InvalidArgument(format!("non-finite value at index {target}")));
            }
            self.rows.push_row(&feature_row(self.series, target, &self.config.features)?)?;
            self.targets.push(y);
        }
        Ok(())
    }

    fn step(&mut self, t: usize) -> Result<StepPrediction<T>> {
        self.extend_rows(t)?;
        if self.model.is_none() || self.since_refit >= self.config.refit_every {
            let n = t - self.config.features.window;
            let x = self.rows.head(n);
            self.model = Some(adaboost_fit(&x, &self.targets[..n], &self.config.boost, self.seed)?);
            self.since_refit = 0;
        }
        self.since_refit += 1;
        let row = feature_row(self.series, t, &self.config.features)?;
        let model = self.model.as_ref().expect("model fitted above");
        Ok(StepPrediction {
            target_index: t,
            truth: self.series[t],
            predicted: model.predict(&row),
            last_value: self.series[t - 1],
        })
    }
}

impl<T: Scalar> Iterator for WalkForward<'_, T> {
    type Item = Result<StepPrediction<T>>;

    fn next(&mut self) -> Option<Self::Item> {
        if self.failed || self.next_target >= self.series.len() {
            return None;
        }
        let t = self.next_target;
        self.next_target += 1;
        let out = self.step(t);
        self.failed = out.is_err();
        Some(out)
    }
}

pub fn walk_forward<T: Scalar>(series: &[T], config: &WalkForwardConfig, seed: u64) -> Result<Vec<StepPrediction<T>>> {
    WalkForward::new(series, config, seed)?.collect()
}

/// One model per target step trained on the rows of every series in a group.
pub fn walk_forward_pooled<T: Scalar>(
    series: &[&[T]],
    config: &WalkForwardConfig,
    seed: u64,
) -> Result<Vec<Vec<StepPrediction<T>>>> {
    config.validate()?;
    let len = series.first().map_or(0, |s| s.len());
    if let Some(bad) = series.iter().find(|s| s.len() != len) {
        return Err(Error::LengthMismatch { left: len, right: bad.len() });
    }
    let needed = config.first_target() + 1;
    if series.is_empty() || len < needed {
        return Err(Error::InsufficientData { needed, got: len });
    }
    let w = config.features.window;
    let mut rows = FeatureMatrix::new(config.features.width());
    let mut targets = Vec::new();
    let mut out = vec![Vec::with_capacity(len - config.first_target()); series.len()];
    let mut model: Option<AdaBoostModel<T>> = None;
    let mut since_refit = 0;
    for t in config.first_target()..len {
        // rows are ordered by target index, then series index
        while targets.len() < (t - w) * series.len() {
            let target = w + targets.len() / series.len();
            let s = series[targets.len() % series.len()];
            if !s[target].is_finite() {
                return Err(Error::InvalidArgument(format!("non-finite value at index {target}")));
            }
            rows.push_row(&feature_row(s, target, &config.features)?)?;
            targets.push(s[target]);
        }
        if model.is_none() || since_refit >= config.refit_every {
            model = Some(adaboost_fit(&rows, &targets, &config.boost, seed)?);
            since_refit = 0;
        }
        since_refit += 1;
        let m = model.as_ref().expect("model fitted above");
        for (s, dest) in series.iter().zip(out.iter_mut()) {
            let row = feature_row(s, t, &config.features)?;
            dest.push(StepPrediction {
                target_index: t,
                truth: s[t],
                predicted: m.predict(&row),
                last_value: s[t - 1],
            });
        }
    }
    Ok(out)
}

/// Walk-forward output for one (cell, KPI) series.
#[derive(Debug, Clone, PartialEq)]
pub struct SeriesEvaluation<T> {
    pub cell_id: String,
    pub kpi: KpiKind,
    pub timestamps: Vec<DateTime<Utc>>,
    pub truth: Vec<T>,
    pub predicted: Vec<T>,
    pub baseline: Vec<T>,
    pub mae: MaeTriplet<T>,
}

impl<T: Scalar> SeriesEvaluation<T> {
    pub fn from_steps(
        cell_id: impl Into<String>,
        kpi: KpiKind,
        start: DateTime<Utc>,
        steps: &[StepPrediction<T>],
    ) -> Result<Self> {
        let timestamps = steps.iter().map(|s| start + chrono::TimeDelta::hours(s.target_index as i64)).collect();
        let truth: Vec<T> = steps.iter().map(|s| s.truth).collect();
        let predicted: Vec<T> = steps.iter().map(|s| s.predicted).collect();
        let baseline: Vec<T> = steps.iter().map(|s| s.last_value).collect();
        let mae = MaeTriplet::compute(&truth, &predicted, &baseline)?;
        Ok(Self { cell_id: cell_id.into(), kpi, timestamps, truth, predicted, baseline, mae })
    }

    pub fn len(&self) -> usize {
        self.truth.len()
    }

    pub fn is_empty(&self) -> bool {
        self.truth.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct EvaluationReport<T> {
    pub series: Vec<SeriesEvaluation<T>>,
}

impl<T: Scalar> EvaluationReport<T> {
    pub fn overall(&self) -> Result<MaeTriplet<T>> {
        let parts: Vec<_> = self.series.iter().map(|s| (s.mae, s.len())).collect();
        MaeTriplet::pooled(&parts)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constant_series_is_exact() {
        let s = vec![0.4f64; 80];
        let steps = walk_forward(&s, &WalkForwardConfig::default(), 5).unwrap();
        assert_eq!(steps.len(), 80 - 58);
        assert!(steps.iter().all(|p| p.predicted == 0.4 && p.last_value == 0.4));
    }

    #[test]
    fn prediction_count_formula() {
        let s: Vec<f64> = (0..168).map(|i| (i as f64 * 0.26).sin()).collect();
        let cfg = WalkForwardConfig { refit_every: 20, ..Default::default() };
        let steps = walk_forward(&s, &cfg, 1).unwrap();
        assert_eq!(steps.len(), 110);
        assert_eq!(steps[0].target_index, 58);
        assert!(walk_forward(&s[..58], &cfg, 1).is_err());
    }

    #[test]
    fn pooled_matches_shapes() {
        let a: Vec<f64> = (0..70).map(|i| (i as f64 * 0.26).sin()).collect();
        let b: Vec<f64> = (0..70).map(|i| (i as f64 * 0.26).cos()).collect();
        let out = walk_forward_pooled(&[&a, &b], &WalkForwardConfig::default(), 3).unwrap();
        assert_eq!(out.len(), 2);
        assert_eq!(out[0].len(), 12);
        assert_eq!(out[1][0].last_value, b[57]);
    }
}
