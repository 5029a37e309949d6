//! Trend-deviation scoring and event segmentation.
//!
//! `score[t] = |trend(observed)[t] − trend(reference)[t]| / max(dispersion[t], ε)`
//! where both trends come from the same moving-average filter over the same
//! span. Events are maximal same-sign stretches with score at least
//! `extend_level` that contain a run of `min_run` consecutive hours above
//! the threshold.

use serde::{Serialize, Serializer};

use super::decompose::moving_average_trend;
use super::signature::{aligned_reference, AlignedReference, ClusterSignature};
use crate::error::{Error, Result};
use crate::ingest::{fill_row, KpiKind};
use crate::scalar::{total_cmp, Scalar};
use crate::stats::median;

pub const DEFAULT_THRESHOLD: f64 = 3.0;
pub const DEFAULT_MIN_RUN: usize = 4;
pub const DEFAULT_REFERENCE_WEEKS: usize = 4;
pub const DISPERSION_EPSILON: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DetectionParams {
    pub threshold: f64,
    pub min_run: usize,
    /// Score level down to which an event extends around its core run.
    pub extend_level: f64,
    pub epsilon: f64,
}

impl Default for DetectionParams {
    fn default() -> Self {
        Self { threshold: DEFAULT_THRESHOLD, min_run: DEFAULT_MIN_RUN, extend_level: 1.0, epsilon: DISPERSION_EPSILON }
    }
}

impl DetectionParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.threshold > 0.0) || self.threshold.is_nan() {
            return Err(Error::InvalidArgument(format!("threshold must be positive, got {}", self.threshold)));
        }
        if self.min_run == 0 {
            return Err(Error::InvalidArgument("min_run must be at least 1".into()));
        }
        if !(self.epsilon > 0.0) || !(self.extend_level >= 0.0) {
            return Err(Error::InvalidArgument("epsilon must be positive and extend_level non-negative".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    Up,
    Down,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AnomalyEvent {
    pub cluster: usize,
    pub kpi: KpiKind,
    /// First and last flagged sample index, inclusive.
    pub start_hour: usize,
    pub end_hour: usize,
    #[serde(serialize_with = "serialize_score")]
    pub peak_score: f64,
    pub direction: Direction,
    /// Set when the reference had zero dispersion everywhere.
    pub infinite_score: bool,
}

impl AnomalyEvent {
    pub fn len(&self) -> usize {
        self.end_hour - self.start_hour + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Hours shared with the inclusive span `[start, end]`.
    pub fn overlap(&self, start: usize, end: usize) -> usize {
        let lo = self.start_hour.max(start);
        let hi = self.end_hour.min(end);
        if hi >= lo {
            hi - lo + 1
        } else {
            0
        }
    }
}

fn serialize_score<S: Serializer>(v: &f64, s: S) -> std::result::Result<S::Ok, S::Error> {
    if v.is_infinite() {
        s.serialize_str(if *v > 0.0 { "inf" } else { "-inf" })
    } else {
        s.serialize_f64(*v)
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize)]
#[serde(transparent)]
pub struct AnomalyReport {
    pub events: Vec<AnomalyEvent>,
}

impl AnomalyReport {
    /// Concatenates reports and orders events by (cluster, kpi, start_hour).
    pub fn merge(reports: impl IntoIterator<Item = AnomalyReport>) -> Self {
        let mut events: Vec<AnomalyEvent> = reports.into_iter().flat_map(|r| r.events).collect();
        events.sort_by_key(|e| (e.cluster, e.kpi.index(), e.start_hour));
        Self { events }
    }

    pub fn len(&self) -> usize {
        self.events.len()
    }

    pub fn is_empty(&self) -> bool {
        self.events.is_empty()
    }
}

/// Per-sample intermediate values of one scoring pass.
#[derive(Debug, Clone, PartialEq)]
pub struct TrendScores<T> {
    pub observed_trend: Vec<T>,
    pub reference_trend: Vec<T>,
    pub deviation: Vec<T>,
    pub score: Vec<T>,
    pub infinite: bool,
}

/// Median across cells at every hour, ignoring missing samples.
pub fn cluster_median_series<T: Scalar, S: AsRef<[Option<T>]>>(rows: &[S]) -> Result<Vec<Option<T>>> {
    let len = rows.first().map(|r| r.as_ref().len()).ok_or(Error::InsufficientData { needed: 1, got: 0 })?;
    if let Some(bad) = rows.iter().find(|r| r.as_ref().len() != len) {
        return Err(Error::LengthMismatch { left: len, right: bad.as_ref().len() });
    }
    let mut column = Vec::with_capacity(rows.len());
    Ok((0..len)
        .map(|t| {
            column.clear();
            column.extend(rows.iter().filter_map(|r| r.as_ref()[t]));
            median(&column)
        })
        .collect())
}

pub fn trend_scores<T: Scalar>(series: &[T], aligned: &AlignedReference<T>, epsilon: f64) -> Result<TrendScores<T>> {
    if series.len() != aligned.len() {
        return Err(Error::LengthMismatch { left: series.len(), right: aligned.len() });
    }
    let observed_trend = moving_average_trend(series)?;
    let reference_trend = moving_average_trend(&aligned.reference)?;
    let deviation: Vec<T> = observed_trend.iter().zip(&reference_trend).map(|(&o, &r)| o - r).collect();
    let infinite = aligned.dispersion.iter().all(|d| *d == T::zero());
    let eps = T::lit(epsilon);
    let score = deviation
        .iter()
        .zip(&aligned.dispersion)
        .map(|(&d, &s)| {
            if infinite {
                if d == T::zero() {
                    T::zero()
                } else {
                    T::infinity()
                }
            } else {
                d.abs() / s.max(eps)
            }
        })
        .collect();
    Ok(TrendScores { observed_trend, reference_trend, deviation, score, infinite })
}

/// Turns per-sample scores into events.
pub fn segment_events<T: Scalar>(
    scores: &TrendScores<T>,
    cluster: usize,
    kpi: KpiKind,
    params: &DetectionParams,
) -> Vec<AnomalyEvent> {
    let threshold = T::lit(params.threshold);
    let extend = T::lit(params.extend_level.min(params.threshold));
    let n = scores.score.len();
    let sign = |t: usize| scores.deviation[t] > T::zero();
    let mut events = Vec::new();
    let mut t = 0;
    while t < n {
        if !(scores.score[t] >= extend) || scores.deviation[t] == T::zero() {
            t += 1;
            continue;
        }
        let up = sign(t);
        let start = t;
        while t < n && scores.score[t] >= extend && scores.deviation[t] != T::zero() && sign(t) == up {
            t += 1;
        }
        let end = t - 1;
        let (mut run, mut longest) = (0, 0);
        for s in start..=end {
            run = if scores.score[s] > threshold { run + 1 } else { 0 };
            longest = longest.max(run);
        }
        if longest >= params.min_run {
            let peak = scores.score[start..=end].iter().copied().max_by(total_cmp).expect("non-empty segment");
            events.push(AnomalyEvent {
                cluster,
                kpi,
                start_hour: start,
                end_hour: end,
                peak_score: peak.to_f64_lossy(),
                direction: if up { Direction::Up } else { Direction::Down },
                infinite_score: scores.infinite && peak.is_infinite(),
            });
        }
    }
    events
}

pub fn detect_aligned<T: Scalar>(
    cluster: usize,
    kpi: KpiKind,
    series: &[T],
    aligned: &AlignedReference<T>,
    params: &DetectionParams,
) -> Result<(AnomalyReport, TrendScores<T>)> {
    params.validate()?;
    let scores = trend_scores(series, aligned, params.epsilon)?;
    let events = segment_events(&scores, cluster, kpi, params);
    Ok((AnomalyReport { events }, scores))
}

/// Scores `series`, whose first sample sits at hour-of-week `how_offset`,
/// against a fixed signature.
pub fn detect_anomalies<T: Scalar>(
    series: &[T],
    signature: &ClusterSignature<T>,
    how_offset: usize,
    params: &DetectionParams,
) -> Result<AnomalyReport> {
    let aligned = signature.tile(how_offset, series.len());
    detect_aligned(signature.cluster(), signature.kpi(), series, &aligned, params).map(|(r, _)| r)
}

/// Everything produced while scoring one (cluster, KPI) pair.
#[derive(Debug, Clone, PartialEq)]
pub struct ClusterDetection<T> {
    /// Cluster median series with gaps filled.
    pub observed: Vec<T>,
    pub aligned: AlignedReference<T>,
    pub scores: TrendScores<T>,
    pub report: AnomalyReport,
}

/// Scores the median of `rows` against references built from the rows
/// themselves (see [`aligned_reference`]).
pub fn detect_cluster<T: Scalar, S: AsRef<[Option<T>]>>(
    cluster: usize,
    kpi: KpiKind,
    rows: &[S],
    how_offset: usize,
    reference_weeks: usize,
    params: &DetectionParams,
) -> Result<ClusterDetection<T>> {
    let mut median_series = cluster_median_series(rows)?;
    if fill_row(&mut median_series) == 0 && median_series.iter().all(Option::is_none) {
        return Err(Error::InsufficientData { needed: 1, got: 0 });
    }
    let observed: Vec<T> = median_series.into_iter().map(|v| v.expect("filled")).collect();
    let aligned = aligned_reference(cluster, kpi, rows, how_offset, reference_weeks)?;
    let (report, scores) = detect_aligned(cluster, kpi, &observed, &aligned, params)?;
    Ok(ClusterDetection { observed, aligned, scores, report })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ingest::HOURS_PER_WEEK;
    use crate::signatures::cluster_signature;

    fn base() -> Vec<f64> {
        (0..HOURS_PER_WEEK).map(|i| 0.5 + 0.3 * (i as f64 * std::f64::consts::TAU / 24.0).sin()).collect()
    }

    fn aligned(disp: f64) -> AlignedReference<f64> {
        AlignedReference { reference: base(), dispersion: vec![disp; HOURS_PER_WEEK] }
    }

    #[test]
    fn identical_week_has_no_events() {
        let rows: Vec<Vec<Option<f64>>> = vec![base().into_iter().map(Some).collect(); 3];
        let sig = cluster_signature(0, KpiKind::Hosr, &rows, 0).unwrap();
        let r = detect_anomalies(&base(), &sig, 0, &DetectionParams::default()).unwrap();
        assert!(r.is_empty());
    }

    #[test]
    fn shift_gives_one_event() {
        let mut s = base();
        for v in &mut s[60..132] {
            *v += 0.5;
        }
        let (r, _) = detect_aligned(1, KpiKind::Hosr, &s, &aligned(0.1), &DetectionParams::default()).unwrap();
        assert_eq!(r.len(), 1);
        let e = &r.events[0];
        assert_eq!(e.direction, Direction::Up);
        assert!(e.overlap(60, 131) as f64 >= 0.8 * 72.0);
    }

    #[test]
    fn short_spike_is_gated() {
        let mut s = base();
        s[80] += 1.0;
        let (r, sc) = detect_aligned(0, KpiKind::Hosr, &s, &aligned(0.001), &DetectionParams::default()).unwrap();
        assert!(sc.score.iter().any(|&x| x > 3.0));
        // a single-sample spike spreads over the filter but stays one segment
        assert!(r.len() <= 1);
        let params = DetectionParams { min_run: 30, ..Default::default() };
        let (r, _) = detect_aligned(0, KpiKind::Hosr, &s, &aligned(0.001), &params).unwrap();
        assert!(r.is_empty());
    }

    #[test]
    fn zero_dispersion_gives_infinite_score() {
        let mut s = base();
        for v in &mut s[60..100] {
            *v -= 0.2;
        }
        let (r, _) = detect_aligned(0, KpiKind::Hosr, &s, &aligned(0.0), &DetectionParams::default()).unwrap();
        assert_eq!(r.len(), 1);
        assert!(r.events[0].infinite_score);
        assert_eq!(r.events[0].direction, Direction::Down);
        assert!(r.events[0].peak_score.is_infinite());
    }
}
