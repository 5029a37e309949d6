//! Hour-of-week reference profiles for a cluster.
//!
//! Sample `i` of a row sits at hour-of-week `(offset + i) % 168`, and week
//! `w` covers indices `168 w .. 168 (w + 1)`.

use crate::error::{Error, Result};
use crate::ingest::{KpiKind, HOURS_PER_WEEK};
use crate::scalar::Scalar;
use crate::stats::{median, scaled_mad};

const HOURS_PER_DAY: usize = 24;

#[derive(Debug, Clone, PartialEq)]
pub struct ClusterSignature<T> {
    cluster: usize,
    kpi: KpiKind,
    reference: Vec<T>,
    dispersion: Vec<T>,
    interpolated: Vec<bool>,
}

impl<T: Scalar> ClusterSignature<T> {
    /// Builds a signature from 168 sample buckets indexed by hour-of-week.
    /// Empty buckets are filled by circular linear interpolation and flagged.
    pub fn from_buckets(cluster: usize, kpi: KpiKind, buckets: &[Vec<T>]) -> Result<Self> {
        if buckets.len() != HOURS_PER_WEEK {
            return Err(Error::LengthMismatch { left: buckets.len(), right: HOURS_PER_WEEK });
        }
        let mut reference: Vec<Option<T>> = buckets.iter().map(|b| median(b)).collect();
        let mut dispersion: Vec<Option<T>> = buckets.iter().map(|b| scaled_mad(b)).collect();
        let interpolated: Vec<bool> = reference.iter().map(Option::is_none).collect();
        if interpolated.iter().all(|&m| m) {
            return Err(Error::InsufficientData { needed: 1, got: 0 });
        }
        fill_circular(&mut reference);
        fill_circular(&mut dispersion);
        Ok(Self {
            cluster,
            kpi,
            reference: reference.into_iter().map(|v| v.expect("filled")).collect(),
            dispersion: dispersion.into_iter().map(|v| v.expect("filled").max(T::zero())).collect(),
            interpolated,
        })
    }

    pub fn cluster(&self) -> usize {
        self.cluster
    }

    pub fn kpi(&self) -> KpiKind {
        self.kpi
    }

    pub fn reference(&self) -> &[T] {
        &self.reference
    }

    pub fn dispersion(&self) -> &[T] {
        &self.dispersion
    }

    /// Hours of week for which no sample existed.
    pub fn interpolated_hours(&self) -> Vec<usize> {
        (0..HOURS_PER_WEEK).filter(|&h| self.interpolated[h]).collect()
    }

    /// Reference and dispersion laid out along a span of `len` samples
    /// whose first sample has hour-of-week `how_offset`.
    pub fn tile(&self, how_offset: usize, len: usize) -> AlignedReference<T> {
        let idx = |i: usize| (how_offset + i) % HOURS_PER_WEEK;
        AlignedReference {
            reference: (0..len).map(|i| self.reference[idx(i)]).collect(),
            dispersion: (0..len).map(|i| self.dispersion[idx(i)]).collect(),
        }
    }
}

/// Reference values paired index by index with a scored series.
#[derive(Debug, Clone, PartialEq)]
pub struct AlignedReference<T> {
    pub reference: Vec<T>,
    pub dispersion: Vec<T>,
}

impl<T: Scalar> AlignedReference<T> {
    pub fn len(&self) -> usize {
        self.reference.len()
    }

    pub fn is_empty(&self) -> bool {
        self.reference.is_empty()
    }
}

fn fill_circular<T: Scalar>(values: &mut [Option<T>]) {
    let n = values.len();
    let present: Vec<usize> = (0..n).filter(|&i| values[i].is_some()).collect();
    if present.is_empty() || present.len() == n {
        return;
    }
    for (k, &a) in present.iter().enumerate() {
        let b = present[(k + 1) % present.len()];
        let gap = (b + n - a) % n;
        let gap = if gap == 0 { n } else { gap };
        let (va, vb) = (values[a].unwrap(), values[b].unwrap());
        for s in 1..gap {
            let frac = T::from_count(s) / T::from_count(gap);
            values[(a + s) % n] = Some(va + (vb - va) * frac);
        }
    }
}

fn check_rows<T, S: AsRef<[Option<T>]>>(rows: &[S]) -> Result<usize> {
    let len = rows.first().map(|r| r.as_ref().len()).ok_or(Error::InsufficientData { needed: 1, got: 0 })?;
    if let Some(bad) = rows.iter().find(|r| r.as_ref().len() != len) {
        return Err(Error::LengthMismatch { left: len, right: bad.as_ref().len() });
    }
    Ok(len)
}

/// Samples of the listed weeks, bucketed by hour-of-week.
fn week_buckets<T: Scalar, S: AsRef<[Option<T>]>>(rows: &[S], how_offset: usize, weeks: &[usize]) -> Vec<Vec<T>> {
    let mut buckets = vec![Vec::new(); HOURS_PER_WEEK];
    for row in rows {
        let row = row.as_ref();
        for &w in weeks {
            let lo = w * HOURS_PER_WEEK;
            for i in lo..(lo + HOURS_PER_WEEK).min(row.len()) {
                if let Some(v) = row[i] {
                    buckets[(how_offset + i) % HOURS_PER_WEEK].push(v);
                }
            }
        }
    }
    buckets
}

/// Median and scaled MAD per hour-of-week over every (cell, complete week) sample.
pub fn cluster_signature<T: Scalar, S: AsRef<[Option<T>]>>(
    cluster: usize,
    kpi: KpiKind,
    rows: &[S],
    how_offset: usize,
) -> Result<ClusterSignature<T>> {
    let len = check_rows(rows)?;
    let weeks = len / HOURS_PER_WEEK;
    if weeks == 0 {
        return Err(Error::InsufficientData { needed: HOURS_PER_WEEK, got: len });
    }
    signature_from_weeks(cluster, kpi, rows, how_offset, &(0..weeks).collect::<Vec<_>>())
}

pub fn signature_from_weeks<T: Scalar, S: AsRef<[Option<T>]>>(
    cluster: usize,
    kpi: KpiKind,
    rows: &[S],
    how_offset: usize,
    weeks: &[usize],
) -> Result<ClusterSignature<T>> {
    check_rows(rows)?;
    ClusterSignature::from_buckets(cluster, kpi, &week_buckets(rows, how_offset, weeks))
}

/// Signature of week `week` with day-of-week `day` held out: hours of that
/// day use the samples of the other six days at the same hour of day.
pub fn daily_holdout_signature<T: Scalar, S: AsRef<[Option<T>]>>(
    cluster: usize,
    kpi: KpiKind,
    rows: &[S],
    how_offset: usize,
    week: usize,
    day: usize,
) -> Result<ClusterSignature<T>> {
    check_rows(rows)?;
    if day >= 7 {
        return Err(Error::InvalidArgument(format!("day of week {day} out of range")));
    }
    let mut buckets = week_buckets(rows, how_offset, &[week]);
    let mut by_hour: Vec<Vec<T>> = vec![Vec::new(); HOURS_PER_DAY];
    for (h, b) in buckets.iter().enumerate() {
        if h / HOURS_PER_DAY != day {
            by_hour[h % HOURS_PER_DAY].extend_from_slice(b);
        }
    }
    for (hod, samples) in by_hour.into_iter().enumerate() {
        buckets[day * HOURS_PER_DAY + hod] = samples;
    }
    ClusterSignature::from_buckets(cluster, kpi, &buckets)
}

/// Reference for every sample of the rows: week `w > 0` is scored against
/// up to `reference_weeks` preceding complete weeks; the first week (and any
/// data shorter than two weeks) against leave-one-day-out profiles of itself.
/// A trailing partial week counts as its own week.
pub fn aligned_reference<T: Scalar, S: AsRef<[Option<T>]>>(
    cluster: usize,
    kpi: KpiKind,
    rows: &[S],
    how_offset: usize,
    reference_weeks: usize,
) -> Result<AlignedReference<T>> {
    let len = check_rows(rows)?;
    if reference_weeks == 0 {
        return Err(Error::InvalidArgument("reference_weeks must be at least 1".into()));
    }
    let mut out = AlignedReference { reference: Vec::with_capacity(len), dispersion: Vec::with_capacity(len) };
    let n_weeks = len.div_ceil(HOURS_PER_WEEK);
    for w in 0..n_weeks {
        let lo = w * HOURS_PER_WEEK;
        let hi = (lo + HOURS_PER_WEEK).min(len);
        if w == 0 {
            let mut days: Vec<Option<ClusterSignature<T>>> = vec![None; 7];
            for i in lo..hi {
                let how = (how_offset + i) % HOURS_PER_WEEK;
                let day = how / HOURS_PER_DAY;
                if days[day].is_none() {
                    days[day] = Some(daily_holdout_signature(cluster, kpi, rows, how_offset, 0, day)?);
                }
                let sig = days[day].as_ref().expect("built above");
                out.reference.push(sig.reference[how]);
                out.dispersion.push(sig.dispersion[how]);
            }
        } else {
            let weeks: Vec<usize> = (w.saturating_sub(reference_weeks)..w).collect();
            let sig = signature_from_weeks(cluster, kpi, rows, how_offset, &weeks)?;
            let tile = sig.tile((how_offset + lo) % HOURS_PER_WEEK, hi - lo);
            out.reference.extend(tile.reference);
            out.dispersion.extend(tile.dispersion);
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn week(f: impl Fn(usize) -> f64) -> Vec<Option<f64>> {
        (0..HOURS_PER_WEEK).map(|i| Some(f(i))).collect()
    }

    #[test]
    fn identical_cells() {
        let row = week(|i| (i as f64 * 0.1).sin());
        let sig = cluster_signature(0, KpiKind::Hosr, &[row.clone(), row.clone()], 0).unwrap();
        for (h, v) in row.iter().enumerate().take(HOURS_PER_WEEK) {
            assert_eq!(sig.reference()[h], v.unwrap());
            assert_eq!(sig.dispersion()[h], 0.0);
        }
    }

    #[test]
    fn offset_cells_give_pointwise_median() {
        let a = week(|i| i as f64);
        let b = week(|i| i as f64 + 2.0);
        let sig = cluster_signature(0, KpiKind::Hosr, &[a, b], 0).unwrap();
        assert_eq!(sig.reference()[5], 6.0);
    }

    #[test]
    fn missing_hour_interpolated() {
        let mut a = week(|i| i as f64);
        a[10] = None;
        let sig = cluster_signature(0, KpiKind::Hosr, &[a], 0).unwrap();
        assert_eq!(sig.interpolated_hours(), vec![10]);
        assert!((sig.reference()[10] - 10.0).abs() < 1e-12);
    }

    #[test]
    fn offset_maps_hours() {
        let a = week(|i| i as f64);
        let sig = cluster_signature(0, KpiKind::Hosr, &[a], 5).unwrap();
        assert_eq!(sig.reference()[5], 0.0);
        assert_eq!(sig.tile(5, 3).reference, vec![0.0, 1.0, 2.0]);
    }

    #[test]
    fn holdout_uses_other_days() {
        let a = week(|i| (i / 24) as f64 * 10.0 + (i % 24) as f64);
        let sig = daily_holdout_signature(0, KpiKind::Hosr, &[a], 0, 0, 2).unwrap();
        // day 2 hour 3: median of days {0,1,3,4,5,6} at hour 3
        assert_eq!(sig.reference()[2 * 24 + 3], 35.0 + 3.0);
        assert_eq!(sig.reference()[4 * 24 + 3], 43.0);
    }

    #[test]
    fn aligned_uses_previous_weeks() {
        let two: Vec<Option<f64>> = (0..2 * HOURS_PER_WEEK).map(|i| Some((i % HOURS_PER_WEEK) as f64)).collect();
        let al = aligned_reference(0, KpiKind::Hosr, &[two], 0, 4).unwrap();
        assert_eq!(al.len(), 336);
        assert_eq!(&al.reference[168..], &(0..168).map(|i| i as f64).collect::<Vec<_>>()[..]);
    }
}
