//! Dense cells x hours KPI matrices with explicit missing markers.

use std::collections::HashMap;

use chrono::{DateTime, Datelike, TimeDelta, Timelike, Utc};

use super::kpi::{KpiKind, KpiSample};
use super::records::is_hour_aligned;
use crate::error::{Error, Result};
use crate::scalar::Scalar;

pub const HOURS_PER_WEEK: usize = 168;

/// One KPI for N cells over m hourly samples, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct KpiMatrix<T> {
    kind: KpiKind,
    cell_ids: Vec<String>,
    start: DateTime<Utc>,
    hours: usize,
    values: Vec<Option<T>>,
}

impl<T: Scalar> KpiMatrix<T> {
    /// Builds a matrix from explicit rows; every row must have `hours` entries.
    pub fn from_rows(
        kind: KpiKind,
        cell_ids: Vec<String>,
        start: DateTime<Utc>,
        rows: Vec<Vec<Option<T>>>,
    ) -> Result<Self> {
        if cell_ids.len() != rows.len() {
            return Err(Error::LengthMismatch { left: cell_ids.len(), right: rows.len() });
        }
        let hours = rows.first().map_or(0, Vec::len);
        if hours < 2 {
            return Err(Error::InsufficientData { needed: 2, got: hours });
        }
        if let Some(bad) = rows.iter().find(|r| r.len() != hours) {
            return Err(Error::LengthMismatch { left: hours, right: bad.len() });
        }
        Ok(Self { kind, cell_ids, start, hours, values: rows.into_iter().flatten().collect() })
    }

    pub fn kind(&self) -> KpiKind {
        self.kind
    }

    pub fn cell_ids(&self) -> &[String] {
        &self.cell_ids
    }

    pub fn start(&self) -> DateTime<Utc> {
        self.start
    }

    pub fn granularity(&self) -> TimeDelta {
        TimeDelta::hours(1)
    }

    pub fn n_cells(&self) -> usize {
        self.cell_ids.len()
    }

    pub fn n_hours(&self) -> usize {
        self.hours
    }

    pub fn get(&self, cell: usize, hour: usize) -> Option<T> {
        self.values[cell * self.hours + hour]
    }

    pub fn row(&self, cell: usize) -> &[Option<T>] {
        &self.values[cell * self.hours..(cell + 1) * self.hours]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[Option<T>]> {
        self.values.chunks(self.hours)
    }

    pub fn present_count(&self) -> usize {
        self.values.iter().filter(|v| v.is_some()).count()
    }

    pub fn timestamp(&self, hour: usize) -> DateTime<Utc> {
        self.start + TimeDelta::hours(hour as i64)
    }

    /// Hour-of-week (Monday 00:00 UTC = 0) of the first column.
    pub fn hour_of_week_offset(&self) -> usize {
        hour_of_week(&self.start)
    }

    /// Row without missing entries, if it has none.
    pub fn dense_row(&self, cell: usize) -> Option<Vec<T>> {
        self.row(cell).iter().copied().collect()
    }

    /// Applies the fill policy to every row and returns the number of filled slots.
    pub fn fill_missing(&mut self) -> usize {
        let hours = self.hours;
        self.values.chunks_mut(hours).map(fill_row).sum()
    }
}

pub fn hour_of_week(ts: &DateTime<Utc>) -> usize {
    ts.weekday().num_days_from_monday() as usize * 24 + ts.hour() as usize
}

/// Linear interpolation between interior gaps, nearest value at the edges.
/// Rows without any value are left untouched. Returns the number of filled slots.
pub fn fill_row<T: Scalar>(row: &mut [Option<T>]) -> usize {
    let present: Vec<usize> = (0..row.len()).filter(|&i| row[i].is_some()).collect();
    let (Some(&first), Some(&last)) = (present.first(), present.last()) else {
        return 0;
    };
    let mut filled = 0;
    for i in 0..first {
        row[i] = row[first];
        filled += 1;
    }
    for i in last + 1..row.len() {
        row[i] = row[last];
        filled += 1;
    }
    for pair in present.windows(2) {
        let (a, b) = (pair[0], pair[1]);
        if b - a < 2 {
            continue;
        }
        let (va, vb) = (row[a].unwrap(), row[b].unwrap());
        let span = T::from_count(b - a);
        for (i, slot) in row.iter_mut().enumerate().take(b).skip(a + 1) {
            let frac = T::from_count(i - a) / span;
            *slot = Some(va + (vb - va) * frac);
            filled += 1;
        }
    }
    filled
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MatrixOptions {
    /// Fill missing slots after assembly.
    pub fill: bool,
}

impl Default for MatrixOptions {
    fn default() -> Self {
        Self { fill: true }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MatrixBuild<T> {
    pub matrix: KpiMatrix<T>,
    /// Samples outside `[start, start + m hours)`.
    pub out_of_range: usize,
    /// Samples whose cell is not among the requested rows.
    pub unknown_cells: usize,
    /// Samples landing on an already occupied slot; the later one wins.
    pub duplicates: usize,
    /// Slots populated by the fill policy.
    pub filled: usize,
}

impl<T> MatrixBuild<T> {
    pub fn warnings(&self) -> usize {
        self.out_of_range + self.unknown_cells + self.duplicates
    }
}

/// Places every sample of `kind` at its (cell, hour) slot.
pub fn build_kpi_matrix<T: Scalar>(
    samples: &[KpiSample],
    kind: KpiKind,
    cell_ids: &[String],
    start: DateTime<Utc>,
    hours: usize,
    options: MatrixOptions,
) -> Result<MatrixBuild<T>> {
    if hours < 2 {
        return Err(Error::InsufficientData { needed: 2, got: hours });
    }
    if cell_ids.is_empty() {
        return Err(Error::InvalidArgument("no cells for KPI matrix".into()));
    }
    if !is_hour_aligned(&start) {
        return Err(Error::InvalidArgument("matrix start is not hour aligned".into()));
    }
    let index: HashMap<&str, usize> = cell_ids.iter().enumerate().map(|(i, c)| (c.as_str(), i)).collect();
    if index.len() != cell_ids.len() {
        return Err(Error::InvalidArgument("duplicate cell ids in matrix rows".into()));
    }

    let mut values = vec![None; cell_ids.len() * hours];
    let mut occupied = vec![false; cell_ids.len() * hours];
    let (mut out_of_range, mut unknown_cells, mut duplicates) = (0, 0, 0);
    for s in samples {
        let Some(&row) = index.get(s.cell_id.as_str()) else {
            unknown_cells += 1;
            continue;
        };
        let offset = (s.timestamp - start).num_hours();
        if offset < 0 || offset as usize >= hours || !is_hour_aligned(&s.timestamp) {
            out_of_range += 1;
            continue;
        }
        let slot = row * hours + offset as usize;
        if occupied[slot] {
            duplicates += 1;
        }
        occupied[slot] = true;
        values[slot] = s.get(kind).map(T::lit);
    }

    let mut matrix = KpiMatrix { kind, cell_ids: cell_ids.to_vec(), start, hours, values };
    let filled = if options.fill { matrix.fill_missing() } else { 0 };
    Ok(MatrixBuild { matrix, out_of_range, unknown_cells, duplicates, filled })
}

#[cfg(test)]
mod tests {
    use super::*;
    use chrono::TimeZone;

    fn t0() -> DateTime<Utc> {
        Utc.with_ymd_and_hms(2024, 1, 1, 0, 0, 0).unwrap()
    }

    fn sample(cell: &str, hour: i64, v: Option<f64>) -> KpiSample {
        KpiSample { cell_id: cell.into(), timestamp: t0() + TimeDelta::hours(hour), values: [v, v, v, v] }
    }

    #[test]
    fn one_cell_three_hours() {
        let samples: Vec<_> = (0..3).map(|h| sample("A", h, Some(h as f64))).collect();
        let b = build_kpi_matrix::<f64>(&samples, KpiKind::Hosr, &["A".into()], t0(), 3, MatrixOptions { fill: false })
            .unwrap();
        assert_eq!(b.matrix.n_cells(), 1);
        assert_eq!(b.matrix.n_hours(), 3);
        assert_eq!(b.matrix.row(0), &[Some(0.0), Some(1.0), Some(2.0)]);
        assert_eq!(b.warnings(), 0);
    }

    #[test]
    fn sample_past_the_end_is_counted_and_ignored() {
        let mut samples: Vec<_> = (0..3).map(|h| sample("A", h, Some(1.0))).collect();
        samples.push(sample("A", 4, Some(99.0)));
        let b =
            build_kpi_matrix::<f64>(&samples, KpiKind::Hosr, &["A".into()], t0(), 3, MatrixOptions::default()).unwrap();
        assert_eq!(b.out_of_range, 1);
        assert_eq!(b.matrix.row(0), &[Some(1.0); 3]);
    }

    #[test]
    fn fill_interpolates_interior_and_extends_edges() {
        let mut row = vec![None, Some(1.0), None, None, Some(4.0), None];
        assert_eq!(fill_row(&mut row), 4);
        assert_eq!(row, vec![Some(1.0), Some(1.0), Some(2.0), Some(3.0), Some(4.0), Some(4.0)]);
        let mut empty: Vec<Option<f64>> = vec![None; 3];
        assert_eq!(fill_row(&mut empty), 0);
    }

    #[test]
    fn missing_kpi_is_not_zero() {
        let samples = vec![sample("A", 0, Some(2.0)), sample("A", 1, None), sample("A", 2, Some(4.0))];
        let raw =
            build_kpi_matrix::<f64>(&samples, KpiKind::Hosr, &["A".into()], t0(), 3, MatrixOptions { fill: false })
                .unwrap();
        assert_eq!(raw.matrix.get(0, 1), None);
        assert_eq!(raw.matrix.present_count(), 2);
        let filled =
            build_kpi_matrix::<f64>(&samples, KpiKind::Hosr, &["A".into()], t0(), 3, MatrixOptions::default()).unwrap();
        assert_eq!(filled.matrix.get(0, 1), Some(3.0));
        assert_eq!(filled.filled, 1);
    }

    #[test]
    fn too_few_hours_rejected() {
        assert!(build_kpi_matrix::<f64>(&[], KpiKind::Hosr, &["A".into()], t0(), 1, MatrixOptions::default()).is_err());
    }

    #[test]
    fn monday_midnight_is_hour_zero() {
        assert_eq!(hour_of_week(&t0()), 0);
        assert_eq!(hour_of_week(&(t0() + TimeDelta::hours(30))), 30);
    }
}
