//! Seeded synthetic telemetry: cell layout, speed map and hourly counters.
//!
//! Cells are grouped on sites scattered around a set of location blobs, each
//! blob carrying its own road speed profile. Every KPI follows a latent
//! hourly signal (daily sinusoid, weekday/weekend modulation, weekly swing,
//! Gaussian noise) that is mapped into consistent raw counters. Scheduled
//! anomalies add a level shift of `magnitude * sigma` to the latent signal
//! of the targeted cells; they never consume random draws, so a zero
//! magnitude reproduces the clean run bit for bit.

use std::f64::consts::PI;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use chrono::{DateTime, TimeDelta, TimeZone, Utc};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use super::kpi::KpiKind;
use super::matrix::{hour_of_week, HOURS_PER_WEEK};
use super::records::{
    write_cells, write_neighbors, write_pm, write_speedmap, CellInfo, PmRecord, SpeedWaypoint, TravelMode,
};
use crate::error::{Error, Result};
use crate::geo::haversine_km;

const KM_PER_DEG_LAT: f64 = 111.195;

#[derive(Debug, Clone, PartialEq)]
pub struct BlobSpec {
    pub latitude: f64,
    pub longitude: f64,
    /// Standard deviation of site placement around the center.
    pub spread_km: f64,
    pub speed_kmh: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub enum AnomalyTarget {
    /// Indices into the generated cell list.
    Cells(Vec<usize>),
    /// Every cell of a blob.
    Blob(usize),
}

#[derive(Debug, Clone, PartialEq)]
pub struct AnomalySpec {
    pub target: AnomalyTarget,
    pub kpi: KpiKind,
    pub start_hour: usize,
    pub duration_hours: usize,
    /// Signed shift in units of the KPI noise sigma.
    pub magnitude_sigma: f64,
}

/// Latent signal shape of one KPI in its physical unit.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KpiProfile {
    pub level: f64,
    /// Signed: negative values dip during the busy hours.
    pub daily_amplitude: f64,
    pub weekly_amplitude: f64,
    pub noise_sigma: f64,
    /// Standard deviation of the per-cell level offset.
    pub level_spread: f64,
}

impl KpiProfile {
    pub fn default_for(kind: KpiKind) -> Self {
        match kind {
            KpiKind::Hosr => {
                Self { level: 96.0, daily_amplitude: -1.2, weekly_amplitude: 0.4, noise_sigma: 0.4, level_spread: 0.5 }
            }
            KpiKind::DlThroughput => {
                Self { level: 25.0, daily_amplitude: -6.0, weekly_amplitude: 2.0, noise_sigma: 1.5, level_spread: 3.0 }
            }
            KpiKind::DlTraffic => Self {
                level: 1500.0,
                daily_amplitude: 900.0,
                weekly_amplitude: 200.0,
                noise_sigma: 120.0,
                level_spread: 150.0,
            },
            KpiKind::RrcSr => {
                Self { level: 98.5, daily_amplitude: -0.3, weekly_amplitude: 0.1, noise_sigma: 0.15, level_spread: 0.1 }
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GeneratorConfig {
    pub cells: usize,
    pub weeks: usize,
    pub start: DateTime<Utc>,
    pub blobs: Vec<BlobSpec>,
    pub anomalies: Vec<AnomalySpec>,
    pub profiles: [KpiProfile; 4],
    pub cells_per_site: usize,
    pub neighbors_per_cell: usize,
    pub waypoints_per_blob: usize,
    /// Daily amplitude multiplier applied on Saturday and Sunday.
    pub weekend_factor: f64,
}

impl GeneratorConfig {
    pub fn new(cells: usize, weeks: usize) -> Self {
        Self {
            cells,
            weeks,
            start: Utc.with_ymd_and_hms(2024, 1, 1, 0, 0, 0).unwrap(),
            blobs: default_blobs(11),
            anomalies: Vec::new(),
            profiles: KpiKind::ALL.map(KpiProfile::default_for),
            cells_per_site: 3,
            neighbors_per_cell: 6,
            waypoints_per_blob: 400,
            weekend_factor: 0.6,
        }
    }

    pub fn hours(&self) -> usize {
        self.weeks * HOURS_PER_WEEK
    }
}

/// `count` blobs on a grid roughly 45 km apart around Helsinki, with speed
/// profiles spread over 5..95 km/h.
pub fn default_blobs(count: usize) -> Vec<BlobSpec> {
    let cols = (count as f64).sqrt().ceil().max(1.0) as usize;
    (0..count)
        .map(|i| {
            let (r, c) = (i / cols, i % cols);
            let speed_rank = (i * 7) % count;
            let speed = if count > 1 { 5.0 + 90.0 * speed_rank as f64 / (count - 1) as f64 } else { 50.0 };
            BlobSpec {
                latitude: 60.0 + 0.4 * r as f64,
                longitude: 24.0 + 0.8 * c as f64,
                spread_km: 3.0,
                speed_kmh: speed,
            }
        })
        .collect()
}

/// Ground truth of an applied anomaly.
#[derive(Debug, Clone, PartialEq)]
pub struct InjectedAnomaly {
    pub cell_ids: Vec<String>,
    pub kpi: KpiKind,
    pub start_hour: usize,
    pub duration_hours: usize,
    pub magnitude_sigma: f64,
    /// Shift in the KPI's physical unit.
    pub shift: f64,
}

impl InjectedAnomaly {
    pub fn end_hour(&self) -> usize {
        self.start_hour + self.duration_hours - 1
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SyntheticDataset {
    pub start: DateTime<Utc>,
    pub hours: usize,
    pub cells: Vec<CellInfo>,
    pub pm: Vec<PmRecord>,
    pub waypoints: Vec<SpeedWaypoint>,
    pub blob_of_cell: Vec<usize>,
    pub anomalies: Vec<InjectedAnomaly>,
}

impl SyntheticDataset {
    /// Writes `cells.csv`, `neighbors.csv`, `pm.csv`, `speedmap.csv` plus the
    /// ground truth files `truth_blobs.csv` and `truth_anomalies.csv`.
    pub fn write_dir(&self, dir: &Path) -> Result<()> {
        std::fs::create_dir_all(dir).map_err(|e| io_err(dir, e))?;
        with_file(&dir.join("cells.csv"), |w| write_cells(w, &self.cells))?;
        with_file(&dir.join("neighbors.csv"), |w| write_neighbors(w, &self.cells))?;
        with_file(&dir.join("pm.csv"), |w| write_pm(w, &self.pm))?;
        with_file(&dir.join("speedmap.csv"), |w| write_speedmap(w, &self.waypoints))?;
        with_file(&dir.join("truth_blobs.csv"), |w| self.write_blob_truth(w))?;
        with_file(&dir.join("truth_anomalies.csv"), |w| self.write_anomaly_truth(w))
    }

    pub fn write_blob_truth<W: Write>(&self, mut w: W) -> Result<()> {
        let io = |e| Error::Io { path: "truth_blobs.csv".into(), source: e };
        writeln!(w, "cell_id,blob").map_err(io)?;
        for (c, b) in self.cells.iter().zip(&self.blob_of_cell) {
            writeln!(w, "{},{}", c.cell_id, b).map_err(io)?;
        }
        w.flush().map_err(io)
    }

    pub fn write_anomaly_truth<W: Write>(&self, mut w: W) -> Result<()> {
        let io = |e| Error::Io { path: "truth_anomalies.csv".into(), source: e };
        writeln!(w, "kpi,start_hour,end_hour,magnitude_sigma,cell_ids").map_err(io)?;
        for a in &self.anomalies {
            writeln!(w, "{},{},{},{},{}", a.kpi, a.start_hour, a.end_hour(), a.magnitude_sigma, a.cell_ids.join(";"))
                .map_err(io)?;
        }
        w.flush().map_err(io)
    }
}

fn io_err(path: &Path, e: std::io::Error) -> Error {
    Error::Io { path: path.display().to_string(), source: e }
}

fn with_file(path: &Path, f: impl FnOnce(&mut BufWriter<File>) -> Result<()>) -> Result<()> {
    let file = File::create(path).map_err(|e| io_err(path, e))?;
    let mut w = BufWriter::new(file);
    f(&mut w)?;
    w.flush().map_err(|e| io_err(path, e))
}

fn gauss(rng: &mut ChaCha8Rng) -> f64 {
    StandardNormal.sample(rng)
}

fn offset_deg(lat: f64, dx_km: f64, dy_km: f64) -> (f64, f64) {
    let dlat = dy_km / KM_PER_DEG_LAT;
    let dlon = dx_km / (KM_PER_DEG_LAT * lat.to_radians().cos().max(1e-6));
    (dlat, dlon)
}

fn travel_mode_for(speed: f64) -> TravelMode {
    if speed >= 50.0 {
        TravelMode::Driving
    } else if speed >= 30.0 {
        TravelMode::Transit
    } else if speed >= 12.0 {
        TravelMode::Cycling
    } else {
        TravelMode::Walking
    }
}

/// Daily shape in [-1, 1] peaking mid-afternoon, damped on weekends.
fn daily_shape(hour_of_week: usize, phase_h: f64, weekend_factor: f64) -> f64 {
    let hod = (hour_of_week % 24) as f64;
    let weekend = hour_of_week / 24 >= 5;
    let s = (2.0 * PI * (hod - 9.0 + phase_h) / 24.0).sin();
    if weekend {
        s * weekend_factor
    } else {
        s
    }
}

fn weekly_shape(hour_of_week: usize) -> f64 {
    (2.0 * PI * hour_of_week as f64 / HOURS_PER_WEEK as f64).cos()
}

fn validate(config: &GeneratorConfig) -> Result<()> {
    if config.cells == 0 || config.weeks == 0 {
        return Err(Error::InvalidArgument("generator needs at least one cell and one week".into()));
    }
    if config.blobs.is_empty() {
        return Err(Error::InvalidArgument("generator needs at least one blob".into()));
    }
    if config.cells_per_site == 0 {
        return Err(Error::InvalidArgument("cells_per_site must be positive".into()));
    }
    for b in &config.blobs {
        if !(0.0..=100.0).contains(&b.speed_kmh) || b.spread_km < 0.0 {
            return Err(Error::InvalidArgument(format!("invalid blob {b:?}")));
        }
    }
    let hours = config.hours();
    for a in &config.anomalies {
        if a.duration_hours == 0 || a.start_hour + a.duration_hours > hours {
            return Err(Error::InvalidArgument(format!(
                "anomaly window [{}, {}) exceeds series length {hours}",
                a.start_hour,
                a.start_hour + a.duration_hours
            )));
        }
        match &a.target {
            AnomalyTarget::Blob(b) if *b >= config.blobs.len() => {
                return Err(Error::InvalidArgument(format!("anomaly targets unknown blob {b}")));
            }
            AnomalyTarget::Cells(cells) if cells.iter().any(|&c| c >= config.cells) => {
                return Err(Error::InvalidArgument("anomaly targets unknown cell index".into()));
            }
            _ => {}
        }
    }
    Ok(())
}

pub fn generate_synthetic(config: &GeneratorConfig, seed: u64) -> Result<SyntheticDataset> {
    validate(config)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = config.cells;
    let hours = config.hours();
    let n_sites = n.div_ceil(config.cells_per_site);

    // sites
    let mut site_pos = Vec::with_capacity(n_sites);
    let mut site_blob = Vec::with_capacity(n_sites);
    for s in 0..n_sites {
        let b = s % config.blobs.len();
        let blob = &config.blobs[b];
        let (dx, dy) = (gauss(&mut rng) * blob.spread_km, gauss(&mut rng) * blob.spread_km);
        let (dlat, dlon) = offset_deg(blob.latitude, dx, dy);
        site_pos.push(((blob.latitude + dlat).clamp(-90.0, 90.0), wrap_lon(blob.longitude + dlon)));
        site_blob.push(b);
    }

    // cells
    let mut cells = Vec::with_capacity(n);
    let mut blob_of_cell = Vec::with_capacity(n);
    let mut cell_site = Vec::with_capacity(n);
    let mut phase = Vec::with_capacity(n);
    let mut level_offset = Vec::with_capacity(n);
    let mut attempt_scale = Vec::with_capacity(n);
    for i in 0..n {
        let s = i / config.cells_per_site;
        let k = i % config.cells_per_site;
        let (lat, lon) = site_pos[s];
        cells.push(CellInfo {
            cell_id: format!("C{i:05}"),
            site_name: format!("SITE{s:04}"),
            enb_id: format!("ENB{s:04}"),
            latitude: lat,
            longitude: lon,
            bearing: (360.0 * k as f64 / config.cells_per_site as f64) % 360.0,
            neighbor_ids: Vec::new(),
        });
        blob_of_cell.push(site_blob[s]);
        cell_site.push(s);
        phase.push(0.5 * gauss(&mut rng));
        level_offset.push([gauss(&mut rng), gauss(&mut rng), gauss(&mut rng), gauss(&mut rng)]);
        attempt_scale.push(rng.random_range(0.7..1.3));
    }

    // neighbors: co-sited cells plus the nearest cells on other sites
    let site_neighbors = nearest_sites(&site_pos, config.neighbors_per_cell);
    for i in 0..n {
        let s = cell_site[i];
        let mut ids = Vec::new();
        for j in s * config.cells_per_site..((s + 1) * config.cells_per_site).min(n) {
            if j != i {
                ids.push(cells[j].cell_id.clone());
            }
        }
        let mut others = Vec::new();
        for &t in &site_neighbors[s] {
            for j in t * config.cells_per_site..((t + 1) * config.cells_per_site).min(n) {
                others.push(j);
            }
        }
        let (lat, lon) = (cells[i].latitude, cells[i].longitude);
        others.sort_by(|&a, &b| {
            let da = haversine_km(lat, lon, cells[a].latitude, cells[a].longitude);
            let db = haversine_km(lat, lon, cells[b].latitude, cells[b].longitude);
            da.total_cmp(&db).then(a.cmp(&b))
        });
        ids.extend(others.into_iter().take(config.neighbors_per_cell).map(|j| cells[j].cell_id.clone()));
        cells[i].neighbor_ids = ids;
    }

    // speed map
    let mut waypoints = Vec::with_capacity(config.blobs.len() * config.waypoints_per_blob);
    for blob in &config.blobs {
        for _ in 0..config.waypoints_per_blob {
            let spread = blob.spread_km * 1.5;
            let (dx, dy) = (gauss(&mut rng) * spread, gauss(&mut rng) * spread);
            let (dlat, dlon) = offset_deg(blob.latitude, dx, dy);
            let speed = (blob.speed_kmh + 5.0 * gauss(&mut rng)).clamp(0.0, 100.0);
            waypoints.push(SpeedWaypoint {
                latitude: (blob.latitude + dlat).clamp(-90.0, 90.0),
                longitude: wrap_lon(blob.longitude + dlon),
                speed_limit: speed,
                travel_mode: travel_mode_for(speed),
            });
        }
    }

    // latent KPI signals: latent[cell][kpi][hour]
    let offset = hour_of_week(&config.start);
    let mut latent = vec![[vec![0.0; hours], vec![0.0; hours], vec![0.0; hours], vec![0.0; hours]]; n];
    for (i, series) in latent.iter_mut().enumerate() {
        for t in 0..hours {
            let how = (offset + t) % HOURS_PER_WEEK;
            let d = daily_shape(how, phase[i], config.weekend_factor);
            let w = weekly_shape(how);
            for kind in KpiKind::ALL {
                let p = &config.profiles[kind.index()];
                series[kind.index()][t] = p.level
                    + p.level_spread * level_offset[i][kind.index()]
                    + p.daily_amplitude * d
                    + p.weekly_amplitude * w
                    + p.noise_sigma * gauss(&mut rng);
            }
        }
    }

    let mut anomalies = Vec::with_capacity(config.anomalies.len());
    for a in &config.anomalies {
        let targets: Vec<usize> = match &a.target {
            AnomalyTarget::Cells(c) => c.clone(),
            AnomalyTarget::Blob(b) => (0..n).filter(|&i| blob_of_cell[i] == *b).collect(),
        };
        let shift = a.magnitude_sigma * config.profiles[a.kpi.index()].noise_sigma;
        for &i in &targets {
            for v in &mut latent[i][a.kpi.index()][a.start_hour..a.start_hour + a.duration_hours] {
                *v += shift;
            }
        }
        anomalies.push(InjectedAnomaly {
            cell_ids: targets.iter().map(|&i| cells[i].cell_id.clone()).collect(),
            kpi: a.kpi,
            start_hour: a.start_hour,
            duration_hours: a.duration_hours,
            magnitude_sigma: a.magnitude_sigma,
            shift,
        });
    }

    // counters
    let mut pm = Vec::with_capacity(n * hours);
    for i in 0..n {
        for t in 0..hours {
            let how = (offset + t) % HOURS_PER_WEEK;
            let load = 0.55 + 0.4 * daily_shape(how, phase[i], config.weekend_factor);
            let ho_attempts = (attempt_scale[i] * (200.0 + 600.0 * load)).round().max(1.0) as u64;
            let rrc_attempts = (attempt_scale[i] * (1000.0 + 3000.0 * load)).round().max(1.0) as u64;
            let series = &latent[i];
            let hosr = series[KpiKind::Hosr.index()][t].clamp(0.0, 100.0);
            let rrc = series[KpiKind::RrcSr.index()][t].clamp(0.0, 100.0);
            let traffic = series[KpiKind::DlTraffic.index()][t].max(1.0);
            let throughput = series[KpiKind::DlThroughput.index()][t].max(0.5);
            pm.push(PmRecord {
                cell_id: cells[i].cell_id.clone(),
                timestamp: config.start + TimeDelta::hours(t as i64),
                ho_success: ((ho_attempts as f64 * hosr / 100.0).round() as u64).min(ho_attempts),
                ho_attempts,
                dl_pdcp_volume_mb: traffic,
                dl_active_time_s: traffic * 8.0 / throughput,
                rrc_success: ((rrc_attempts as f64 * rrc / 100.0).round() as u64).min(rrc_attempts),
                rrc_attempts,
            });
        }
    }

    Ok(SyntheticDataset { start: config.start, hours, cells, pm, waypoints, blob_of_cell, anomalies })
}

fn wrap_lon(lon: f64) -> f64 {
    if lon > 180.0 {
        lon - 360.0
    } else if lon < -180.0 {
        lon + 360.0
    } else {
        lon
    }
}

/// For every site, the `k` closest other sites (ties by index).
fn nearest_sites(pos: &[(f64, f64)], k: usize) -> Vec<Vec<usize>> {
    (0..pos.len())
        .map(|s| {
            let mut d: Vec<(f64, usize)> = (0..pos.len())
                .filter(|&t| t != s)
                .map(|t| (haversine_km(pos[s].0, pos[s].1, pos[t].0, pos[t].1), t))
                .collect();
            let k = k.min(d.len());
            if k == 0 {
                return Vec::new();
            }
            d.select_nth_unstable_by(k - 1, |a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
            d.truncate(k);
            d.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
            d.into_iter().map(|(_, t)| t).collect()
        })
        .collect()
}

/// Shape of a standalone normalized seasonal series.
#[derive(Debug, Clone, PartialEq)]
pub struct SeasonalSeriesSpec {
    pub hours: usize,
    pub hour_of_week_offset: usize,
    /// Amplitude of the weekly swing relative to the daily one.
    pub weekly_ratio: f64,
    pub weekend_factor: f64,
    /// Noise sigma in normalized units.
    pub noise_sigma: f64,
    pub shift: Option<LevelShift>,
}

impl SeasonalSeriesSpec {
    pub fn new(hours: usize, noise_sigma: f64) -> Self {
        Self { hours, hour_of_week_offset: 0, weekly_ratio: 0.4, weekend_factor: 0.6, noise_sigma, shift: None }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LevelShift {
    pub start: usize,
    pub duration: usize,
    pub magnitude_sigma: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SeasonalSeries {
    /// Seasonal component scaled to span exactly [0, 1].
    pub clean: Vec<f64>,
    pub values: Vec<f64>,
}

/// Daily plus weekly seasonality min-max scaled to [0, 1], with additive
/// Gaussian noise and an optional level shift in noise-sigma units. The
/// noise draws do not depend on the shift.
pub fn seasonal_series(spec: &SeasonalSeriesSpec, seed: u64) -> Result<SeasonalSeries> {
    if spec.hours < 2 {
        return Err(Error::InsufficientData { needed: 2, got: spec.hours });
    }
    if let Some(s) = spec.shift {
        if s.duration == 0 || s.start + s.duration > spec.hours {
            return Err(Error::InvalidArgument("level shift exceeds series length".into()));
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let phase = rng.random_range(0.0..24.0);
    let raw: Vec<f64> = (0..spec.hours)
        .map(|t| {
            let how = (spec.hour_of_week_offset + t) % HOURS_PER_WEEK;
            daily_shape(how, phase, spec.weekend_factor) + spec.weekly_ratio * weekly_shape(how)
        })
        .collect();
    let lo = raw.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = raw.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let clean: Vec<f64> = raw.iter().map(|v| if hi > lo { (v - lo) / (hi - lo) } else { 0.5 }).collect();
    let mut values: Vec<f64> = clean.iter().map(|c| c + spec.noise_sigma * gauss(&mut rng)).collect();
    if let Some(s) = spec.shift {
        for v in &mut values[s.start..s.start + s.duration] {
            *v += s.magnitude_sigma * spec.noise_sigma;
        }
    }
    Ok(SeasonalSeries { clean, values })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small() -> GeneratorConfig {
        let mut c = GeneratorConfig::new(24, 1);
        c.blobs = default_blobs(3);
        c
    }

    #[test]
    fn same_seed_same_output() {
        let a = generate_synthetic(&small(), 7).unwrap();
        let b = generate_synthetic(&small(), 7).unwrap();
        assert_eq!(a, b);
        let c = generate_synthetic(&small(), 8).unwrap();
        assert_ne!(a.pm, c.pm);
    }

    #[test]
    fn zero_magnitude_anomaly_is_a_no_op() {
        let clean = generate_synthetic(&small(), 3).unwrap();
        let mut cfg = small();
        cfg.anomalies.push(AnomalySpec {
            target: AnomalyTarget::Blob(1),
            kpi: KpiKind::Hosr,
            start_hour: 10,
            duration_hours: 72,
            magnitude_sigma: 0.0,
        });
        let shifted = generate_synthetic(&cfg, 3).unwrap();
        assert_eq!(clean.pm, shifted.pm);
        assert_eq!(clean.cells, shifted.cells);
    }

    #[test]
    fn anomaly_past_the_end_is_rejected() {
        let mut cfg = small();
        cfg.anomalies.push(AnomalySpec {
            target: AnomalyTarget::Cells(vec![0]),
            kpi: KpiKind::Hosr,
            start_hour: 150,
            duration_hours: 24,
            magnitude_sigma: 5.0,
        });
        assert!(generate_synthetic(&cfg, 1).is_err());
    }

    #[test]
    fn generated_records_are_valid() {
        let d = generate_synthetic(&small(), 11).unwrap();
        assert_eq!(d.pm.len(), 24 * 168);
        for c in &d.cells {
            c.validate().unwrap();
            assert!(!c.neighbor_ids.is_empty());
        }
        for r in &d.pm {
            r.validate().unwrap();
        }
        for w in &d.waypoints {
            w.validate().unwrap();
        }
    }

    #[test]
    fn seasonal_series_clean_part_spans_unit_interval() {
        let s = seasonal_series(&SeasonalSeriesSpec::new(168, 0.05), 1).unwrap();
        let lo = s.clean.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = s.clean.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        assert_eq!((lo, hi), (0.0, 1.0));
        assert_eq!(s.values.len(), 168);
    }
}
