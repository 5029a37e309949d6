//! Input record types and their CSV encodings.
//!
//! All files are UTF-8, comma separated, with a mandatory header row and `.`
//! as decimal separator. Timestamps are ISO-8601 UTC and must be hour aligned.

use std::collections::{HashMap, HashSet};
use std::fmt;
use std::fs::File;
use std::io::{Read, Write};
use std::path::Path;
use std::str::FromStr;

use chrono::{DateTime, SecondsFormat, Timelike, Utc};
use csv::StringRecord;

use crate::error::{Error, Result};

pub const CELLS_HEADER: [&str; 6] = ["cell_id", "site_name", "enb_id", "lat", "lon", "bearing"];
pub const NEIGHBORS_HEADER: [&str; 2] = ["source_cell_id", "target_cell_id"];
pub const PM_HEADER: [&str; 8] = [
    "cell_id",
    "timestamp",
    "ho_success",
    "ho_attempts",
    "dl_pdcp_volume_mb",
    "dl_active_time_s",
    "rrc_success",
    "rrc_attempts",
];
pub const SPEEDMAP_HEADER: [&str; 4] = ["lat", "lon", "speed_kmh", "travel_mode"];

/// Static configuration and inventory record of one cell.
#[derive(Debug, Clone, PartialEq)]
pub struct CellInfo {
    pub cell_id: String,
    pub site_name: String,
    pub enb_id: String,
    pub latitude: f64,
    pub longitude: f64,
    pub bearing: f64,
    pub neighbor_ids: Vec<String>,
}

impl CellInfo {
    pub fn validate(&self) -> std::result::Result<(), String> {
        if self.cell_id.is_empty() {
            return Err("empty cell id".into());
        }
        check_latitude(self.latitude)?;
        check_longitude(self.longitude)?;
        if !(self.bearing.is_finite() && (0.0..360.0).contains(&self.bearing)) {
            return Err(format!("bearing {} outside [0, 360)", self.bearing));
        }
        if self.neighbor_ids.iter().any(|n| n == &self.cell_id) {
            return Err(format!("cell `{}` lists itself as neighbor", self.cell_id));
        }
        Ok(())
    }
}

/// One hourly row of raw performance counters for a cell.
#[derive(Debug, Clone, PartialEq)]
pub struct PmRecord {
    pub cell_id: String,
    pub timestamp: DateTime<Utc>,
    pub ho_success: u64,
    pub ho_attempts: u64,
    pub dl_pdcp_volume_mb: f64,
    pub dl_active_time_s: f64,
    pub rrc_success: u64,
    pub rrc_attempts: u64,
}

impl PmRecord {
    pub fn validate(&self) -> std::result::Result<(), String> {
        if !is_hour_aligned(&self.timestamp) {
            return Err(format!("timestamp {} is not hour aligned", format_timestamp(&self.timestamp)));
        }
        if self.ho_success > self.ho_attempts {
            return Err(format!("ho_success {} exceeds ho_attempts {}", self.ho_success, self.ho_attempts));
        }
        if self.rrc_success > self.rrc_attempts {
            return Err(format!("rrc_success {} exceeds rrc_attempts {}", self.rrc_success, self.rrc_attempts));
        }
        if !(self.dl_pdcp_volume_mb.is_finite() && self.dl_pdcp_volume_mb >= 0.0) {
            return Err(format!("dl_pdcp_volume_mb {} must be >= 0", self.dl_pdcp_volume_mb));
        }
        if !(self.dl_active_time_s.is_finite() && self.dl_active_time_s >= 0.0) {
            return Err(format!("dl_active_time_s {} must be >= 0", self.dl_active_time_s));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum TravelMode {
    Driving,
    Walking,
    Cycling,
    Transit,
}

impl TravelMode {
    pub const ALL: [TravelMode; 4] = [Self::Driving, Self::Walking, Self::Cycling, Self::Transit];

    pub fn as_str(self) -> &'static str {
        match self {
            Self::Driving => "driving",
            Self::Walking => "walking",
            Self::Cycling => "cycling",
            Self::Transit => "transit",
        }
    }
}

impl fmt::Display for TravelMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for TravelMode {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        Self::ALL.into_iter().find(|m| m.as_str() == s).ok_or_else(|| format!("unknown travel mode `{s}`"))
    }
}

/// A map point with its road speed limit, standing in for an online maps service.
#[derive(Debug, Clone, PartialEq)]
pub struct SpeedWaypoint {
    pub latitude: f64,
    pub longitude: f64,
    pub speed_limit: f64,
    pub travel_mode: TravelMode,
}

impl SpeedWaypoint {
    pub fn validate(&self) -> std::result::Result<(), String> {
        check_latitude(self.latitude)?;
        check_longitude(self.longitude)?;
        if !(self.speed_limit.is_finite() && (0.0..=100.0).contains(&self.speed_limit)) {
            return Err(format!("speed {} outside [0, 100] km/h", self.speed_limit));
        }
        Ok(())
    }
}

fn check_latitude(lat: f64) -> std::result::Result<(), String> {
    if lat.is_finite() && (-90.0..=90.0).contains(&lat) {
        Ok(())
    } else {
        Err(format!("latitude {lat} outside [-90, 90]"))
    }
}

fn check_longitude(lon: f64) -> std::result::Result<(), String> {
    if lon.is_finite() && (-180.0..=180.0).contains(&lon) {
        Ok(())
    } else {
        Err(format!("longitude {lon} outside [-180, 180]"))
    }
}

pub fn is_hour_aligned(ts: &DateTime<Utc>) -> bool {
    ts.minute() == 0 && ts.second() == 0 && ts.nanosecond() == 0
}

pub fn format_timestamp(ts: &DateTime<Utc>) -> String {
    ts.to_rfc3339_opts(SecondsFormat::Secs, true)
}

/// Parses an ISO-8601 UTC, hour-aligned timestamp.
pub fn parse_timestamp(s: &str) -> std::result::Result<DateTime<Utc>, String> {
    let parsed = DateTime::parse_from_rfc3339(s).map_err(|e| format!("bad timestamp `{s}`: {e}"))?;
    if parsed.offset().local_minus_utc() != 0 {
        return Err(format!("timestamp `{s}` is not UTC"));
    }
    let ts = parsed.with_timezone(&Utc);
    if !is_hour_aligned(&ts) {
        return Err(format!("timestamp `{s}` is not hour aligned"));
    }
    Ok(ts)
}

// ---------------------------------------------------------------------------
// reading

struct Rows<R: Read> {
    source: String,
    reader: csv::Reader<R>,
    header: Vec<String>,
}

impl<R: Read> Rows<R> {
    fn open(reader: R, source: &str, expected: &[&str]) -> Result<Self> {
        let mut reader = csv::ReaderBuilder::new().has_headers(true).trim(csv::Trim::All).from_reader(reader);
        let header: Vec<String> = reader
            .headers()
            .map_err(|e| Error::Csv { path: source.to_string(), source: e })?
            .iter()
            .map(str::to_string)
            .collect();
        if header != expected {
            return Err(Error::Header {
                path: source.to_string(),
                expected: expected.join(","),
                found: header.join(","),
            });
        }
        Ok(Self { source: source.to_string(), reader, header })
    }

    fn for_each(mut self, mut f: impl FnMut(&Row<'_>) -> Result<()>) -> Result<()> {
        let mut record = StringRecord::new();
        loop {
            match self.reader.read_record(&mut record) {
                Ok(false) => return Ok(()),
                Ok(true) => {
                    let line = record.position().map_or(0, |p| p.line());
                    let row = Row { source: &self.source, header: &self.header, record: &record, line };
                    f(&row)?;
                }
                Err(e) => return Err(Error::Csv { path: self.source.clone(), source: e }),
            }
        }
    }
}

struct Row<'a> {
    source: &'a str,
    header: &'a [String],
    record: &'a StringRecord,
    line: u64,
}

impl Row<'_> {
    fn error(&self, column: usize, message: impl Into<String>) -> Error {
        Error::Field {
            path: self.source.to_string(),
            line: self.line,
            column: self.header.get(column).cloned().unwrap_or_else(|| column.to_string()),
            message: message.into(),
        }
    }

    fn str(&self, column: usize) -> Result<&str> {
        self.record.get(column).ok_or_else(|| self.error(column, "missing field"))
    }

    fn parse<V: FromStr>(&self, column: usize) -> Result<V>
    where
        V::Err: fmt::Display,
    {
        let raw = self.str(column)?;
        raw.parse::<V>().map_err(|e| self.error(column, format!("cannot parse `{raw}`: {e}")))
    }

    fn check(&self, column: usize, r: std::result::Result<(), String>) -> Result<()> {
        r.map_err(|m| self.error(column, m))
    }
}

fn open_file(path: &Path) -> Result<File> {
    File::open(path).map_err(|e| Error::Io { path: path.display().to_string(), source: e })
}

pub fn parse_cells(path: &Path) -> Result<Vec<CellInfo>> {
    read_cells(open_file(path)?, &path.display().to_string())
}

/// Reads `cells.csv` content; neighbor lists are left empty.
pub fn read_cells<R: Read>(reader: R, source: &str) -> Result<Vec<CellInfo>> {
    let rows = Rows::open(reader, source, &CELLS_HEADER)?;
    let mut cells = Vec::new();
    let mut seen = HashSet::new();
    rows.for_each(|row| {
        let cell = CellInfo {
            cell_id: row.str(0)?.to_string(),
            site_name: row.str(1)?.to_string(),
            enb_id: row.str(2)?.to_string(),
            latitude: row.parse(3)?,
            longitude: row.parse(4)?,
            bearing: row.parse(5)?,
            neighbor_ids: Vec::new(),
        };
        if cell.cell_id.is_empty() {
            return Err(row.error(0, "empty cell id"));
        }
        row.check(3, check_latitude(cell.latitude))?;
        row.check(4, check_longitude(cell.longitude))?;
        row.check(5, cell.validate())?;
        if !seen.insert(cell.cell_id.clone()) {
            return Err(Error::DuplicateCell { path: source.to_string(), id: cell.cell_id });
        }
        cells.push(cell);
        Ok(())
    })?;
    Ok(cells)
}

pub fn parse_neighbors(path: &Path, cells: &mut [CellInfo]) -> Result<()> {
    read_neighbors(open_file(path)?, &path.display().to_string(), cells)
}

/// Attaches neighbor relations to already parsed cells.
///
/// Unknown source cells and self relations are errors. Targets that are not
/// in the inventory are kept; geometry estimation skips them. Repeated
/// relations are collapsed.
pub fn read_neighbors<R: Read>(reader: R, source: &str, cells: &mut [CellInfo]) -> Result<()> {
    let index: HashMap<String, usize> = cells.iter().enumerate().map(|(i, c)| (c.cell_id.clone(), i)).collect();
    let rows = Rows::open(reader, source, &NEIGHBORS_HEADER)?;
    rows.for_each(|row| {
        let src = row.str(0)?;
        let dst = row.str(1)?;
        let &i = index.get(src).ok_or_else(|| row.error(0, format!("unknown cell `{src}`")))?;
        if src == dst {
            return Err(row.error(1, format!("self relation on `{src}`")));
        }
        if !cells[i].neighbor_ids.iter().any(|n| n == dst) {
            cells[i].neighbor_ids.push(dst.to_string());
        }
        Ok(())
    })
}

pub fn parse_pm(path: &Path) -> Result<Vec<PmRecord>> {
    read_pm(open_file(path)?, &path.display().to_string())
}

pub fn read_pm<R: Read>(reader: R, source: &str) -> Result<Vec<PmRecord>> {
    let rows = Rows::open(reader, source, &PM_HEADER)?;
    let mut out = Vec::new();
    rows.for_each(|row| {
        let timestamp = parse_timestamp(row.str(1)?).map_err(|m| row.error(1, m))?;
        let rec = PmRecord {
            cell_id: row.str(0)?.to_string(),
            timestamp,
            ho_success: row.parse(2)?,
            ho_attempts: row.parse(3)?,
            dl_pdcp_volume_mb: row.parse(4)?,
            dl_active_time_s: row.parse(5)?,
            rrc_success: row.parse(6)?,
            rrc_attempts: row.parse(7)?,
        };
        if rec.ho_success > rec.ho_attempts {
            return Err(row.error(2, "ho_success exceeds ho_attempts"));
        }
        if rec.rrc_success > rec.rrc_attempts {
            return Err(row.error(6, "rrc_success exceeds rrc_attempts"));
        }
        row.check(4, non_negative(rec.dl_pdcp_volume_mb))?;
        row.check(5, non_negative(rec.dl_active_time_s))?;
        out.push(rec);
        Ok(())
    })?;
    Ok(out)
}

fn non_negative(v: f64) -> std::result::Result<(), String> {
    if v.is_finite() && v >= 0.0 {
        Ok(())
    } else {
        Err(format!("value {v} must be finite and >= 0"))
    }
}

pub fn parse_speedmap(path: &Path) -> Result<Vec<SpeedWaypoint>> {
    read_speedmap(open_file(path)?, &path.display().to_string())
}

pub fn read_speedmap<R: Read>(reader: R, source: &str) -> Result<Vec<SpeedWaypoint>> {
    let rows = Rows::open(reader, source, &SPEEDMAP_HEADER)?;
    let mut out = Vec::new();
    rows.for_each(|row| {
        let wp = SpeedWaypoint {
            latitude: row.parse(0)?,
            longitude: row.parse(1)?,
            speed_limit: row.parse(2)?,
            travel_mode: row.parse(3)?,
        };
        row.check(0, check_latitude(wp.latitude))?;
        row.check(1, check_longitude(wp.longitude))?;
        row.check(2, wp.validate())?;
        out.push(wp);
        Ok(())
    })?;
    Ok(out)
}

// ---------------------------------------------------------------------------
// writing

fn csv_writer<W: Write>(w: W) -> csv::Writer<W> {
    csv::WriterBuilder::new().has_headers(false).from_writer(w)
}

fn csv_err(source: &str) -> impl Fn(csv::Error) -> Error + '_ {
    move |e| Error::Csv { path: source.to_string(), source: e }
}

pub fn write_cells<W: Write>(w: W, cells: &[CellInfo]) -> Result<()> {
    let mut wr = csv_writer(w);
    let err = csv_err("cells.csv");
    wr.write_record(CELLS_HEADER).map_err(&err)?;
    for c in cells {
        wr.write_record([
            c.cell_id.clone(),
            c.site_name.clone(),
            c.enb_id.clone(),
            c.latitude.to_string(),
            c.longitude.to_string(),
            c.bearing.to_string(),
        ])
        .map_err(&err)?;
    }
    wr.flush().map_err(|e| Error::Io { path: "cells.csv".into(), source: e })
}

pub fn write_neighbors<W: Write>(w: W, cells: &[CellInfo]) -> Result<()> {
    let mut wr = csv_writer(w);
    let err = csv_err("neighbors.csv");
    wr.write_record(NEIGHBORS_HEADER).map_err(&err)?;
    for c in cells {
        for n in &c.neighbor_ids {
            wr.write_record([c.cell_id.as_str(), n.as_str()]).map_err(&err)?;
        }
    }
    wr.flush().map_err(|e| Error::Io { path: "neighbors.csv".into(), source: e })
}

pub fn write_pm<W: Write>(w: W, records: &[PmRecord]) -> Result<()> {
    let mut wr = csv_writer(w);
    let err = csv_err("pm.csv");
    wr.write_record(PM_HEADER).map_err(&err)?;
    for r in records {
        wr.write_record([
            r.cell_id.clone(),
            format_timestamp(&r.timestamp),
            r.ho_success.to_string(),
            r.ho_attempts.to_string(),
            r.dl_pdcp_volume_mb.to_string(),
            r.dl_active_time_s.to_string(),
            r.rrc_success.to_string(),
            r.rrc_attempts.to_string(),
        ])
        .map_err(&err)?;
    }
    wr.flush().map_err(|e| Error::Io { path: "pm.csv".into(), source: e })
}

pub fn write_speedmap<W: Write>(w: W, waypoints: &[SpeedWaypoint]) -> Result<()> {
    let mut wr = csv_writer(w);
    let err = csv_err("speedmap.csv");
    wr.write_record(SPEEDMAP_HEADER).map_err(&err)?;
    for p in waypoints {
        wr.write_record([
            p.latitude.to_string(),
            p.longitude.to_string(),
            p.speed_limit.to_string(),
            p.travel_mode.to_string(),
        ])
        .map_err(&err)?;
    }
    wr.flush().map_err(|e| Error::Io { path: "speedmap.csv".into(), source: e })
}
