//! KPI formulas applied to raw hourly counters.
//!
//! | KPI           | formula                                         | unit |
//! |---------------|-------------------------------------------------|------|
//! | HOSR          | `100 * ho_success / ho_attempts`                | %    |
//! | DL throughput | `volume_mb * 10^6 * 8 / active_time_s / 10^6`   | Mbps |
//! | DL traffic    | `volume_mb`                                     | MB   |
//! | RRC SR        | `100 * rrc_success / rrc_attempts`              | %    |
//!
//! Throughput counts megabytes as 10^6 bytes, so the expression reduces to
//! `volume_mb * 8 / active_time_s`. A zero denominator yields a missing
//! sample rather than a zero.

use std::fmt;
use std::str::FromStr;

use chrono::{DateTime, Utc};
use serde::{Deserialize, Serialize};

use super::records::PmRecord;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum KpiKind {
    #[serde(rename = "HOSR")]
    Hosr,
    #[serde(rename = "DL_THROUGHPUT")]
    DlThroughput,
    #[serde(rename = "DL_TRAFFIC")]
    DlTraffic,
    #[serde(rename = "RRC_SR")]
    RrcSr,
}

impl KpiKind {
    pub const ALL: [KpiKind; 4] = [Self::Hosr, Self::DlThroughput, Self::DlTraffic, Self::RrcSr];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Self::Hosr => "HOSR",
            Self::DlThroughput => "DL_THROUGHPUT",
            Self::DlTraffic => "DL_TRAFFIC",
            Self::RrcSr => "RRC_SR",
        }
    }

    pub fn unit(self) -> &'static str {
        match self {
            Self::Hosr | Self::RrcSr => "%",
            Self::DlThroughput => "Mbps",
            Self::DlTraffic => "MB",
        }
    }
}

impl fmt::Display for KpiKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for KpiKind {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        Self::ALL.into_iter().find(|k| k.as_str().eq_ignore_ascii_case(s)).ok_or_else(|| format!("unknown KPI `{s}`"))
    }
}

/// KPI values of one cell for one hour; `None` marks a missing sample.
#[derive(Debug, Clone, PartialEq)]
pub struct KpiSample {
    pub cell_id: String,
    pub timestamp: DateTime<Utc>,
    pub values: [Option<f64>; 4],
}

impl KpiSample {
    pub fn get(&self, kind: KpiKind) -> Option<f64> {
        self.values[kind.index()]
    }
}

pub fn handover_success_rate(success: u64, attempts: u64) -> Option<f64> {
    (attempts > 0).then(|| 100.0 * success as f64 / attempts as f64)
}

pub fn rrc_success_rate(success: u64, attempts: u64) -> Option<f64> {
    (attempts > 0).then(|| 100.0 * success as f64 / attempts as f64)
}

pub fn dl_throughput_mbps(volume_mb: f64, active_time_s: f64) -> Option<f64> {
    (active_time_s > 0.0).then(|| volume_mb * 8.0 / active_time_s)
}

/// Computes the four KPIs for every record.
///
/// Records violating counter invariants (success above attempts, negative
/// volumes, unaligned timestamps) are rejected.
pub fn compute_kpis(records: &[PmRecord]) -> Result<Vec<KpiSample>> {
    records
        .iter()
        .map(|r| {
            r.validate().map_err(|m| Error::InvalidRecord(format!("cell `{}`: {m}", r.cell_id)))?;
            let mut values = [None; 4];
            values[KpiKind::Hosr.index()] = handover_success_rate(r.ho_success, r.ho_attempts);
            values[KpiKind::DlThroughput.index()] = dl_throughput_mbps(r.dl_pdcp_volume_mb, r.dl_active_time_s);
            values[KpiKind::DlTraffic.index()] = Some(r.dl_pdcp_volume_mb);
            values[KpiKind::RrcSr.index()] = rrc_success_rate(r.rrc_success, r.rrc_attempts);
            Ok(KpiSample { cell_id: r.cell_id.clone(), timestamp: r.timestamp, values })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use chrono::TimeZone;

    fn record(ho: (u64, u64), vol: f64, active: f64, rrc: (u64, u64)) -> PmRecord {
        PmRecord {
            cell_id: "C1".into(),
            timestamp: Utc.with_ymd_and_hms(2024, 1, 1, 0, 0, 0).unwrap(),
            ho_success: ho.0,
            ho_attempts: ho.1,
            dl_pdcp_volume_mb: vol,
            dl_active_time_s: active,
            rrc_success: rrc.0,
            rrc_attempts: rrc.1,
        }
    }

    #[test]
    fn hosr_is_a_direct_ratio() {
        let s = &compute_kpis(&[record((90, 100), 1.0, 1.0, (1, 1))]).unwrap()[0];
        assert_eq!(s.get(KpiKind::Hosr), Some(90.0));
    }

    #[test]
    fn zero_denominators_mark_missing() {
        let s = &compute_kpis(&[record((0, 0), 5.0, 0.0, (0, 0))]).unwrap()[0];
        assert_eq!(s.get(KpiKind::Hosr), None);
        assert_eq!(s.get(KpiKind::RrcSr), None);
        assert_eq!(s.get(KpiKind::DlThroughput), None);
        assert_eq!(s.get(KpiKind::DlTraffic), Some(5.0));
    }

    #[test]
    fn throughput_matches_unit_walkthrough() {
        // 450 MB = 450e6 bytes = 3.6e9 bits; over 3600 s that is 1e6 bit/s = 1 Mbps.
        let bytes = 450.0 * 1e6;
        let bits = bytes * 8.0;
        let expected = bits / 3600.0 / 1e6;
        let s = &compute_kpis(&[record((1, 1), 450.0, 3600.0, (1, 1))]).unwrap()[0];
        let got = s.get(KpiKind::DlThroughput).unwrap();
        assert!((got - expected).abs() < 1e-12);
        assert!((got - 1.0).abs() < 1e-12);
    }

    #[test]
    fn invalid_counters_are_errors() {
        assert!(compute_kpis(&[record((11, 10), 1.0, 1.0, (1, 1))]).is_err());
    }

    #[test]
    fn kind_names_round_trip() {
        for k in KpiKind::ALL {
            assert_eq!(k.as_str().parse::<KpiKind>().unwrap(), k);
        }
    }
}
