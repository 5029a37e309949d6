//! Cell size and user speed estimation from inventory and the speed map.

use std::collections::HashMap;

use super::distance::{haversine_km, EARTH_RADIUS_KM};
use crate::ingest::{CellInfo, SpeedWaypoint};
use crate::stats::quantile_linear;

/// Radius used when a cell has no resolvable neighbor.
pub const DEFAULT_FALLBACK_RADIUS_KM: f64 = 5.0;
/// Percentile of neighbor distances taken as expected cell size.
pub const CELL_SIZE_PERCENTILE: f64 = 0.9;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CellSize {
    pub radius_km: f64,
    pub resolved_neighbors: usize,
    /// No neighbor could be resolved; `radius_km` is the fallback value.
    pub fallback: bool,
}

/// 90th percentile distance from the cell to its resolvable neighbors.
pub fn estimate_cell_size(cell: &CellInfo, lookup: &HashMap<&str, &CellInfo>, fallback_radius_km: f64) -> CellSize {
    let distances: Vec<f64> = cell
        .neighbor_ids
        .iter()
        .filter_map(|id| lookup.get(id.as_str()))
        .map(|n| haversine_km(cell.latitude, cell.longitude, n.latitude, n.longitude))
        .collect();
    match quantile_linear(&distances, CELL_SIZE_PERCENTILE) {
        Some(radius_km) => CellSize { radius_km, resolved_neighbors: distances.len(), fallback: false },
        None => CellSize { radius_km: fallback_radius_km, resolved_neighbors: 0, fallback: true },
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpeedEstimate {
    pub mean_speed_kmh: f64,
    pub waypoint_count: usize,
    /// No waypoint inside the radius; speed reported as 0.
    pub no_coverage: bool,
}

const BIN_DEG: f64 = 0.05;

/// Lat/lon bucket grid over the speed map.
#[derive(Debug, Clone)]
pub struct WaypointIndex<'a> {
    waypoints: &'a [SpeedWaypoint],
    bins: HashMap<(i64, i64), Vec<usize>>,
}

fn bin_of(deg: f64) -> i64 {
    (deg / BIN_DEG).floor() as i64
}

impl<'a> WaypointIndex<'a> {
    pub fn new(waypoints: &'a [SpeedWaypoint]) -> Self {
        let mut bins: HashMap<(i64, i64), Vec<usize>> = HashMap::new();
        for (i, w) in waypoints.iter().enumerate() {
            bins.entry((bin_of(w.latitude), bin_of(w.longitude))).or_default().push(i);
        }
        Self { waypoints, bins }
    }

    /// Indices (ascending) of waypoints within `radius_km` of the point.
    pub fn within(&self, lat: f64, lon: f64, radius_km: f64) -> Vec<usize> {
        let mut hits: Vec<usize> = match self.candidate_bins(lat, lon, radius_km) {
            Some(keys) => keys
                .into_iter()
                .filter_map(|k| self.bins.get(&k))
                .flatten()
                .copied()
                .filter(|&i| self.inside(i, lat, lon, radius_km))
                .collect(),
            None => (0..self.waypoints.len()).filter(|&i| self.inside(i, lat, lon, radius_km)).collect(),
        };
        hits.sort_unstable();
        hits
    }

    fn inside(&self, i: usize, lat: f64, lon: f64, radius_km: f64) -> bool {
        let w = &self.waypoints[i];
        haversine_km(lat, lon, w.latitude, w.longitude) <= radius_km
    }

    /// Bins that can hold a point within the radius, or `None` when a full scan is cheaper
    /// or the box crosses a pole or the antimeridian.
    fn candidate_bins(&self, lat: f64, lon: f64, radius_km: f64) -> Option<Vec<(i64, i64)>> {
        // Great-circle distance is at least R * |dlat|.
        let dlat = (radius_km / EARTH_RADIUS_KM).to_degrees() * (1.0 + 1e-9);
        let (lat_lo, lat_hi) = (lat - dlat, lat + dlat);
        if lat_lo <= -90.0 || lat_hi >= 90.0 {
            return None;
        }
        // d >= 2R sqrt(cos p1 cos p2) sin(dlon/2) >= 2R cos_min sin(dlon/2).
        let cos_min = lat_lo.to_radians().cos().min(lat_hi.to_radians().cos());
        let arg = radius_km / (2.0 * EARTH_RADIUS_KM * cos_min);
        if arg >= 1.0 {
            return None;
        }
        let dlon = (2.0 * arg.asin()).to_degrees() * (1.0 + 1e-9);
        let (lon_lo, lon_hi) = (lon - dlon, lon + dlon);
        if lon_lo < -180.0 || lon_hi > 180.0 {
            return None;
        }
        let (a0, a1) = (bin_of(lat_lo), bin_of(lat_hi));
        let (b0, b1) = (bin_of(lon_lo), bin_of(lon_hi));
        let count = (a1 - a0 + 1) as u128 * (b1 - b0 + 1) as u128;
        if count > self.bins.len().max(1) as u128 * 4 {
            return None;
        }
        Some((a0..=a1).flat_map(|a| (b0..=b1).map(move |b| (a, b))).collect())
    }
}

/// Mean speed limit of the waypoints within `radius_km` of the site.
pub fn estimate_cell_speed(lat: f64, lon: f64, radius_km: f64, index: &WaypointIndex<'_>) -> SpeedEstimate {
    let hits = index.within(lat, lon, radius_km);
    if hits.is_empty() {
        return SpeedEstimate { mean_speed_kmh: 0.0, waypoint_count: 0, no_coverage: true };
    }
    let sum: f64 = hits.iter().map(|&i| index.waypoints[i].speed_limit).sum();
    SpeedEstimate { mean_speed_kmh: sum / hits.len() as f64, waypoint_count: hits.len(), no_coverage: false }
}

/// Estimated size and user speed of one cell.
#[derive(Debug, Clone, PartialEq)]
pub struct CellGeometry {
    pub cell_id: String,
    pub latitude: f64,
    pub longitude: f64,
    pub radius_km: f64,
    pub mean_speed_kmh: f64,
    pub waypoint_count: usize,
    pub radius_fallback: bool,
    pub speed_fallback: bool,
}

pub fn estimate_geometry(
    cells: &[CellInfo],
    waypoints: &[SpeedWaypoint],
    fallback_radius_km: f64,
) -> Vec<CellGeometry> {
    let lookup: HashMap<&str, &CellInfo> = cells.iter().map(|c| (c.cell_id.as_str(), c)).collect();
    let index = WaypointIndex::new(waypoints);
    cells
        .iter()
        .map(|c| {
            let size = estimate_cell_size(c, &lookup, fallback_radius_km);
            let speed = estimate_cell_speed(c.latitude, c.longitude, size.radius_km, &index);
            CellGeometry {
                cell_id: c.cell_id.clone(),
                latitude: c.latitude,
                longitude: c.longitude,
                radius_km: size.radius_km,
                mean_speed_kmh: speed.mean_speed_kmh,
                waypoint_count: speed.waypoint_count,
                radius_fallback: size.fallback,
                speed_fallback: speed.no_coverage,
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ingest::TravelMode;

    fn cell(id: &str, lat: f64, lon: f64, neighbors: &[&str]) -> CellInfo {
        CellInfo {
            cell_id: id.into(),
            site_name: String::new(),
            enb_id: String::new(),
            latitude: lat,
            longitude: lon,
            bearing: 0.0,
            neighbor_ids: neighbors.iter().map(|s| s.to_string()).collect(),
        }
    }

    fn waypoint(lat: f64, lon: f64, speed: f64) -> SpeedWaypoint {
        SpeedWaypoint { latitude: lat, longitude: lon, speed_limit: speed, travel_mode: TravelMode::Driving }
    }

    /// Latitude offset in degrees for a northward distance in km.
    fn north(km: f64) -> f64 {
        (km / EARTH_RADIUS_KM).to_degrees()
    }

    #[test]
    fn single_neighbor_size_is_its_distance() {
        let cells = [cell("A", 10.0, 20.0, &["B"]), cell("B", 10.0 + north(2.0), 20.0, &[])];
        let lookup: HashMap<_, _> = cells.iter().map(|c| (c.cell_id.as_str(), c)).collect();
        let s = estimate_cell_size(&cells[0], &lookup, 5.0);
        assert!((s.radius_km - 2.0).abs() < 1e-9);
        assert!(!s.fallback);
    }

    #[test]
    fn ten_neighbors_interpolated_percentile() {
        let ids: Vec<String> = (1..=10).map(|i| format!("N{i}")).collect();
        let id_refs: Vec<&str> = ids.iter().map(String::as_str).collect();
        let mut cells = vec![cell("A", 0.0, 0.0, &id_refs)];
        for (i, id) in ids.iter().enumerate() {
            cells.push(cell(id, north((i + 1) as f64), 0.0, &[]));
        }
        let lookup: HashMap<_, _> = cells.iter().map(|c| (c.cell_id.as_str(), c)).collect();
        let s = estimate_cell_size(&cells[0], &lookup, 5.0);
        assert!((s.radius_km - 9.1).abs() < 1e-9, "{}", s.radius_km);
    }

    #[test]
    fn no_neighbors_falls_back() {
        let cells = [cell("A", 0.0, 0.0, &["ghost"])];
        let lookup: HashMap<_, _> = cells.iter().map(|c| (c.cell_id.as_str(), c)).collect();
        let s = estimate_cell_size(&cells[0], &lookup, DEFAULT_FALLBACK_RADIUS_KM);
        assert_eq!(s.radius_km, 5.0);
        assert!(s.fallback);
    }

    #[test]
    fn speed_is_mean_of_waypoints_in_radius() {
        let wps = vec![waypoint(0.0, 0.0, 30.0), waypoint(north(0.5), 0.0, 50.0), waypoint(north(3.0), 0.0, 90.0)];
        let index = WaypointIndex::new(&wps);
        let s = estimate_cell_speed(0.0, 0.0, 1.0, &index);
        assert_eq!(s.mean_speed_kmh, 40.0);
        assert_eq!(s.waypoint_count, 2);
        let none = estimate_cell_speed(north(10.0), 0.0, 1.0, &index);
        assert_eq!(none.mean_speed_kmh, 0.0);
        assert!(none.no_coverage);
    }

    #[test]
    fn index_handles_antimeridian_with_full_scan() {
        let wps = vec![waypoint(0.0, 179.999, 10.0), waypoint(0.0, -179.999, 20.0)];
        let index = WaypointIndex::new(&wps);
        assert_eq!(index.within(0.0, 180.0, 1.0), vec![0, 1]);
    }
}
