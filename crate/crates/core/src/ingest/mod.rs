//! Ingestion of inventory, counter and speed-map files, KPI computation,
//! matrix assembly and synthetic data generation.

mod kpi;
mod matrix;
mod records;
mod synth;

pub use kpi::{compute_kpis, dl_throughput_mbps, handover_success_rate, rrc_success_rate, KpiKind, KpiSample};
pub use matrix::{build_kpi_matrix, fill_row, hour_of_week, KpiMatrix, MatrixBuild, MatrixOptions, HOURS_PER_WEEK};
pub use records::{
    format_timestamp, is_hour_aligned, parse_cells, parse_neighbors, parse_pm, parse_speedmap, parse_timestamp,
    read_cells, read_neighbors, read_pm, read_speedmap, write_cells, write_neighbors, write_pm, write_speedmap,
    CellInfo, PmRecord, SpeedWaypoint, TravelMode, CELLS_HEADER, NEIGHBORS_HEADER, PM_HEADER, SPEEDMAP_HEADER,
};
pub use synth::{
    default_blobs, generate_synthetic, seasonal_series, AnomalySpec, AnomalyTarget, BlobSpec, GeneratorConfig,
    InjectedAnomaly, KpiProfile, LevelShift, SeasonalSeries, SeasonalSeriesSpec, SyntheticDataset,
};
