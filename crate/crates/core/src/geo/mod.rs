//! Cell geometry, user speed estimation and spatial/speed clustering.

mod distance;
mod geometry;
mod kmeans;

pub use distance::{haversine, haversine_km, LatLon, LocalProjection, EARTH_RADIUS_KM};
pub use geometry::{
    estimate_cell_size, estimate_cell_speed, estimate_geometry, CellGeometry, CellSize, SpeedEstimate, WaypointIndex,
    CELL_SIZE_PERCENTILE, DEFAULT_FALLBACK_RADIUS_KM,
};
pub use kmeans::{
    cluster_cells, squared_distance, standardized_features, within_cluster_sse, ClusterInput, ClusterOptions,
    ClusterPartition, ClusterSummary, DEFAULT_CLUSTERS, DEFAULT_MAX_ITERATIONS,
};
