//! Cluster signatures, trend decomposition, anomaly events and KPI
//! correlation.

mod correlation;
mod decompose;
mod detect;
mod normalize;
mod signature;

pub use correlation::{cluster_correlation, pearson, CorrelationMatrix, MIN_PAIRS};
pub use decompose::{decompose, moving_average_trend, Decomposition, MIN_DECOMPOSE_LEN, TREND_PERIOD};
pub use detect::{
    cluster_median_series, detect_aligned, detect_anomalies, detect_cluster, segment_events, trend_scores,
    AnomalyEvent, AnomalyReport, ClusterDetection, DetectionParams, Direction, TrendScores, DEFAULT_MIN_RUN,
    DEFAULT_REFERENCE_WEEKS, DEFAULT_THRESHOLD, DISPERSION_EPSILON,
};
pub use normalize::{normalize, normalize_dense};
pub use signature::{
    aligned_reference, cluster_signature, daily_holdout_signature, signature_from_weeks, AlignedReference,
    ClusterSignature,
};
