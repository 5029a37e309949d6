//! Rendering of every output file to bytes.

use kpisentinel::forecast::{MaeTriplet, StepPrediction};
use kpisentinel::ingest::{format_timestamp, KpiKind};
use kpisentinel::signatures::AnomalyReport;
use serde::Serialize;

use crate::error::{CliError, CliResult};
use crate::pipeline::{Clustering, Detection, Forecasts, KpiData};

pub const CLUSTERS: &str = "clusters.csv";
pub const SIGNATURES: &str = "signatures.csv";
pub const ANOMALIES: &str = "anomalies.json";
pub const PLOT_SIGNATURES: &str = "plot_signatures.csv";
pub const CORRELATIONS: &str = "correlations.csv";
pub const FORECAST: &str = "forecast.csv";
pub const METRICS: &str = "metrics.json";
pub const PLOT_MAE: &str = "plot_mae.csv";

fn csv_bytes(header: &[&str], rows: impl IntoIterator<Item = Vec<String>>) -> CliResult<Vec<u8>> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let err = |e: csv::Error| CliError::Data(format!("csv encoding: {e}"));
    w.write_record(header).map_err(err)?;
    for r in rows {
        w.write_record(&r).map_err(err)?;
    }
    w.into_inner().map_err(|e| CliError::Data(format!("csv encoding: {e}")))
}

fn num(v: f64) -> String {
    if v.is_infinite() {
        if v > 0.0 { "inf" } else { "-inf" }.to_string()
    } else {
        v.to_string()
    }
}

pub fn clusters_csv(clustering: &Clustering) -> CliResult<Vec<u8>> {
    let rows = clustering
        .geometry
        .iter()
        .zip(&clustering.partition.labels)
        .map(|(g, l)| vec![g.cell_id.clone(), l.to_string(), num(g.mean_speed_kmh), num(g.radius_km)]);
    csv_bytes(&["cell_id", "cluster", "mean_speed_kmh", "radius_km"], rows)
}

pub fn signatures_csv(detection: &Detection) -> CliResult<Vec<u8>> {
    let rows = detection.signatures.iter().flat_map(|s| {
        (0..s.reference().len()).map(move |h| {
            vec![
                s.cluster().to_string(),
                s.kpi().to_string(),
                h.to_string(),
                num(s.reference()[h]),
                num(s.dispersion()[h]),
            ]
        })
    });
    csv_bytes(&["cluster", "kpi", "hour_of_week", "reference", "dispersion"], rows)
}

pub fn anomalies_json(report: &AnomalyReport) -> CliResult<Vec<u8>> {
    let mut v = serde_json::to_vec_pretty(report).map_err(|e| CliError::Data(format!("json encoding: {e}")))?;
    v.push(b'\n');
    Ok(v)
}

pub fn plot_signatures_csv(detection: &Detection) -> CliResult<Vec<u8>> {
    let rows = detection.pairs.iter().flat_map(|p| {
        let d = &p.detection;
        (0..d.observed.len()).map(move |t| {
            vec![
                p.cluster.to_string(),
                p.kpi.to_string(),
                t.to_string(),
                num(d.observed[t]),
                num(d.aligned.reference[t]),
                num(d.scores.observed_trend[t]),
                num(d.scores.reference_trend[t]),
                num(d.scores.score[t]),
            ]
        })
    });
    csv_bytes(&["cluster", "kpi", "hour", "observed", "reference", "observed_trend", "reference_trend", "score"], rows)
}

pub fn correlations_csv(detection: &Detection) -> CliResult<Vec<u8>> {
    let mut rows = Vec::new();
    for (c, m) in &detection.correlations {
        for a in KpiKind::ALL {
            for b in KpiKind::ALL {
                rows.push(vec![
                    c.to_string(),
                    a.to_string(),
                    b.to_string(),
                    m.get(a.index(), b.index()).map(num).unwrap_or_default(),
                ]);
            }
        }
    }
    csv_bytes(&["cluster", "kpi_a", "kpi_b", "correlation"], rows)
}

pub fn forecast_csv(data: &KpiData, forecasts: &Forecasts) -> CliResult<Vec<u8>> {
    let rows = forecasts.series.iter().flat_map(|s| {
        s.steps.iter().map(move |p| {
            vec![
                data.cell_ids[s.cell].clone(),
                s.kpi.to_string(),
                format_timestamp(&data.timestamp(p.target_index)),
                num(p.truth),
                num(p.predicted),
                num(p.last_value),
            ]
        })
    });
    csv_bytes(&["cell_id", "kpi", "timestamp", "true", "predicted", "last_value"], rows)
}

#[derive(Debug, Clone, Serialize)]
struct Entry {
    n: usize,
    #[serde(flatten)]
    mae: MaeTriplet<f64>,
}

fn entry(steps: &[&StepPrediction<f64>]) -> CliResult<Option<Entry>> {
    if steps.is_empty() {
        return Ok(None);
    }
    let truth: Vec<f64> = steps.iter().map(|s| s.truth).collect();
    let pred: Vec<f64> = steps.iter().map(|s| s.predicted).collect();
    let base: Vec<f64> = steps.iter().map(|s| s.last_value).collect();
    Ok(Some(Entry { n: steps.len(), mae: MaeTriplet::compute(&truth, &pred, &base)? }))
}

#[derive(Serialize)]
struct SeriesEntry<'a> {
    cell_id: &'a str,
    kpi: KpiKind,
    cluster: usize,
    #[serde(flatten)]
    entry: Entry,
}

#[derive(Serialize)]
struct ClusterEntry {
    cluster: usize,
    kpi: KpiKind,
    #[serde(flatten)]
    entry: Entry,
}

#[derive(Serialize)]
struct KpiEntry {
    kpi: KpiKind,
    #[serde(flatten)]
    entry: Entry,
}

#[derive(Serialize)]
struct Metrics<'a> {
    units: &'static str,
    overall: Option<Entry>,
    per_kpi: Vec<KpiEntry>,
    per_cluster: Vec<ClusterEntry>,
    per_series: Vec<SeriesEntry<'a>>,
}

/// MAE triplets per series, per (cluster, KPI), per KPI and overall; pooled
/// values average over all prediction steps of the group.
pub fn metrics_json(data: &KpiData, forecasts: &Forecasts, clusters: usize) -> CliResult<Vec<u8>> {
    let mut per_series = Vec::new();
    for s in &forecasts.series {
        let steps: Vec<&StepPrediction<f64>> = s.steps.iter().collect();
        if let Some(entry) = entry(&steps)? {
            per_series.push(SeriesEntry { cell_id: &data.cell_ids[s.cell], kpi: s.kpi, cluster: s.cluster, entry });
        }
    }
    let mut per_cluster = Vec::new();
    for c in 0..clusters {
        for kpi in KpiKind::ALL {
            let steps: Vec<&StepPrediction<f64>> =
                forecasts.series.iter().filter(|s| s.cluster == c && s.kpi == kpi).flat_map(|s| &s.steps).collect();
            if let Some(entry) = entry(&steps)? {
                per_cluster.push(ClusterEntry { cluster: c, kpi, entry });
            }
        }
    }
    let mut per_kpi = Vec::new();
    for kpi in KpiKind::ALL {
        let steps: Vec<&StepPrediction<f64>> =
            forecasts.series.iter().filter(|s| s.kpi == kpi).flat_map(|s| &s.steps).collect();
        if let Some(entry) = entry(&steps)? {
            per_kpi.push(KpiEntry { kpi, entry });
        }
    }
    let all: Vec<&StepPrediction<f64>> = forecasts.series.iter().flat_map(|s| &s.steps).collect();
    let m = Metrics { units: "normalized", overall: entry(&all)?, per_kpi, per_cluster, per_series };
    let mut v = serde_json::to_vec_pretty(&m).map_err(|e| CliError::Data(format!("json encoding: {e}")))?;
    v.push(b'\n');
    Ok(v)
}

/// MAE triplets split by whether the target hour falls inside a detected
/// event of the series' cluster and KPI.
pub fn plot_mae_csv(forecasts: &Forecasts, detection: Option<&Detection>) -> CliResult<Vec<u8>> {
    let mut rows = Vec::new();
    for (group, abnormal) in [("normal", false), ("abnormal", true)] {
        for kpi in KpiKind::ALL {
            let steps: Vec<&StepPrediction<f64>> = forecasts
                .series
                .iter()
                .filter(|s| s.kpi == kpi)
                .flat_map(|s| {
                    s.steps.iter().filter(move |p| {
                        detection.is_some_and(|d| d.is_abnormal(s.cluster, kpi, p.target_index)) == abnormal
                    })
                })
                .collect();
            if let Some(e) = entry(&steps)? {
                rows.push(vec![
                    group.to_string(),
                    kpi.to_string(),
                    e.n.to_string(),
                    num(e.mae.model_vs_true),
                    num(e.mae.baseline_vs_true),
                    num(e.mae.model_vs_baseline),
                ]);
            }
        }
    }
    csv_bytes(&["group", "kpi", "n", "model_vs_true", "baseline_vs_true", "model_vs_baseline"], rows)
}
