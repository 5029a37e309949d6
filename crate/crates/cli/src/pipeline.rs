//! Pipeline stages: load, matrices, clustering, detection, forecasting.

use std::collections::BTreeMap;
use std::path::Path;

use chrono::{DateTime, TimeDelta, Utc};
use kpisentinel::forecast::{walk_forward, walk_forward_pooled, StepPrediction};
use kpisentinel::geo::{
    cluster_cells, estimate_geometry, CellGeometry, ClusterInput, ClusterOptions, ClusterPartition,
};
use kpisentinel::ingest::{
    build_kpi_matrix, compute_kpis, parse_cells, parse_neighbors, parse_pm, parse_speedmap, CellInfo, KpiKind,
    KpiMatrix, MatrixOptions, PmRecord, SpeedWaypoint, HOURS_PER_WEEK,
};
use kpisentinel::signatures::{
    cluster_correlation, cluster_median_series, cluster_signature, detect_cluster, normalize, AnomalyReport,
    ClusterDetection, ClusterSignature, CorrelationMatrix,
};
use rayon::prelude::*;

use crate::config::{PipelineConfig, Scope};
use crate::error::{CliError, CliResult};

pub struct Inputs {
    pub cells: Vec<CellInfo>,
    pub pm: Vec<PmRecord>,
    pub waypoints: Vec<SpeedWaypoint>,
}

fn require(path: &Path) -> CliResult<()> {
    if path.is_file() {
        Ok(())
    } else {
        Err(CliError::MissingInput(path.to_path_buf()))
    }
}

/// Reads all four input files; any absent file is reported before parsing starts.
pub fn load_inputs(cfg: &PipelineConfig) -> CliResult<Inputs> {
    let paths = [cfg.cells_path(), cfg.neighbors_path(), cfg.pm_path(), cfg.speedmap_path()];
    for p in &paths {
        require(p)?;
    }
    let mut cells = parse_cells(&paths[0])?;
    parse_neighbors(&paths[1], &mut cells)?;
    let pm = parse_pm(&paths[2])?;
    let waypoints = parse_speedmap(&paths[3])?;
    if cells.is_empty() {
        return Err(CliError::Data(format!("{}: no cells", paths[0].display())));
    }
    if pm.is_empty() {
        return Err(CliError::Data(format!("{}: no counter rows", paths[2].display())));
    }
    Ok(Inputs { cells, pm, waypoints })
}

pub struct KpiData {
    pub start: DateTime<Utc>,
    pub hours: usize,
    pub cell_ids: Vec<String>,
    /// Indexed by [`KpiKind::index`].
    pub matrices: Vec<KpiMatrix<f64>>,
    pub warnings: Vec<String>,
}

impl KpiData {
    pub fn matrix(&self, kind: KpiKind) -> &KpiMatrix<f64> {
        &self.matrices[kind.index()]
    }

    pub fn how_offset(&self) -> usize {
        self.matrices[0].hour_of_week_offset()
    }

    pub fn timestamp(&self, hour: usize) -> DateTime<Utc> {
        self.start + TimeDelta::hours(hour as i64)
    }
}

/// KPI matrices spanning the first to the last counter timestamp.
pub fn build_matrices(inputs: &Inputs, fill: bool) -> CliResult<KpiData> {
    let samples = compute_kpis(&inputs.pm)?;
    let start = inputs.pm.iter().map(|r| r.timestamp).min().expect("non-empty");
    let end = inputs.pm.iter().map(|r| r.timestamp).max().expect("non-empty");
    let hours = (end - start).num_hours() as usize + 1;
    let cell_ids: Vec<String> = inputs.cells.iter().map(|c| c.cell_id.clone()).collect();
    let mut matrices = Vec::with_capacity(4);
    let mut warnings = Vec::new();
    for kind in KpiKind::ALL {
        let b = build_kpi_matrix(&samples, kind, &cell_ids, start, hours, MatrixOptions { fill })?;
        if b.unknown_cells > 0 {
            warnings.push(format!("{kind}: {} samples for cells missing from the inventory ignored", b.unknown_cells));
        }
        if b.duplicates > 0 {
            warnings.push(format!("{kind}: {} duplicate samples ignored", b.duplicates));
        }
        if b.filled > 0 {
            warnings.push(format!("{kind}: {} missing samples filled", b.filled));
        }
        matrices.push(b.matrix);
    }
    Ok(KpiData { start, hours, cell_ids, matrices, warnings })
}

pub struct Clustering {
    pub geometry: Vec<CellGeometry>,
    pub partition: ClusterPartition<f64>,
}

pub fn cluster_stage(inputs: &Inputs, cfg: &PipelineConfig, seed: u64) -> CliResult<Clustering> {
    let geometry = estimate_geometry(&inputs.cells, &inputs.waypoints, cfg.fallback_radius_km);
    let points: Vec<ClusterInput<f64>> = geometry
        .iter()
        .map(|g| ClusterInput {
            cell_id: g.cell_id.clone(),
            latitude: g.latitude,
            longitude: g.longitude,
            speed_kmh: g.mean_speed_kmh,
        })
        .collect();
    let partition = cluster_cells(&points, cfg.clusters, seed, ClusterOptions::default())?;
    Ok(Clustering { geometry, partition })
}

/// Per-cell min-max normalized rows; `None` for cells without any sample.
pub fn normalized_rows(matrix: &KpiMatrix<f64>) -> Vec<Option<Vec<Option<f64>>>> {
    (0..matrix.n_cells()).map(|i| normalize(matrix.row(i)).ok()).collect()
}

pub struct PairDetection {
    pub cluster: usize,
    pub kpi: KpiKind,
    pub detection: ClusterDetection<f64>,
}

pub struct Detection {
    pub signatures: Vec<ClusterSignature<f64>>,
    pub pairs: Vec<PairDetection>,
    pub correlations: Vec<(usize, CorrelationMatrix<f64>)>,
    pub report: AnomalyReport,
    pub warnings: Vec<String>,
}

impl Detection {
    /// Whether `hour` lies inside a detected event of (cluster, kpi).
    pub fn is_abnormal(&self, cluster: usize, kpi: KpiKind, hour: usize) -> bool {
        self.report
            .events
            .iter()
            .any(|e| e.cluster == cluster && e.kpi == kpi && (e.start_hour..=e.end_hour).contains(&hour))
    }
}

pub fn detect_stage(data: &KpiData, clustering: &Clustering, cfg: &PipelineConfig) -> CliResult<Detection> {
    if data.hours < HOURS_PER_WEEK {
        return Err(CliError::Data(format!(
            "anomaly detection needs at least one complete week ({HOURS_PER_WEEK} hours), data spans {}",
            data.hours
        )));
    }
    let k = clustering.partition.k;
    let normalized: Vec<Vec<Option<Vec<Option<f64>>>>> =
        KpiKind::ALL.iter().map(|&kind| normalized_rows(data.matrix(kind))).collect();
    let members: Vec<Vec<usize>> = (0..k).map(|c| clustering.partition.members(c)).collect();
    let params = cfg.detection();
    let offset = data.how_offset();

    let jobs: Vec<(usize, KpiKind)> =
        (0..k).flat_map(|c| KpiKind::ALL.into_iter().map(move |kind| (c, kind))).collect();
    type PairOut = Option<(ClusterSignature<f64>, PairDetection)>;
    let results: Vec<CliResult<PairOut>> = jobs
        .par_iter()
        .map(|&(c, kind)| {
            let rows: Vec<&Vec<Option<f64>>> =
                members[c].iter().filter_map(|&i| normalized[kind.index()][i].as_ref()).collect();
            if rows.is_empty() {
                return Ok(None);
            }
            let signature = cluster_signature(c, kind, &rows, offset)?;
            let detection = detect_cluster(c, kind, &rows, offset, cfg.reference_weeks, &params)?;
            Ok(Some((signature, PairDetection { cluster: c, kpi: kind, detection })))
        })
        .collect();

    let mut signatures = Vec::new();
    let mut pairs = Vec::new();
    let mut warnings = Vec::new();
    for ((c, kind), r) in jobs.iter().zip(results) {
        match r? {
            Some((s, p)) => {
                signatures.push(s);
                pairs.push(p);
            }
            None => warnings.push(format!("cluster {c} {kind}: no cell with data, skipped")),
        }
    }

    let correlations = (0..k)
        .map(|c| {
            let series: Vec<Vec<Option<f64>>> = KpiKind::ALL
                .iter()
                .map(|kind| {
                    let rows: Vec<&Vec<Option<f64>>> =
                        members[c].iter().filter_map(|&i| normalized[kind.index()][i].as_ref()).collect();
                    if rows.is_empty() {
                        vec![None; data.hours]
                    } else {
                        cluster_median_series(&rows).expect("rows share a length")
                    }
                })
                .collect();
            (c, cluster_correlation(&series))
        })
        .collect();

    let report = AnomalyReport::merge(pairs.iter().map(|p| p.detection.report.clone()));
    Ok(Detection { signatures, pairs, correlations, report, warnings })
}

pub struct SeriesForecast {
    pub cell: usize,
    pub kpi: KpiKind,
    pub cluster: usize,
    pub steps: Vec<StepPrediction<f64>>,
}

pub struct Forecasts {
    pub series: Vec<SeriesForecast>,
    pub warnings: Vec<String>,
}

/// Seed for an independent stream identified by `index`.
pub fn derive_seed(base: u64, index: u64) -> u64 {
    let mut z = base ^ index.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

pub fn forecast_stage(
    data: &KpiData,
    clustering: &Clustering,
    cfg: &PipelineConfig,
    seed: u64,
) -> CliResult<Forecasts> {
    let wf = cfg.walk_forward();
    wf.validate()?;
    let needed = wf.first_target() + 1;
    if data.hours < needed {
        return Err(CliError::Data(format!(
            "forecasting needs at least W + min_train_rows + 1 = {needed} hours, data spans {}",
            data.hours
        )));
    }
    let labels = &clustering.partition.labels;
    let mut warnings = Vec::new();
    // dense normalized series per (cell, kpi), in cell-major order
    let mut series: Vec<(usize, KpiKind, Vec<f64>)> = Vec::new();
    for cell in 0..data.cell_ids.len() {
        for kind in KpiKind::ALL {
            let row = data.matrix(kind).row(cell);
            match normalize(row).ok().and_then(|r| r.into_iter().collect::<Option<Vec<f64>>>()) {
                Some(dense) => series.push((cell, kind, dense)),
                None => {
                    warnings.push(format!("{} {kind}: series has missing samples, not forecast", data.cell_ids[cell]))
                }
            }
        }
    }

    let out = match cfg.scope {
        Scope::Cell => series
            .par_iter()
            .map(|(cell, kind, s)| {
                let steps = walk_forward(s, &wf, derive_seed(seed, (*cell * 4 + kind.index()) as u64))?;
                Ok(SeriesForecast { cell: *cell, kpi: *kind, cluster: labels[*cell], steps })
            })
            .collect::<CliResult<Vec<_>>>()?,
        Scope::Cluster => {
            let mut groups: BTreeMap<(usize, usize), Vec<usize>> = BTreeMap::new();
            for (i, (cell, kind, _)) in series.iter().enumerate() {
                groups.entry((labels[*cell], kind.index())).or_default().push(i);
            }
            let groups: Vec<((usize, usize), Vec<usize>)> = groups.into_iter().collect();
            let pooled = groups
                .par_iter()
                .map(|((c, ki), idx)| {
                    let views: Vec<&[f64]> = idx.iter().map(|&i| series[i].2.as_slice()).collect();
                    let gseed = derive_seed(seed, (1u64 << 32) + (*c * 4 + *ki) as u64);
                    Ok(idx.iter().copied().zip(walk_forward_pooled(&views, &wf, gseed)?).collect::<Vec<_>>())
                })
                .collect::<CliResult<Vec<_>>>()?;
            let mut flat: Vec<(usize, Vec<StepPrediction<f64>>)> = pooled.into_iter().flatten().collect();
            flat.sort_by_key(|(i, _)| *i);
            flat.into_iter()
                .map(|(i, steps)| {
                    let (cell, kind, _) = &series[i];
                    SeriesForecast { cell: *cell, kpi: *kind, cluster: labels[*cell], steps }
                })
                .collect()
        }
    };
    Ok(Forecasts { series: out, warnings })
}
