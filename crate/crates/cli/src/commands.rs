//! Subcommand implementations shared by the binary and the tests.

use std::io::Write;
use std::path::{Path, PathBuf};

use kpisentinel::ingest::{
    default_blobs, generate_synthetic, AnomalySpec, AnomalyTarget, GeneratorConfig, KpiKind, SyntheticDataset,
};

use crate::artifacts;
use crate::config::{PipelineConfig, DATA_CONFIG_FILE};
use crate::error::{CliError, CliResult};
use crate::output::OutputDir;
use crate::pipeline::{build_matrices, cluster_stage, detect_stage, forecast_stage, load_inputs};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Stage {
    Cluster,
    Detect,
    Forecast,
    Run,
}

impl Stage {
    fn name(self) -> &'static str {
        match self {
            Stage::Cluster => "clustering",
            Stage::Detect => "anomaly detection",
            Stage::Forecast => "forecasting",
            Stage::Run => "the pipeline",
        }
    }

    /// Files written by this stage.
    pub fn artifacts(self) -> &'static [&'static str] {
        use artifacts::*;
        match self {
            Stage::Cluster => &[CLUSTERS],
            Stage::Detect => &[SIGNATURES, ANOMALIES, PLOT_SIGNATURES, CORRELATIONS],
            Stage::Forecast => &[FORECAST, METRICS, PLOT_MAE],
            Stage::Run => {
                &[CLUSTERS, SIGNATURES, ANOMALIES, PLOT_SIGNATURES, CORRELATIONS, FORECAST, METRICS, PLOT_MAE]
            }
        }
    }
}

/// Runs a pipeline stage and writes its artifacts into `cfg.out`. Nothing is
/// left behind when a step fails.
pub fn execute(stage: Stage, cfg: &PipelineConfig, log: &mut (dyn Write + Send)) -> CliResult<Vec<PathBuf>> {
    let seed = cfg.seed.ok_or(CliError::MissingSeed(stage.name()))?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.jobs)
        .build()
        .map_err(|e| CliError::Data(format!("thread pool: {e}")))?;
    pool.install(|| execute_in_pool(stage, cfg, seed, log))
}

fn execute_in_pool(
    stage: Stage,
    cfg: &PipelineConfig,
    seed: u64,
    log: &mut (dyn Write + Send),
) -> CliResult<Vec<PathBuf>> {
    let inputs = load_inputs(cfg)?;
    let mut out = OutputDir::create(&cfg.out)?;
    let clustering = cluster_stage(&inputs, cfg, seed)?;
    if matches!(stage, Stage::Cluster | Stage::Run) {
        out.write(artifacts::CLUSTERS, &artifacts::clusters_csv(&clustering)?)?;
    }
    if stage == Stage::Cluster {
        return Ok(out.commit());
    }

    let data = build_matrices(&inputs, cfg.fill)?;
    for w in &data.warnings {
        let _ = writeln!(log, "warning: {w}");
    }
    let detection = match stage {
        Stage::Detect | Stage::Run => Some(detect_stage(&data, &clustering, cfg)?),
        _ => match detect_stage(&data, &clustering, cfg) {
            Ok(d) => Some(d),
            Err(e) => {
                let _ = writeln!(log, "warning: no anomaly split for plot_mae.csv: {e}");
                None
            }
        },
    };
    if let (Stage::Detect | Stage::Run, Some(d)) = (stage, &detection) {
        for w in &d.warnings {
            let _ = writeln!(log, "warning: {w}");
        }
        out.write(artifacts::SIGNATURES, &artifacts::signatures_csv(d)?)?;
        out.write(artifacts::ANOMALIES, &artifacts::anomalies_json(&d.report)?)?;
        out.write(artifacts::PLOT_SIGNATURES, &artifacts::plot_signatures_csv(d)?)?;
        out.write(artifacts::CORRELATIONS, &artifacts::correlations_csv(d)?)?;
        let _ = writeln!(log, "{} anomaly events", d.report.len());
    }
    if stage == Stage::Detect {
        return Ok(out.commit());
    }

    let forecasts = forecast_stage(&data, &clustering, cfg, seed)?;
    for w in &forecasts.warnings {
        let _ = writeln!(log, "warning: {w}");
    }
    out.write(artifacts::FORECAST, &artifacts::forecast_csv(&data, &forecasts)?)?;
    out.write(artifacts::METRICS, &artifacts::metrics_json(&data, &forecasts, cfg.clusters)?)?;
    out.write(artifacts::PLOT_MAE, &artifacts::plot_mae_csv(&forecasts, detection.as_ref())?)?;
    Ok(out.commit())
}

#[derive(Debug, Clone, PartialEq)]
pub struct GenerateOptions {
    pub out: PathBuf,
    pub cells: usize,
    pub weeks: usize,
    pub seed: u64,
    pub blobs: usize,
    pub anomalies: usize,
    pub anomaly_sigma: f64,
    pub anomaly_hours: usize,
}

impl GenerateOptions {
    pub fn new(out: impl Into<PathBuf>, cells: usize, weeks: usize, seed: u64) -> Self {
        Self {
            out: out.into(),
            cells,
            weeks,
            seed,
            blobs: kpisentinel::geo::DEFAULT_CLUSTERS,
            anomalies: 2,
            anomaly_sigma: 5.0,
            anomaly_hours: 72,
        }
    }

    /// Anomalies are placed in the second half of the span, on blobs and
    /// KPIs chosen round-robin from the seed.
    pub fn generator_config(&self) -> CliResult<GeneratorConfig> {
        let mut g = GeneratorConfig::new(self.cells, self.weeks);
        g.blobs = default_blobs(self.blobs.max(1));
        let hours = g.hours();
        let lo = hours / 2;
        if self.anomalies > 0 && (self.anomaly_hours == 0 || lo + self.anomaly_hours > hours) {
            return Err(CliError::Data(format!(
                "anomaly duration {} h does not fit in the second half of {hours} h",
                self.anomaly_hours
            )));
        }
        let room = hours.saturating_sub(lo + self.anomaly_hours) + 1;
        for j in 0..self.anomalies {
            let s = self.seed as usize;
            g.anomalies.push(AnomalySpec {
                target: AnomalyTarget::Blob((s.wrapping_mul(3) + j * 5) % g.blobs.len()),
                kpi: KpiKind::ALL[(s + j) % 4],
                start_hour: lo + (s.wrapping_mul(13) + j * 37) % room,
                duration_hours: self.anomaly_hours,
                magnitude_sigma: self.anomaly_sigma,
            });
        }
        Ok(g)
    }
}

/// Writes a synthetic dataset plus a config file carrying its seed.
pub fn generate(opts: &GenerateOptions) -> CliResult<SyntheticDataset> {
    let data = generate_synthetic(&opts.generator_config()?, opts.seed)?;
    data.write_dir(&opts.out)?;
    let conf = format!("# written by kpisentinel generate\nseed = {}\n", opts.seed);
    let path = opts.out.join(DATA_CONFIG_FILE);
    std::fs::write(&path, conf).map_err(|e| CliError::io(&path, e))?;
    Ok(data)
}

/// Path of the data-directory config if present.
pub fn data_config(input_dir: &Path) -> Option<PathBuf> {
    let p = input_dir.join(DATA_CONFIG_FILE);
    p.is_file().then_some(p)
}
