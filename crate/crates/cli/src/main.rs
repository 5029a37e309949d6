use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use kpisentinel_cli::commands::data_config;
use kpisentinel_cli::config::Origin;
use kpisentinel_cli::{
    execute, generate, validate_config, CliError, CliResult, GenerateOptions, PipelineConfig, RawConfig, Stage,
    ValidateOptions,
};

#[derive(Parser)]
#[command(name = "kpisentinel", version, about = "Cell KPI anomaly detection and next-step forecasting")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write a seeded synthetic network (cells, neighbors, counters, speed map).
    Generate(GenerateArgs),
    /// Estimate cell geometry and cluster cells by location and speed.
    Cluster(PipelineArgs),
    /// Build cluster signatures and report anomaly events.
    Detect(PipelineArgs),
    /// Walk-forward forecasting with the last-value baseline.
    Forecast(PipelineArgs),
    /// All stages.
    Run(PipelineArgs),
    /// Check the configuration and print the resolved settings.
    Validate(PipelineArgs),
}

#[derive(Args)]
struct GenerateArgs {
    #[arg(long, default_value = "data")]
    out: PathBuf,
    #[arg(long, default_value_t = 200)]
    cells: usize,
    #[arg(long, default_value_t = 1)]
    weeks: usize,
    #[arg(long)]
    seed: u64,
    /// Number of location/speed blobs.
    #[arg(long, default_value_t = 11)]
    blobs: usize,
    /// Number of injected anomalies.
    #[arg(long, default_value_t = 2)]
    anomalies: usize,
    /// Anomaly magnitude in noise standard deviations.
    #[arg(long, default_value_t = 5.0)]
    anomaly_sigma: f64,
    #[arg(long, default_value_t = 72)]
    anomaly_hours: usize,
}

#[derive(Args, Default)]
struct PipelineArgs {
    /// `key = value` configuration file.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Directory holding cells.csv, neighbors.csv, pm.csv and speedmap.csv.
    #[arg(long)]
    input: Option<PathBuf>,
    #[arg(long)]
    cells: Option<PathBuf>,
    #[arg(long)]
    neighbors: Option<PathBuf>,
    #[arg(long)]
    pm: Option<PathBuf>,
    #[arg(long)]
    speedmap: Option<PathBuf>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    seed: Option<String>,
    #[arg(long)]
    jobs: Option<String>,
    /// `cell` or `cluster`.
    #[arg(long)]
    scope: Option<String>,
    #[arg(long)]
    refit_every: Option<String>,
    /// Number of clusters (K).
    #[arg(short = 'k', long = "clusters")]
    clusters: Option<String>,
    /// Feature window length (W).
    #[arg(long)]
    window: Option<String>,
    /// Maximum AR lag (m_T).
    #[arg(long)]
    max_lag: Option<String>,
    #[arg(long)]
    learning_rate: Option<String>,
    #[arg(long)]
    n_estimators: Option<String>,
    #[arg(long)]
    threshold: Option<String>,
    #[arg(long)]
    min_run: Option<String>,
    #[arg(long)]
    reference_weeks: Option<String>,
    /// Keep missing samples instead of interpolating them.
    #[arg(long)]
    no_fill: bool,
    /// Any configuration key, as KEY=VALUE; may be repeated.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    set: Vec<String>,
    /// Warn about unknown configuration keys instead of failing.
    #[arg(long)]
    allow_unknown_keys: bool,
}

impl PipelineArgs {
    fn resolve(&self) -> CliResult<(PipelineConfig, Vec<String>)> {
        let mut raw = RawConfig::default();
        let env = RawConfig::from_env(std::env::vars());
        let input_dir = self.input.clone().or_else(|| {
            env.entries.iter().rev().find(|e| e.key.eq_ignore_ascii_case("input_dir")).map(|e| PathBuf::from(&e.value))
        });
        if let Some(p) = input_dir.as_deref().and_then(data_config) {
            raw.extend(RawConfig::load(&p).map_err(|e| CliError::io(&p, e))?);
        }
        if let Some(p) = &self.config {
            if !p.is_file() {
                return Err(CliError::MissingInput(p.clone()));
            }
            raw.extend(RawConfig::load(p).map_err(|e| CliError::io(p, e))?);
        }
        raw.extend(env);
        let paths = [
            ("input_dir", &self.input),
            ("cells", &self.cells),
            ("neighbors", &self.neighbors),
            ("pm", &self.pm),
            ("speedmap", &self.speedmap),
            ("out", &self.out),
        ];
        for (k, v) in paths {
            if let Some(v) = v {
                raw.set(k, v.display().to_string(), Origin::Flag);
            }
        }
        let values = [
            ("seed", &self.seed),
            ("jobs", &self.jobs),
            ("scope", &self.scope),
            ("refit_every", &self.refit_every),
            ("K", &self.clusters),
            ("W", &self.window),
            ("m_T", &self.max_lag),
            ("learning_rate", &self.learning_rate),
            ("n_estimators", &self.n_estimators),
            ("threshold", &self.threshold),
            ("min_run", &self.min_run),
            ("reference_weeks", &self.reference_weeks),
        ];
        for (k, v) in values {
            if let Some(v) = v {
                raw.set(k, v.clone(), Origin::Flag);
            }
        }
        if self.no_fill {
            raw.set("fill", "false", Origin::Flag);
        }
        for kv in &self.set {
            match kv.split_once('=') {
                Some((k, v)) => raw.set(k.trim(), v.trim(), Origin::Flag),
                None => {
                    return Err(CliError::Config(vec![kpisentinel_cli::config::ConfigIssue {
                        key: kv.clone(),
                        message: format!("--set expects KEY=VALUE, got `{kv}`"),
                    }]))
                }
            }
        }
        let v = validate_config(&raw, ValidateOptions { allow_unknown: self.allow_unknown_keys })
            .map_err(CliError::Config)?;
        Ok((v.config, v.warnings))
    }
}

fn run(cli: Cli) -> CliResult<()> {
    let stderr = &mut std::io::stderr();
    let (stage, args) = match cli.command {
        Command::Generate(a) => {
            let mut opts = GenerateOptions::new(&a.out, a.cells, a.weeks, a.seed);
            opts.blobs = a.blobs;
            opts.anomalies = a.anomalies;
            opts.anomaly_sigma = a.anomaly_sigma;
            opts.anomaly_hours = a.anomaly_hours;
            let data = generate(&opts)?;
            println!(
                "wrote {} cells, {} counter rows, {} waypoints to {}",
                data.cells.len(),
                data.pm.len(),
                data.waypoints.len(),
                a.out.display()
            );
            return Ok(());
        }
        Command::Validate(a) => {
            let (cfg, warnings) = a.resolve()?;
            for w in warnings {
                eprintln!("warning: {w}");
            }
            print!("{}", cfg.to_conf_string());
            return Ok(());
        }
        Command::Cluster(a) => (Stage::Cluster, a),
        Command::Detect(a) => (Stage::Detect, a),
        Command::Forecast(a) => (Stage::Forecast, a),
        Command::Run(a) => (Stage::Run, a),
    };
    let (cfg, warnings) = args.resolve()?;
    for w in warnings {
        eprintln!("warning: {w}");
    }
    let written = execute(stage, &cfg, stderr)?;
    for p in written {
        println!("{}", p.display());
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
