//! Pipeline configuration: `key = value` files, `KPISENTINEL_*` environment
//! variables and command line overrides, validated into [`PipelineConfig`].
//!
//! Later layers win: data-directory config, `--config` file, environment,
//! flags.

use std::fmt;
use std::path::{Path, PathBuf};

use kpisentinel::features::FeatureConfig;
use kpisentinel::forecast::{AdaBoostParams, WalkForwardConfig};
use kpisentinel::signatures::DetectionParams;

pub const ENV_PREFIX: &str = "KPISENTINEL_";
/// Written by `generate` next to the data files.
pub const DATA_CONFIG_FILE: &str = "kpisentinel.conf";

/// Canonical key names, in documentation order.
pub const KEYS: &[&str] = &[
    "input_dir",
    "cells",
    "neighbors",
    "pm",
    "speedmap",
    "out",
    "K",
    "W",
    "m_T",
    "learning_rate",
    "n_estimators",
    "max_depth",
    "min_train_rows",
    "threshold",
    "min_run",
    "reference_weeks",
    "fallback_radius_km",
    "seed",
    "jobs",
    "scope",
    "refit_every",
    "fill",
];

fn canonical_key(key: &str) -> Option<&'static str> {
    let k = key.trim();
    if let Some(exact) = KEYS.iter().find(|c| **c == k) {
        return Some(exact);
    }
    let lower = k.to_ascii_lowercase().replace('-', "_");
    let alias = match lower.as_str() {
        "k" | "clusters" => "K",
        "w" | "window" => "W",
        "m_t" | "max_lag" => "m_T",
        "input" => "input_dir",
        "output" | "output_dir" => "out",
        _ => return KEYS.iter().find(|c| c.to_ascii_lowercase() == lower).copied(),
    };
    Some(alias)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Origin {
    File { path: PathBuf, line: usize },
    Env(String),
    Flag,
}

impl fmt::Display for Origin {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Origin::File { path, line } => write!(f, "{}:{line}", path.display()),
            Origin::Env(var) => write!(f, "environment variable {var}"),
            Origin::Flag => f.write_str("command line"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RawEntry {
    pub key: String,
    pub value: String,
    pub origin: Origin,
}

/// Unvalidated settings in application order.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct RawConfig {
    pub entries: Vec<RawEntry>,
    /// Lines that are not `key = value`.
    pub syntax_errors: Vec<ConfigIssue>,
}

impl RawConfig {
    pub fn parse(text: &str, path: &Path) -> Self {
        let mut raw = Self::default();
        for (i, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let origin = Origin::File { path: path.to_path_buf(), line: i + 1 };
            match line.split_once('=') {
                Some((k, v)) if !k.trim().is_empty() => {
                    raw.entries.push(RawEntry { key: k.trim().to_string(), value: v.trim().to_string(), origin })
                }
                _ => raw.syntax_errors.push(ConfigIssue {
                    key: String::new(),
                    message: format!("{origin}: expected `key = value`, found `{line}`"),
                }),
            }
        }
        raw
    }

    pub fn load(path: &Path) -> std::io::Result<Self> {
        Ok(Self::parse(&std::fs::read_to_string(path)?, path))
    }

    pub fn extend(&mut self, other: RawConfig) {
        self.entries.extend(other.entries);
        self.syntax_errors.extend(other.syntax_errors);
    }

    pub fn set(&mut self, key: &str, value: impl Into<String>, origin: Origin) {
        self.entries.push(RawEntry { key: key.to_string(), value: value.into(), origin });
    }

    /// Entries from `KPISENTINEL_<KEY>` variables, sorted by variable name.
    pub fn from_env(vars: impl IntoIterator<Item = (String, String)>) -> Self {
        let mut vars: Vec<(String, String)> = vars.into_iter().filter(|(k, _)| k.starts_with(ENV_PREFIX)).collect();
        vars.sort();
        let mut raw = Self::default();
        for (var, value) in vars {
            let key = var[ENV_PREFIX.len()..].to_string();
            raw.entries.push(RawEntry { key, value, origin: Origin::Env(var) });
        }
        raw
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConfigIssue {
    /// Canonical or offending key; empty for syntax problems.
    pub key: String,
    pub message: String,
}

impl fmt::Display for ConfigIssue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Scope {
    /// One model per (cell, KPI) series.
    #[default]
    Cell,
    /// One model per (cluster, KPI) trained on all member series.
    Cluster,
}

impl Scope {
    pub fn as_str(self) -> &'static str {
        match self {
            Scope::Cell => "cell",
            Scope::Cluster => "cluster",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PipelineConfig {
    pub input_dir: Option<PathBuf>,
    pub cells: Option<PathBuf>,
    pub neighbors: Option<PathBuf>,
    pub pm: Option<PathBuf>,
    pub speedmap: Option<PathBuf>,
    pub out: PathBuf,
    pub clusters: usize,
    pub window: usize,
    pub max_lag: usize,
    pub learning_rate: f64,
    pub n_estimators: usize,
    pub max_depth: usize,
    pub min_train_rows: usize,
    pub threshold: f64,
    pub min_run: usize,
    pub reference_weeks: usize,
    pub fallback_radius_km: f64,
    pub seed: Option<u64>,
    pub jobs: usize,
    pub scope: Scope,
    pub refit_every: usize,
    pub fill: bool,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        Self {
            input_dir: None,
            cells: None,
            neighbors: None,
            pm: None,
            speedmap: None,
            out: PathBuf::from("out"),
            clusters: kpisentinel::geo::DEFAULT_CLUSTERS,
            window: kpisentinel::features::DEFAULT_WINDOW,
            max_lag: kpisentinel::features::DEFAULT_MAX_LAG,
            learning_rate: kpisentinel::forecast::DEFAULT_LEARNING_RATE,
            n_estimators: kpisentinel::forecast::DEFAULT_N_ESTIMATORS,
            max_depth: kpisentinel::forecast::DEFAULT_MAX_DEPTH,
            min_train_rows: kpisentinel::forecast::DEFAULT_MIN_ROWS,
            threshold: kpisentinel::signatures::DEFAULT_THRESHOLD,
            min_run: kpisentinel::signatures::DEFAULT_MIN_RUN,
            reference_weeks: kpisentinel::signatures::DEFAULT_REFERENCE_WEEKS,
            fallback_radius_km: kpisentinel::geo::DEFAULT_FALLBACK_RADIUS_KM,
            seed: None,
            jobs: 1,
            scope: Scope::Cell,
            refit_every: 1,
            fill: true,
        }
    }
}

impl PipelineConfig {
    fn input(&self, explicit: &Option<PathBuf>, name: &str) -> PathBuf {
        explicit.clone().unwrap_or_else(|| self.input_dir.clone().unwrap_or_default().join(name))
    }

    pub fn cells_path(&self) -> PathBuf {
        self.input(&self.cells, "cells.csv")
    }

    pub fn neighbors_path(&self) -> PathBuf {
        self.input(&self.neighbors, "neighbors.csv")
    }

    pub fn pm_path(&self) -> PathBuf {
        self.input(&self.pm, "pm.csv")
    }

    pub fn speedmap_path(&self) -> PathBuf {
        self.input(&self.speedmap, "speedmap.csv")
    }

    pub fn feature_config(&self) -> FeatureConfig {
        FeatureConfig { window: self.window, max_lag: self.max_lag }
    }

    pub fn boost_params(&self) -> AdaBoostParams {
        AdaBoostParams {
            n_estimators: self.n_estimators,
            learning_rate: self.learning_rate,
            max_depth: self.max_depth,
            min_rows: self.min_train_rows,
        }
    }

    pub fn walk_forward(&self) -> WalkForwardConfig {
        WalkForwardConfig { features: self.feature_config(), boost: self.boost_params(), refit_every: self.refit_every }
    }

    pub fn detection(&self) -> DetectionParams {
        DetectionParams { threshold: self.threshold, min_run: self.min_run, ..Default::default() }
    }

    /// Settings in `key = value` form, one per line, canonical key order.
    pub fn to_conf_string(&self) -> String {
        let mut out = String::new();
        let mut line = |k: &str, v: String| out.push_str(&format!("{k} = {v}\n"));
        let path = |p: &Option<PathBuf>| p.as_ref().map(|p| p.display().to_string());
        for (k, v) in [
            ("input_dir", path(&self.input_dir)),
            ("cells", path(&self.cells)),
            ("neighbors", path(&self.neighbors)),
            ("pm", path(&self.pm)),
            ("speedmap", path(&self.speedmap)),
        ] {
            if let Some(v) = v {
                line(k, v);
            }
        }
        line("out", self.out.display().to_string());
        line("K", self.clusters.to_string());
        line("W", self.window.to_string());
        line("m_T", self.max_lag.to_string());
        line("learning_rate", self.learning_rate.to_string());
        line("n_estimators", self.n_estimators.to_string());
        line("max_depth", self.max_depth.to_string());
        line("min_train_rows", self.min_train_rows.to_string());
        line("threshold", self.threshold.to_string());
        line("min_run", self.min_run.to_string());
        line("reference_weeks", self.reference_weeks.to_string());
        line("fallback_radius_km", self.fallback_radius_km.to_string());
        if let Some(seed) = self.seed {
            line("seed", seed.to_string());
        }
        line("jobs", self.jobs.to_string());
        line("scope", self.scope.as_str().to_string());
        line("refit_every", self.refit_every.to_string());
        line("fill", self.fill.to_string());
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct ValidateOptions {
    /// Report unknown keys as warnings instead of errors.
    pub allow_unknown: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Validated {
    pub config: PipelineConfig,
    pub warnings: Vec<String>,
}

/// Applies every entry over the defaults and checks ranges. All problems are
/// collected; each message names the key.
pub fn validate_config(raw: &RawConfig, options: ValidateOptions) -> Result<Validated, Vec<ConfigIssue>> {
    let mut cfg = PipelineConfig::default();
    let mut issues = raw.syntax_errors.clone();
    let mut warnings = Vec::new();

    for e in &raw.entries {
        let Some(key) = canonical_key(&e.key) else {
            let msg = format!("{}: unknown key `{}`", e.origin, e.key);
            if options.allow_unknown || matches!(e.origin, Origin::Env(_)) {
                warnings.push(msg);
            } else {
                issues.push(ConfigIssue { key: e.key.clone(), message: msg });
            }
            continue;
        };
        if let Err(why) = apply(&mut cfg, key, &e.value) {
            issues.push(ConfigIssue {
                key: key.to_string(),
                message: format!("{}: `{key}` = `{}`: {why}", e.origin, e.value),
            });
        }
    }

    let mut check = |ok: bool, key: &str, msg: String| {
        if !ok {
            issues.push(ConfigIssue { key: key.to_string(), message: format!("`{key}` {msg}") });
        }
    };
    check(cfg.clusters >= 1, "K", format!("must be at least 1, got {}", cfg.clusters));
    check(cfg.window >= 2, "W", format!("must be at least 2, got {}", cfg.window));
    check(cfg.max_lag >= 1, "m_T", format!("must be at least 1, got {}", cfg.max_lag));
    check(
        cfg.learning_rate > 0.0 && cfg.learning_rate.is_finite(),
        "learning_rate",
        format!("must be positive, got {}", cfg.learning_rate),
    );
    check(cfg.n_estimators >= 1, "n_estimators", format!("must be at least 1, got {}", cfg.n_estimators));
    check((1..=32).contains(&cfg.max_depth), "max_depth", format!("must be in 1..=32, got {}", cfg.max_depth));
    check(cfg.min_train_rows >= 1, "min_train_rows", format!("must be at least 1, got {}", cfg.min_train_rows));
    check(
        cfg.threshold > 0.0 && cfg.threshold.is_finite(),
        "threshold",
        format!("must be positive, got {}", cfg.threshold),
    );
    check(cfg.min_run >= 1, "min_run", format!("must be at least 1, got {}", cfg.min_run));
    check(cfg.reference_weeks >= 1, "reference_weeks", format!("must be at least 1, got {}", cfg.reference_weeks));
    check(
        cfg.fallback_radius_km > 0.0 && cfg.fallback_radius_km.is_finite(),
        "fallback_radius_km",
        format!("must be positive, got {}", cfg.fallback_radius_km),
    );
    check(cfg.jobs >= 1, "jobs", format!("must be at least 1, got {}", cfg.jobs));
    check(cfg.refit_every >= 1, "refit_every", format!("must be at least 1, got {}", cfg.refit_every));

    if cfg.window >= 2 && cfg.max_lag >= 1 {
        let p = cfg.feature_config().effective_lag();
        if p < cfg.max_lag {
            warnings.push(format!(
                "`m_T` = {} exceeds what a window of W = {} supports; effective lag clamped to {p}",
                cfg.max_lag, cfg.window
            ));
        }
    }

    if issues.is_empty() {
        Ok(Validated { config: cfg, warnings })
    } else {
        Err(issues)
    }
}

fn apply(cfg: &mut PipelineConfig, key: &str, value: &str) -> Result<(), String> {
    fn num<T: std::str::FromStr>(v: &str) -> Result<T, String>
    where
        T::Err: fmt::Display,
    {
        v.parse::<T>().map_err(|e| e.to_string())
    }
    let path = |v: &str| -> Result<Option<PathBuf>, String> {
        if v.is_empty() {
            Err("empty path".into())
        } else {
            Ok(Some(PathBuf::from(v)))
        }
    };
    match key {
        "input_dir" => cfg.input_dir = path(value)?,
        "cells" => cfg.cells = path(value)?,
        "neighbors" => cfg.neighbors = path(value)?,
        "pm" => cfg.pm = path(value)?,
        "speedmap" => cfg.speedmap = path(value)?,
        "out" => cfg.out = path(value)?.expect("non-empty"),
        "K" => cfg.clusters = num(value)?,
        "W" => cfg.window = num(value)?,
        "m_T" => cfg.max_lag = num(value)?,
        "learning_rate" => cfg.learning_rate = num(value)?,
        "n_estimators" => cfg.n_estimators = num(value)?,
        "max_depth" => cfg.max_depth = num(value)?,
        "min_train_rows" => cfg.min_train_rows = num(value)?,
        "threshold" => cfg.threshold = num(value)?,
        "min_run" => cfg.min_run = num(value)?,
        "reference_weeks" => cfg.reference_weeks = num(value)?,
        "fallback_radius_km" => cfg.fallback_radius_km = num(value)?,
        "seed" => cfg.seed = Some(num(value)?),
        "jobs" => cfg.jobs = num(value)?,
        "refit_every" => cfg.refit_every = num(value)?,
        "scope" => {
            cfg.scope = match value.to_ascii_lowercase().as_str() {
                "cell" => Scope::Cell,
                "cluster" => Scope::Cluster,
                _ => return Err("expected `cell` or `cluster`".into()),
            }
        }
        "fill" => {
            cfg.fill = match value.to_ascii_lowercase().as_str() {
                "true" | "yes" | "1" | "on" => true,
                "false" | "no" | "0" | "off" => false,
                _ => return Err("expected a boolean".into()),
            }
        }
        other => unreachable!("unhandled canonical key {other}"),
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(text: &str) -> RawConfig {
        RawConfig::parse(text, Path::new("test.conf"))
    }

    #[test]
    fn empty_file_gives_defaults() {
        let v = validate_config(&parse(""), ValidateOptions::default()).unwrap();
        assert_eq!(v.config.clusters, 11);
        assert_eq!(v.config.max_lag, 20);
        assert_eq!(v.config.n_estimators, 10);
        assert_eq!(v.config.learning_rate, 1.0);
        assert_eq!(v.config.window, 48);
        assert!(v.warnings.is_empty());
    }

    #[test]
    fn zero_clusters_names_key() {
        let err = validate_config(&parse("K = 0"), ValidateOptions::default()).unwrap_err();
        assert_eq!(err.len(), 1);
        assert_eq!(err[0].key, "K");
        assert!(err[0].message.contains("`K`"));
    }

    #[test]
    fn short_window_clamps_lag_with_warning() {
        let v = validate_config(&parse("W=10\nm_T=20"), ValidateOptions::default()).unwrap();
        assert_eq!(v.config.feature_config().effective_lag(), 4);
        assert_eq!(v.warnings.len(), 1);
        assert!(v.warnings[0].contains("clamped to 4"));
    }

    #[test]
    fn unknown_keys_strict_and_lenient() {
        let raw = parse("colour = blue");
        let err = validate_config(&raw, ValidateOptions::default()).unwrap_err();
        assert_eq!(err[0].key, "colour");
        let ok = validate_config(&raw, ValidateOptions { allow_unknown: true }).unwrap();
        assert_eq!(ok.warnings.len(), 1);
    }

    #[test]
    fn every_violation_reported() {
        let err = validate_config(&parse("K=0\nthreshold=-1\nscope=planet\nnonsense line"), ValidateOptions::default())
            .unwrap_err();
        let keys: Vec<&str> = err.iter().map(|e| e.key.as_str()).collect();
        assert!(keys.contains(&"K") && keys.contains(&"threshold") && keys.contains(&"scope") && keys.contains(&""));
    }

    #[test]
    fn later_layers_win() {
        let mut raw = parse("K = 5\nseed = 1");
        raw.extend(RawConfig::from_env([("KPISENTINEL_K".to_string(), "7".to_string())]));
        raw.set("seed", "9", Origin::Flag);
        let v = validate_config(&raw, ValidateOptions::default()).unwrap();
        assert_eq!(v.config.clusters, 7);
        assert_eq!(v.config.seed, Some(9));
    }

    #[test]
    fn conf_string_round_trips() {
        let cfg = PipelineConfig { seed: Some(3), clusters: 4, scope: Scope::Cluster, ..Default::default() };
        let v = validate_config(&parse(&cfg.to_conf_string()), ValidateOptions::default()).unwrap();
        assert_eq!(v.config, cfg);
    }
}
