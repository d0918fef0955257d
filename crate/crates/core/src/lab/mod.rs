//! Experiment orchestration: configuration, dispatch, CSV and JSON reports.
//!
//! Every experiment owns a parameter struct that rejects unknown keys and has a
//! complete default, so an empty configuration always runs.

mod experiments;

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::time::Instant;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::csv::CsvTable;
use crate::error::{Error, Result};

pub use experiments::eps_schedule;

/// Environment variable that fixes the worker thread count.
pub const THREADS_ENV: &str = "MIXGROWTH_THREADS";

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExperimentId {
    RsGrowth,
    RsCorrelation,
    RsComplexity,
    TorusSlow,
    TorusMixing,
    Adjoint,
    BoundsCompare,
    KtOracle,
    Weyl,
    Dimension,
}

impl ExperimentId {
    pub const ALL: [ExperimentId; 10] = [
        ExperimentId::RsGrowth,
        ExperimentId::RsCorrelation,
        ExperimentId::RsComplexity,
        ExperimentId::TorusSlow,
        ExperimentId::TorusMixing,
        ExperimentId::Adjoint,
        ExperimentId::BoundsCompare,
        ExperimentId::KtOracle,
        ExperimentId::Weyl,
        ExperimentId::Dimension,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            ExperimentId::RsGrowth => "rs-growth",
            ExperimentId::RsCorrelation => "rs-correlation",
            ExperimentId::RsComplexity => "rs-complexity",
            ExperimentId::TorusSlow => "torus-slow",
            ExperimentId::TorusMixing => "torus-mixing",
            ExperimentId::Adjoint => "adjoint",
            ExperimentId::BoundsCompare => "bounds-compare",
            ExperimentId::KtOracle => "kt-oracle",
            ExperimentId::Weyl => "weyl",
            ExperimentId::Dimension => "dimension",
        }
    }
}

impl fmt::Display for ExperimentId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ExperimentId {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        ExperimentId::ALL
            .into_iter()
            .find(|id| id.as_str() == s)
            .ok_or_else(|| Error::Config(format!("unknown experiment id '{s}'; run `mixgrowth list` for the catalog")))
    }
}

/// One named invariant of a run.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub ok: bool,
    pub detail: String,
}

impl Check {
    pub fn new(name: &str, ok: bool, detail: impl Into<String>) -> Self {
        Check { name: name.to_string(), ok, detail: detail.into() }
    }
}

/// What an experiment hands back before telemetry is attached.
#[derive(Clone, Debug)]
pub struct Outcome {
    pub table: CsvTable,
    pub checks: Vec<Check>,
    pub summary: Value,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Telemetry {
    pub wall_seconds: f64,
    /// Peak resident set size of the process, where the platform reports it.
    pub peak_rss_kib: Option<u64>,
    pub threads: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Report {
    pub experiment: ExperimentId,
    pub seed: u64,
    /// Parameters after defaults were filled in.
    pub params: Value,
    pub checks: Vec<Check>,
    pub passed: bool,
    pub summary: Value,
    pub csv_file: String,
    pub csv_rows: usize,
    pub telemetry: Telemetry,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentConfig {
    pub id: ExperimentId,
    /// Parameter object; missing keys take their defaults.
    pub params: Value,
    pub out: PathBuf,
    pub seed: u64,
}

impl ExperimentConfig {
    pub fn new(id: ExperimentId) -> Self {
        ExperimentConfig { id, params: Value::Object(Default::default()), out: PathBuf::from("."), seed: 0 }
    }

    pub fn with_params(mut self, params: Value) -> Self {
        self.params = params;
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn with_out(mut self, out: impl Into<PathBuf>) -> Self {
        self.out = out.into();
        self
    }
}

/// Layout of a configuration file; all keys are optional.
#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    pub experiment: Option<String>,
    pub seed: Option<u64>,
    pub out: Option<PathBuf>,
    #[serde(default)]
    pub params: Option<Value>,
}

impl ConfigFile {
    /// Parses TOML or JSON: by extension when it is `.toml` or `.json`, otherwise by trying both.
    pub fn parse(text: &str, path_hint: Option<&Path>) -> Result<Self> {
        let ext = path_hint.and_then(|p| p.extension()).and_then(|e| e.to_str()).map(str::to_ascii_lowercase);
        let json = |t: &str| serde_json::from_str::<ConfigFile>(t).map_err(|e| Error::Config(format!("JSON config: {e}")));
        let toml = |t: &str| toml::from_str::<ConfigFile>(t).map_err(|e| Error::Config(format!("TOML config: {e}")));
        match ext.as_deref() {
            Some("json") => json(text),
            Some("toml") => toml(text),
            _ => json(text).or_else(|je| toml(text).map_err(|te| Error::Config(format!("{je}; {te}")))),
        }
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        Self::parse(&text, Some(path))
    }

    /// Combines the file with the experiment named on the command line.
    pub fn into_config(self, id: ExperimentId) -> Result<ExperimentConfig> {
        if let Some(named) = &self.experiment {
            if named != id.as_str() {
                return Err(Error::Config(format!("config is for '{named}', not '{id}'")));
            }
        }
        let mut cfg = ExperimentConfig::new(id);
        if let Some(p) = self.params {
            if !p.is_object() {
                return Err(Error::Config("`params` must be a table".into()));
            }
            cfg.params = p;
        }
        if let Some(s) = self.seed {
            cfg.seed = s;
        }
        if let Some(o) = self.out {
            cfg.out = o;
        }
        Ok(cfg)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ParamDoc {
    pub name: String,
    pub default: Value,
    pub description: String,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CatalogEntry {
    pub id: ExperimentId,
    pub description: String,
    pub parameters: Vec<ParamDoc>,
}

pub fn list_experiments() -> Vec<CatalogEntry> {
    ExperimentId::ALL.into_iter().map(experiments::catalog_entry).collect()
}

/// Parameters with every default filled in, or a validation error.
pub fn resolve_params(id: ExperimentId, params: &Value) -> Result<Value> {
    experiments::resolve(id, params)
}

/// Runs the experiment without touching the file system.
pub fn run_in_memory(config: &ExperimentConfig) -> Result<(Report, CsvTable)> {
    let start = Instant::now();
    let (params, outcome) = experiments::dispatch(config.id, &config.params, config.seed)?;
    let passed = outcome.checks.iter().all(|c| c.ok);
    let report = Report {
        experiment: config.id,
        seed: config.seed,
        params,
        passed,
        csv_file: format!("{}.csv", config.id),
        csv_rows: outcome.table.rows.len(),
        checks: outcome.checks,
        summary: outcome.summary,
        telemetry: Telemetry {
            wall_seconds: start.elapsed().as_secs_f64(),
            peak_rss_kib: peak_rss_kib(),
            threads: rayon::current_num_threads(),
        },
    };
    Ok((report, outcome.table))
}

/// Runs the experiment and writes `<out>/<id>.csv` and `<out>/<id>.report.json`.
pub fn run(config: &ExperimentConfig) -> Result<Report> {
    let (report, table) = run_in_memory(config)?;
    std::fs::create_dir_all(&config.out)?;
    table.write(&config.out.join(format!("{}.csv", config.id)))?;
    let json = serde_json::to_string_pretty(&report).map_err(|e| Error::Io(e.to_string()))?;
    std::fs::write(config.out.join(format!("{}.report.json", config.id)), json + "\n")?;
    Ok(report)
}

pub mod exit {
    pub const PASS: i32 = 0;
    pub const INVARIANT: i32 = 1;
    pub const VALIDATION: i32 = 2;
    pub const RESOURCE: i32 = 3;
    pub const OTHER: i32 = 4;
}

pub fn exit_code(err: &Error) -> i32 {
    match err {
        Error::Input(_) | Error::Config(_) | Error::OutOfRange { .. } => exit::VALIDATION,
        Error::Resource(_) => exit::RESOURCE,
        _ => exit::OTHER,
    }
}

/// Reads [`THREADS_ENV`]; `None` when unset.
pub fn threads_from_env() -> Result<Option<usize>> {
    match std::env::var(THREADS_ENV) {
        Err(_) => Ok(None),
        Ok(s) => match s.trim().parse::<usize>() {
            Ok(n) if n >= 1 => Ok(Some(n)),
            _ => Err(Error::Config(format!("{THREADS_ENV} must be a positive integer, got '{s}'"))),
        },
    }
}

fn peak_rss_kib() -> Option<u64> {
    let status = std::fs::read_to_string("/proc/self/status").ok()?;
    let line = status.lines().find(|l| l.starts_with("VmHWM:"))?;
    line.split_whitespace().nth(1)?.parse().ok()
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    #[test]
    fn ids_round_trip() {
        for id in ExperimentId::ALL {
            assert_eq!(id.as_str().parse::<ExperimentId>().unwrap(), id);
            assert_eq!(serde_json::to_value(id).unwrap(), json!(id.as_str()));
        }
        let e = "rs-growht".parse::<ExperimentId>().unwrap_err();
        assert_eq!(exit_code(&e), exit::VALIDATION);
    }

    #[test]
    fn catalog_lists_everything_and_defaults_validate() {
        let cat = list_experiments();
        assert_eq!(cat.len(), 10);
        let growth = cat.iter().find(|e| e.id == ExperimentId::RsGrowth).unwrap();
        let names: Vec<&str> = growth.parameters.iter().map(|p| p.name.as_str()).collect();
        for key in ["d", "k", "n_max"] {
            assert!(names.contains(&key), "{names:?}");
        }
        for entry in &cat {
            let defaults: serde_json::Map<String, Value> =
                entry.parameters.iter().map(|p| (p.name.clone(), p.default.clone())).collect();
            let resolved = resolve_params(entry.id, &Value::Object(defaults.clone())).unwrap();
            assert_eq!(resolved, Value::Object(defaults), "{}", entry.id);
            assert!(entry.parameters.iter().all(|p| !p.description.is_empty()), "{}", entry.id);
        }
    }

    #[test]
    fn unknown_keys_are_rejected() {
        let err = resolve_params(ExperimentId::RsGrowth, &json!({"d": 1.0, "radius": 3})).unwrap_err();
        assert_eq!(exit_code(&err), exit::VALIDATION);
        assert!(ConfigFile::parse("seed = 1\ncolour = 2\n", None).is_err());
    }

    #[test]
    fn toml_and_json_configs_agree() {
        let t = ConfigFile::parse("seed = 5\n[params]\nl_max = 8\n", Some(Path::new("a.toml"))).unwrap();
        let j = ConfigFile::parse(r#"{"seed": 5, "params": {"l_max": 8}}"#, Some(Path::new("a.json"))).unwrap();
        let (t, j) = (t.into_config(ExperimentId::RsComplexity).unwrap(), j.into_config(ExperimentId::RsComplexity).unwrap());
        assert_eq!(t, j);
        assert_eq!(t.seed, 5);
        let untyped = ConfigFile::parse("seed = 5\n[params]\nl_max = 8\n", None).unwrap();
        assert_eq!(untyped.into_config(ExperimentId::RsComplexity).unwrap(), t);
    }

    #[test]
    fn mismatched_experiment_name() {
        let c = ConfigFile::parse(r#"{"experiment": "weyl"}"#, None).unwrap();
        assert!(c.into_config(ExperimentId::Adjoint).is_err());
    }

    #[test]
    fn invalid_values_are_validation_errors() {
        for (id, p) in [
            (ExperimentId::RsGrowth, json!({"n_max": 300, "k": 256})),
            (ExperimentId::RsComplexity, json!({"l_max": 0})),
            (ExperimentId::Weyl, json!({"dims": [4]})),
            (ExperimentId::TorusMixing, json!({"m_min": 100, "m_max": 50})),
        ] {
            let err = resolve_params(id, &p).unwrap_err();
            assert_eq!(exit_code(&err), exit::VALIDATION, "{id}: {err}");
        }
    }

    #[test]
    fn small_run_reports_checks() {
        let cfg = ExperimentConfig::new(ExperimentId::RsComplexity).with_params(json!({"l_max": 12}));
        let (report, table) = run_in_memory(&cfg).unwrap();
        assert!(report.passed);
        assert_eq!(table.rows.len(), 12);
        assert_eq!(report.params["l_max"], json!(12));
    }
}
