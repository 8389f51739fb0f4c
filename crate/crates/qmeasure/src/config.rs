//! Run configuration documents.
//!
//! A document is TOML (or JSON) with a scenario name, parameter overrides
//! merged onto the scenario defaults, the physical/numerical setup and an
//! optional one-parameter sweep:
//!
//! ```toml
//! scenario = "diffraction"
//! hbar = 1.0
//! seed = 7
//!
//! [params]
//! detector_size = 4.0
//!
//! [sweep]
//! parameter = "screen_distance"
//! range = { start = 1e3, stop = 1e5, points = 5, log = true }
//! fit = ["eq_2_3_product"]
//! ```

use std::path::{Path, PathBuf};

use qmeasure_core::experiments::{GridOptions, ScenarioParams, Setup, SCENARIOS};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

/// Sweep parameters that may be zero or negative.
const SIGNED_PARAMETERS: [&str; 2] = ["offset", "detector_position"];

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ConfigError {
    #[error("{0}")]
    Syntax(String),
    #[error("{path}: {message}")]
    Key { path: String, message: String },
}

impl ConfigError {
    fn key(path: impl Into<String>, message: impl Into<String>) -> Self {
        ConfigError::Key { path: path.into(), message: message.into() }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Toml,
    Json,
}

impl Format {
    /// `.json` files are JSON, everything else TOML.
    pub fn from_path(path: &Path) -> Self {
        match path.extension().and_then(|e| e.to_str()) {
            Some(ext) if ext.eq_ignore_ascii_case("json") => Format::Json,
            _ => Format::Toml,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LogRange {
    pub start: f64,
    pub stop: f64,
    pub points: usize,
    #[serde(default = "yes")]
    pub log: bool,
}

fn yes() -> bool {
    true
}

impl LogRange {
    pub fn values(&self) -> Vec<f64> {
        if self.points == 1 {
            return vec![self.start];
        }
        let last = (self.points - 1) as f64;
        (0..self.points)
            .map(|i| {
                let t = i as f64 / last;
                if self.log {
                    (self.start.ln() + t * (self.stop.ln() - self.start.ln())).exp()
                } else {
                    self.start + t * (self.stop - self.start)
                }
            })
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Sweep {
    /// Dotted path into `params` (`screen_distance`,
    /// `diffraction.screen_distance`) or `hbar`.
    pub parameter: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub values: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub range: Option<LogRange>,
    /// Report fields for the CSV; empty means every scalar result.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub fields: Vec<String>,
    /// Fields to fit against the parameter on log-log axes.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub fit: Vec<String>,
}

impl Sweep {
    pub fn points(&self) -> Vec<f64> {
        match (&self.values, &self.range) {
            (Some(v), _) => v.clone(),
            (None, Some(r)) => r.values(),
            (None, None) => Vec::new(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Output {
    #[serde(default = "default_dir")]
    pub dir: PathBuf,
    /// File stem; defaults to the scenario name.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    /// Also write position and momentum density CSVs.
    #[serde(default)]
    pub profiles: bool,
}

fn default_dir() -> PathBuf {
    PathBuf::from("out")
}

impl Default for Output {
    fn default() -> Self {
        Output { dir: default_dir(), name: None, profiles: false }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub params: ScenarioParams,
    pub setup: Setup,
    pub sweep: Option<Sweep>,
    pub output: Output,
}

/// Serialized shape of a [`RunConfig`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct Document {
    scenario: String,
    #[serde(default)]
    params: Map<String, Value>,
    #[serde(default = "default_hbar")]
    hbar: f64,
    #[serde(default)]
    seed: u64,
    #[serde(default)]
    grid: GridOptions,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    sweep: Option<Sweep>,
    #[serde(default)]
    output: Output,
}

fn default_hbar() -> f64 {
    1.0
}

pub fn parse_config(text: &str, format: Format) -> Result<RunConfig, ConfigError> {
    let value: Value = match format {
        Format::Toml => toml::from_str(text).map_err(|e| ConfigError::Syntax(e.to_string()))?,
        Format::Json => serde_json::from_str(text).map_err(|e| ConfigError::Syntax(e.to_string()))?,
    };
    from_value(value)
}

pub fn load_config(path: &Path) -> anyhow::Result<RunConfig> {
    let text = std::fs::read_to_string(path).map_err(|e| anyhow::anyhow!("reading {}: {e}", path.display()))?;
    parse_config(&text, Format::from_path(path)).map_err(|e| anyhow::anyhow!("{}: {e}", path.display()))
}

fn deserialize<T: DeserializeOwned>(value: Value, prefix: &str) -> Result<T, ConfigError> {
    serde_path_to_error::deserialize(value).map_err(|e| {
        let inner = e.path().to_string();
        let path = match (prefix.is_empty(), inner == ".") {
            (true, _) => inner,
            (false, true) => prefix.to_string(),
            (false, false) => format!("{prefix}.{inner}"),
        };
        ConfigError::key(path, e.into_inner().to_string())
    })
}

fn from_value(value: Value) -> Result<RunConfig, ConfigError> {
    let doc: Document = deserialize(value, "")?;
    let defaults = ScenarioParams::defaults(&doc.scenario).ok_or_else(|| {
        ConfigError::key(
            "scenario",
            format!("unknown scenario `{}` (expected one of {})", doc.scenario, SCENARIOS.join(", ")),
        )
    })?;
    let mut merged = params_value(&defaults);
    merge(&mut merged, Value::Object(doc.params));
    let params = params_from_value(&doc.scenario, merged)?;
    let setup = Setup { hbar: doc.hbar, grid: doc.grid, seed: doc.seed };
    setup.validate().map_err(|e| ConfigError::key("setup", e.to_string()))?;
    let cfg = RunConfig { params, setup, sweep: doc.sweep, output: doc.output };
    if let Some(sweep) = &cfg.sweep {
        validate_sweep(&cfg, sweep)?;
    }
    Ok(cfg)
}

/// Parameters of a scenario as a JSON object (empty for `spin_epr`).
pub fn params_value(params: &ScenarioParams) -> Value {
    let value = match params {
        ScenarioParams::Diffraction(c) => serde_json::to_value(c),
        ScenarioParams::OzawaPosition(c) => serde_json::to_value(c),
        ScenarioParams::OzawaCommuting(c) => serde_json::to_value(c),
        ScenarioParams::BoxModel(c) => serde_json::to_value(c),
        ScenarioParams::SlitTwoBody(c) => serde_json::to_value(c),
        ScenarioParams::Preparation(c) => serde_json::to_value(c),
        ScenarioParams::SpinEpr => Ok(Value::Object(Map::new())),
    };
    value.expect("scenario parameters serialize to JSON")
}

/// Builds and validates scenario parameters from a full JSON object.
pub fn params_from_value(scenario: &str, value: Value) -> Result<ScenarioParams, ConfigError> {
    let params = match scenario {
        "diffraction" => ScenarioParams::Diffraction(deserialize(value, "params")?),
        "ozawa_position" => ScenarioParams::OzawaPosition(deserialize(value, "params")?),
        "ozawa_commuting" => ScenarioParams::OzawaCommuting(deserialize(value, "params")?),
        "box_model" => ScenarioParams::BoxModel(deserialize(value, "params")?),
        "slit_two_body" => ScenarioParams::SlitTwoBody(deserialize(value, "params")?),
        "preparation" => ScenarioParams::Preparation(deserialize(value, "params")?),
        "spin_epr" => {
            if let Some(key) = value.as_object().and_then(|m| m.keys().next()) {
                return Err(ConfigError::key(format!("params.{key}"), "spin_epr takes no parameters"));
            }
            ScenarioParams::SpinEpr
        }
        other => return Err(ConfigError::key("scenario", format!("unknown scenario `{other}`"))),
    };
    params.validate().map_err(|e| ConfigError::key(format!("params.{}", param_name(&e)), e.to_string()))?;
    Ok(params)
}

fn param_name(err: &qmeasure_core::Error) -> &str {
    match err {
        qmeasure_core::Error::InvalidParameter { name, .. } => name,
        _ => "?",
    }
}

/// Recursive object merge; anything else is replaced.
fn merge(base: &mut Value, patch: Value) {
    match (base, patch) {
        (Value::Object(b), Value::Object(p)) => {
            for (k, v) in p {
                match b.get_mut(&k) {
                    Some(slot) => merge(slot, v),
                    None => {
                        b.insert(k, v);
                    }
                }
            }
        }
        (slot, p) => *slot = p,
    }
}

/// Writes `value` at a dotted path that must already exist in `params`.
pub fn set_path(params: &mut Value, path: &str, value: f64) -> Result<(), ConfigError> {
    let missing = || ConfigError::key("sweep.parameter", format!("`{path}` is not a parameter of this scenario"));
    let mut slot = params;
    for part in path.split('.') {
        slot = slot.as_object_mut().and_then(|m| m.get_mut(part)).ok_or_else(missing)?;
    }
    *slot = match slot {
        Value::Number(n) if n.is_u64() || n.is_i64() => {
            if value.fract() != 0.0 || value < 0.0 {
                return Err(ConfigError::key("sweep", format!("`{path}` takes non-negative integers, got {value}")));
            }
            Value::from(value as u64)
        }
        Value::Number(_) | Value::Null => Value::from(value),
        _ => return Err(ConfigError::key("sweep.parameter", format!("`{path}` is not numeric"))),
    };
    Ok(())
}

impl RunConfig {
    pub fn scenario(&self) -> &'static str {
        self.params.name()
    }

    /// Parameters and setup for one sweep point.
    pub fn at(&self, parameter: &str, value: f64) -> Result<(ScenarioParams, Setup), ConfigError> {
        let mut setup = self.setup;
        if parameter == "hbar" {
            setup.hbar = value;
            setup.validate().map_err(|e| ConfigError::key("sweep", e.to_string()))?;
            return Ok((self.params.clone(), setup));
        }
        let mut params = params_value(&self.params);
        set_path(&mut params, parameter, value)?;
        Ok((params_from_value(self.scenario(), params)?, setup))
    }

    /// Document form with every parameter spelled out. `include_output`
    /// drops the output section when false, for echoing into reports.
    pub fn to_value(&self, include_output: bool) -> Value {
        let doc = Document {
            scenario: self.scenario().to_string(),
            params: match strip_nulls(params_value(&self.params)) {
                Value::Object(m) => m,
                _ => Map::new(),
            },
            hbar: self.setup.hbar,
            seed: self.setup.seed,
            grid: self.setup.grid,
            sweep: self.sweep.clone(),
            output: self.output.clone(),
        };
        let mut value = serde_json::to_value(doc).expect("config serializes");
        if !include_output {
            value.as_object_mut().map(|m| m.remove("output"));
        }
        value
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(&self.to_value(true)).expect("config serializes to TOML")
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_value(true)).expect("config serializes to JSON")
    }
}

/// TOML has no null; absent optional values fall back to their defaults.
fn strip_nulls(value: Value) -> Value {
    match value {
        Value::Object(m) => {
            Value::Object(m.into_iter().filter(|(_, v)| !v.is_null()).map(|(k, v)| (k, strip_nulls(v))).collect())
        }
        other => other,
    }
}

fn validate_sweep(cfg: &RunConfig, sweep: &Sweep) -> Result<(), ConfigError> {
    match (&sweep.values, &sweep.range) {
        (Some(_), Some(_)) => return Err(ConfigError::key("sweep", "give either `values` or `range`, not both")),
        (None, None) => return Err(ConfigError::key("sweep", "needs `values` or `range`")),
        (Some(v), None) if v.is_empty() => return Err(ConfigError::key("sweep.values", "is empty")),
        (None, Some(r)) => {
            if r.points == 0 {
                return Err(ConfigError::key("sweep.range.points", "must be at least 1"));
            }
            if r.log && !(r.start > 0.0 && r.stop > 0.0) {
                return Err(ConfigError::key("sweep.range", "log-spaced ranges need positive start and stop"));
            }
        }
        _ => {}
    }
    let leaf = sweep.parameter.rsplit('.').next().unwrap_or_default();
    let signed = SIGNED_PARAMETERS.contains(&leaf);
    for v in sweep.points() {
        if !v.is_finite() {
            return Err(ConfigError::key("sweep.values", format!("{v} is not finite")));
        }
        if !signed && v <= 0.0 {
            return Err(ConfigError::key("sweep.values", format!("`{}` must be positive, got {v}", sweep.parameter)));
        }
    }
    // Resolve the path once so that typos fail before anything runs.
    for v in sweep.points() {
        cfg.at(&sweep.parameter, v)?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn linear_and_log_ranges() {
        let lin = LogRange { start: 1.0, stop: 3.0, points: 3, log: false };
        assert_eq!(lin.values(), vec![1.0, 2.0, 3.0]);
        let log = LogRange { start: 1.0, stop: 100.0, points: 3, log: true };
        let v = log.values();
        assert!((v[1] - 10.0).abs() < 1e-12 && (v[2] - 100.0).abs() < 1e-10);
    }

    #[test]
    fn merge_replaces_scalars_and_recurses() {
        let mut base = serde_json::json!({"a": 1, "b": {"c": 2, "d": 3}});
        merge(&mut base, serde_json::json!({"b": {"c": 5}}));
        assert_eq!(base, serde_json::json!({"a": 1, "b": {"c": 5, "d": 3}}));
    }
}
