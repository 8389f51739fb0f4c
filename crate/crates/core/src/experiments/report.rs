use alloc::collections::BTreeMap;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use crate::grid::GridWaveFn;
use crate::measurement::NoiseReport;
use crate::scaling::LogLogFit;
use crate::{Error, Result};

/// Echoed input parameter.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(untagged))]
pub enum InputValue {
    Flag(bool),
    Number(f64),
    Text(String),
}

impl From<f64> for InputValue {
    fn from(v: f64) -> Self {
        InputValue::Number(v)
    }
}

impl From<bool> for InputValue {
    fn from(v: bool) -> Self {
        InputValue::Flag(v)
    }
}

impl From<&str> for InputValue {
    fn from(v: &str) -> Self {
        InputValue::Text(v.to_string())
    }
}

/// A product compared against `ħ/2`, with the probability of the sector it
/// was computed on.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct EvasionRecord {
    pub label: String,
    pub product: f64,
    pub bound: f64,
    pub evasion: bool,
    pub sector_probability: f64,
}

#[derive(Debug, Clone, PartialEq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ExperimentReport {
    pub scenario: String,
    pub inputs: BTreeMap<String, InputValue>,
    pub results: BTreeMap<String, f64>,
    pub flags: BTreeMap<String, bool>,
    pub noise: BTreeMap<String, NoiseReport>,
    pub fits: BTreeMap<String, LogLogFit>,
    pub evasion: Vec<EvasionRecord>,
    pub notes: Vec<String>,
    pub conclusion: Option<String>,
}

impl ExperimentReport {
    pub fn new(scenario: &str) -> Self {
        ExperimentReport { scenario: scenario.to_string(), ..Default::default() }
    }

    pub fn input(&mut self, key: &str, value: impl Into<InputValue>) {
        self.inputs.insert(key.to_string(), value.into());
    }

    pub fn result(&mut self, key: &str, value: f64) {
        self.results.insert(key.to_string(), value);
    }

    pub fn flag(&mut self, key: &str, value: bool) {
        self.flags.insert(key.to_string(), value);
    }

    pub fn note(&mut self, text: &str) {
        self.notes.push(text.to_string());
    }

    pub fn noise_report(&mut self, key: &str, report: NoiseReport) {
        self.noise.insert(key.to_string(), report);
    }

    pub fn record_evasion(&mut self, label: &str, product: f64, hbar: f64, sector_probability: f64) {
        self.evasion.push(EvasionRecord {
            label: label.to_string(),
            product,
            bound: 0.5 * hbar,
            evasion: crate::measurement::is_evasion(product, hbar),
            sector_probability,
        });
    }

    /// Looks up a scalar result, a flag (as 0/1) or a fit parameter
    /// (`fits.<name>.slope` style keys).
    pub fn value(&self, key: &str) -> Option<f64> {
        if let Some(v) = self.results.get(key) {
            return Some(*v);
        }
        if let Some(b) = self.flags.get(key) {
            return Some(if *b { 1.0 } else { 0.0 });
        }
        let rest = key.strip_prefix("fits.")?;
        let (name, field) = rest.rsplit_once('.')?;
        let fit = self.fits.get(name)?;
        match field {
            "slope" => Some(fit.slope),
            "intercept" => Some(fit.intercept),
            "r_squared" => Some(fit.r_squared),
            _ => None,
        }
    }

    /// Checks that every probability in the report lies in `[0, 1]`. Result
    /// keys ending in `probability` are treated as probabilities.
    pub fn validate(&self) -> Result<()> {
        let check = |name: &str, p: f64| {
            if (0.0..=1.0).contains(&p) {
                Ok(())
            } else {
                Err(Error::InvalidParameter { name: "probability", reason: alloc::format!("{name} = {p}") })
            }
        };
        for (key, value) in &self.results {
            if key.ends_with("probability") {
                check(key, *value)?;
            }
        }
        for (key, noise) in &self.noise {
            check(key, noise.sector_probability)?;
        }
        for record in &self.evasion {
            check(&record.label, record.sector_probability)?;
        }
        Ok(())
    }

    /// Evasion records flagged true.
    pub fn evasions(&self) -> impl Iterator<Item = &EvasionRecord> {
        self.evasion.iter().filter(|r| r.evasion)
    }
}

/// A density profile to dump alongside the report.
#[derive(Debug, Clone, PartialEq)]
pub struct Profile {
    pub label: String,
    pub wavefn: GridWaveFn,
}

/// Report plus optional profiles.
#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub report: ExperimentReport,
    pub profiles: Vec<Profile>,
}

impl From<ExperimentReport> for Outcome {
    fn from(report: ExperimentReport) -> Self {
        Outcome { report, profiles: Vec::new() }
    }
}
