//! Running configurations: single scenarios and parallel sweeps.

use std::collections::BTreeMap;
use std::path::PathBuf;

use anyhow::{bail, Context};
use qmeasure_core::experiments::Outcome;
use qmeasure_core::scaling::{fit_loglog, LogLogFit};
use qmeasure_core::ExperimentReport;
use rayon::prelude::*;

use crate::config::{RunConfig, Sweep};
use crate::output;

#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub value: f64,
    pub report: ExperimentReport,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepResult {
    pub parameter: String,
    /// Ascending in `value`.
    pub rows: Vec<SweepRow>,
    pub fields: Vec<String>,
    pub fits: BTreeMap<String, LogLogFit>,
}

impl SweepResult {
    /// Log-log fit of `field` against the swept parameter.
    pub fn fit(&self, field: &str) -> anyhow::Result<LogLogFit> {
        let points = self
            .rows
            .iter()
            .map(|r| {
                r.report
                    .value(field)
                    .map(|y| (r.value, y))
                    .with_context(|| format!("no field `{field}` at {}", r.value))
            })
            .collect::<anyhow::Result<Vec<_>>>()?;
        fit_loglog(&points).with_context(|| format!("fitting `{field}`"))
    }
}

#[derive(Debug)]
pub enum Execution {
    Single(Outcome),
    Sweep(SweepResult),
}

fn pool(jobs: Option<usize>) -> anyhow::Result<rayon::ThreadPool> {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(n) = jobs {
        if n == 0 {
            bail!("--jobs must be at least 1");
        }
        builder = builder.num_threads(n);
    }
    Ok(builder.build()?)
}

pub fn run_sweep(cfg: &RunConfig, sweep: &Sweep, jobs: Option<usize>) -> anyhow::Result<SweepResult> {
    let points = sweep.points();
    let results: Vec<anyhow::Result<SweepRow>> = pool(jobs)?.install(|| {
        points
            .par_iter()
            .map(|&value| {
                let (params, setup) = cfg.at(&sweep.parameter, value)?;
                let outcome = params
                    .run(&setup)
                    .with_context(|| format!("{} at {} = {value}", cfg.scenario(), sweep.parameter))?;
                Ok(SweepRow { value, report: outcome.report })
            })
            .collect()
    });
    let mut rows = results.into_iter().collect::<anyhow::Result<Vec<_>>>()?;
    rows.sort_by(|a, b| a.value.total_cmp(&b.value));
    let fields = if sweep.fields.is_empty() {
        rows.first().map(|r| r.report.results.keys().cloned().collect()).unwrap_or_default()
    } else {
        sweep.fields.clone()
    };
    let mut result = SweepResult { parameter: sweep.parameter.clone(), rows, fields, fits: BTreeMap::new() };
    for field in &sweep.fit {
        let fit = result.fit(field)?;
        result.fits.insert(field.clone(), fit);
    }
    Ok(result)
}

pub fn execute(cfg: &RunConfig, jobs: Option<usize>) -> anyhow::Result<Execution> {
    match &cfg.sweep {
        Some(sweep) => Ok(Execution::Sweep(run_sweep(cfg, sweep, jobs)?)),
        None => {
            let outcome = cfg.params.run(&cfg.setup).with_context(|| format!("running {}", cfg.scenario()))?;
            Ok(Execution::Single(outcome))
        }
    }
}

/// Writes every output file of an execution and returns their paths.
pub fn write(cfg: &RunConfig, execution: &Execution) -> anyhow::Result<Vec<PathBuf>> {
    let dir = &cfg.output.dir;
    let stem = cfg.output.name.clone().unwrap_or_else(|| cfg.scenario().to_string());
    let mut files = Vec::new();
    let mut put = |name: String, bytes: &[u8]| -> anyhow::Result<()> {
        let path = dir.join(name);
        output::atomic_write(&path, bytes)?;
        files.push(path);
        Ok(())
    };
    match execution {
        Execution::Single(outcome) => {
            put(format!("{stem}.json"), &output::to_json_bytes(&output::report_document(cfg, &outcome.report)))?;
            if cfg.output.profiles {
                for profile in &outcome.profiles {
                    let (position, momentum) = output::profile_csvs(profile);
                    put(format!("{stem}_{}_position.csv", profile.label), position.as_bytes())?;
                    put(format!("{stem}_{}_momentum.csv", profile.label), momentum.as_bytes())?;
                }
            }
        }
        Execution::Sweep(sweep) => {
            put(format!("{stem}_sweep.json"), &output::to_json_bytes(&output::sweep_document(cfg, sweep)))?;
            put(format!("{stem}_sweep.csv"), output::sweep_csv(sweep).as_bytes())?;
        }
    }
    Ok(files)
}
