//! Report documents, CSV tables and atomic file writes.

use std::io::Write;
use std::path::Path;

use anyhow::Context;
use qmeasure_core::experiments::Profile;
use serde_json::{json, Value};

use crate::config::RunConfig;
use crate::runner::SweepResult;

pub const SCHEMA_VERSION: u32 = 1;

/// Writes `bytes` to a temporary file next to `path` and renames it into
/// place, so readers never see a partial file.
pub fn atomic_write(path: &Path, bytes: &[u8]) -> anyhow::Result<()> {
    let dir = path.parent().filter(|p| !p.as_os_str().is_empty()).unwrap_or(Path::new("."));
    std::fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    let mut tmp = tempfile::NamedTempFile::new_in(dir).with_context(|| format!("temp file in {}", dir.display()))?;
    tmp.write_all(bytes)?;
    tmp.as_file().sync_all()?;
    tmp.persist(path).map_err(|e| e.error).with_context(|| format!("writing {}", path.display()))?;
    Ok(())
}

pub fn report_document(cfg: &RunConfig, report: &qmeasure_core::ExperimentReport) -> Value {
    json!({
        "schema_version": SCHEMA_VERSION,
        "scenario": cfg.scenario(),
        "config": cfg.to_value(false),
        "report": report,
    })
}

pub fn sweep_document(cfg: &RunConfig, sweep: &SweepResult) -> Value {
    let rows: Vec<Value> = sweep.rows.iter().map(|r| json!({ "value": r.value, "report": r.report })).collect();
    json!({
        "schema_version": SCHEMA_VERSION,
        "scenario": cfg.scenario(),
        "config": cfg.to_value(false),
        "sweep": {
            "parameter": sweep.parameter,
            "fields": sweep.fields,
            "fits": sweep.fits,
            "rows": rows,
        },
    })
}

pub fn to_json_bytes(value: &Value) -> Vec<u8> {
    let mut bytes = serde_json::to_vec_pretty(value).expect("JSON values serialize");
    bytes.push(b'\n');
    bytes
}

/// `{}` on `f64` is locale-free and round-trips; non-finite values become
/// empty cells.
fn cell(v: Option<f64>) -> String {
    match v {
        Some(x) if x.is_finite() => format!("{x}"),
        _ => String::new(),
    }
}

pub fn sweep_csv(sweep: &SweepResult) -> String {
    let mut out = String::new();
    out.push_str(&sweep.parameter);
    for f in &sweep.fields {
        out.push(',');
        out.push_str(f);
    }
    out.push('\n');
    for row in &sweep.rows {
        out.push_str(&cell(Some(row.value)));
        for f in &sweep.fields {
            out.push(',');
            out.push_str(&cell(row.report.value(f)));
        }
        out.push('\n');
    }
    out
}

/// Two-column CSVs: `x,density` and `p,density`.
pub fn profile_csvs(profile: &Profile) -> (String, String) {
    let table = |header: &str, rows: Vec<(f64, f64)>| {
        let mut s = format!("{header},density\n");
        for (x, d) in rows {
            s.push_str(&format!("{},{}\n", cell(Some(x)), cell(Some(d))));
        }
        s
    };
    (table("x", profile.wavefn.density_profile()), table("p", profile.wavefn.spectral_transform().density_profile()))
}
