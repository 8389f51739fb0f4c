use std::path::Path;
use std::process::{Command, Output};

const BIN: &str = env!("CARGO_BIN_EXE_qmeasure");

fn qmeasure(args: &[&str]) -> Output {
    Command::new(BIN).args(args).output().expect("spawn qmeasure")
}

fn run_config(dir: &Path, text: &str, extra: &[&str]) -> Output {
    let config = dir.join("run.toml");
    std::fs::write(&config, text).unwrap();
    let out = dir.join("out");
    let mut args = vec!["run", "--config", config.to_str().unwrap(), "--out", out.to_str().unwrap()];
    args.extend_from_slice(extra);
    qmeasure(&args)
}

fn read_json(path: &Path) -> serde_json::Value {
    serde_json::from_slice(&std::fs::read(path).unwrap()).unwrap()
}

#[test]
fn list_names_every_scenario() {
    let out = qmeasure(&["list"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    for name in qmeasure_core::experiments::SCENARIOS {
        assert!(text.lines().any(|l| l.starts_with(name)), "{name} missing");
    }
}

#[test]
fn spin_epr_report() {
    let dir = tempfile::tempdir().unwrap();
    let out = run_config(dir.path(), "scenario = \"spin_epr\"\n", &[]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let doc = read_json(&dir.path().join("out/spin_epr.json"));
    assert_eq!(doc["schema_version"], 1);
    assert_eq!(doc["scenario"], "spin_epr");
    let c = doc["report"]["results"]["eq_3_5_correlator"].as_f64().unwrap();
    assert!((c + 0.25).abs() < 1e-12);
}

#[test]
fn diffraction_sweep_csv_and_fit() {
    let dir = tempfile::tempdir().unwrap();
    let config = r#"
scenario = "diffraction"
[params]
simulate = false
[sweep]
parameter = "screen_distance"
values = [1e4, 1e2, 1e3]
fields = ["eq_2_3_product", "eq_2_10_ring_probability"]
fit = ["eq_2_3_product"]
"#;
    let out = run_config(dir.path(), config, &["--jobs", "2"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let csv = std::fs::read_to_string(dir.path().join("out/diffraction_sweep.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("screen_distance,eq_2_3_product,eq_2_10_ring_probability"));
    let params: Vec<f64> = lines.map(|l| l.split(',').next().unwrap().parse().unwrap()).collect();
    assert_eq!(params, vec![100.0, 1000.0, 10000.0]);
    let doc = read_json(&dir.path().join("out/diffraction_sweep.json"));
    let slope = doc["sweep"]["fits"]["eq_2_3_product"]["slope"].as_f64().unwrap();
    assert!((slope + 1.0).abs() < 0.02, "{slope}");
    assert_eq!(doc["sweep"]["rows"].as_array().unwrap().len(), 3);
}

#[test]
fn seeded_runs_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let config = "scenario = \"ozawa_position\"\n[params]\nmonte_carlo_samples = 5000\n";
    let read = |sub: &str| {
        let out = dir.path().join(sub);
        let cfg = dir.path().join("run.toml");
        std::fs::write(&cfg, config).unwrap();
        let status =
            qmeasure(&["run", "--config", cfg.to_str().unwrap(), "--out", out.to_str().unwrap(), "--seed", "42"]);
        assert!(status.status.success());
        std::fs::read(out.join("ozawa_position.json")).unwrap()
    };
    let a = read("a");
    assert_eq!(a, read("b"));
    let doc: serde_json::Value = serde_json::from_slice(&a).unwrap();
    assert_eq!(doc["config"]["seed"], 42);
}

#[test]
fn profiles_are_written() {
    let dir = tempfile::tempdir().unwrap();
    let out = run_config(dir.path(), "scenario = \"preparation\"\n[output]\nprofiles = true\nname = \"prep\"\n", &[]);
    assert!(out.status.success());
    let csv = std::fs::read_to_string(dir.path().join("out/prep_q_prepared_momentum.csv")).unwrap();
    assert!(csv.starts_with("p,density\n"));
    assert!(dir.path().join("out/prep_x2_prepared_position.csv").exists());
    assert!(dir.path().join("out/prep.json").exists());
}

#[test]
fn invalid_config_fails_with_key_path() {
    let dir = tempfile::tempdir().unwrap();
    let out = run_config(dir.path(), "scenario = \"diffraction\"\n[params]\ndetector_size = -1\n", &[]);
    assert!(!out.status.success());
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(err.contains("params.detector_size"), "{err}");
    assert!(!dir.path().join("out").exists());
}

#[test]
fn scenario_errors_fail_the_run() {
    let dir = tempfile::tempdir().unwrap();
    // Packets too narrow for a grid that may not refine.
    let config = "scenario = \"box_model\"\n[params]\nwidth = 0.01\nlength = 100\n[grid]\nauto_refine = false\n";
    let out = run_config(dir.path(), config, &[]);
    assert!(!out.status.success());
    assert!(String::from_utf8(out.stderr).unwrap().contains("box_model"));
}

#[test]
fn check_single_criterion() {
    let out = qmeasure(&["check", "--only", "1"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(text.lines().count(), 1);
    assert!(text.starts_with("[PASS]  1."));
}
