//! One pass/fail line per acceptance criterion. Criteria 1-9 come from the
//! library; 10 drives the built binary.

use std::path::Path;
use std::process::{Command, ExitCode};
use std::time::Instant;

use qmeasure::acceptance;

const BIN: &str = env!("CARGO_BIN_EXE_qmeasure");

const CONFIG: &str = r#"
scenario = "ozawa_position"
seed = 11

[params]
monte_carlo_samples = 20000
"#;

fn run_once(config: &Path, out: &Path) -> Vec<u8> {
    let run = Command::new(BIN)
        .args(["run", "--config"])
        .arg(config)
        .arg("--out")
        .arg(out)
        .output()
        .expect("spawn qmeasure run");
    assert!(run.status.success(), "qmeasure run failed: {}", String::from_utf8_lossy(&run.stderr));
    std::fs::read(out.join("ozawa_position.json")).expect("report written")
}

fn determinism_and_check() -> (bool, String) {
    let dir = tempfile::tempdir().expect("temp dir");
    let config = dir.path().join("run.toml");
    std::fs::write(&config, CONFIG).expect("write config");
    let a = run_once(&config, &dir.path().join("a"));
    let b = run_once(&config, &dir.path().join("b"));
    let identical = a == b;
    let check = Command::new(BIN).arg("check").output().expect("spawn qmeasure check");
    let failures = String::from_utf8_lossy(&check.stdout).lines().filter(|l| l.starts_with("[FAIL]")).count();
    (
        identical && check.status.success(),
        format!(
            "two seeded runs byte-identical: {identical} ({} bytes); `check` exit {:?} with {failures} failing lines",
            a.len(),
            check.status.code()
        ),
    )
}

fn main() -> ExitCode {
    let mut all = true;
    for c in acceptance::run_all() {
        println!("{c}");
        all &= c.pass;
    }
    let start = Instant::now();
    let (pass, detail) = determinism_and_check();
    println!(
        "[{}] 10. CLI determinism ({:.2} s): {detail}",
        if pass { "PASS" } else { "FAIL" },
        start.elapsed().as_secs_f64()
    );
    all &= pass;
    if all {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
