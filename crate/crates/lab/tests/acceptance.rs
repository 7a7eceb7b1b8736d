//! Release gate: runs `verify-all` twice through the binary, prints one line
//! per criterion and fails if any criterion or runtime limit is missed.

use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::Command;
use std::time::Duration;

use carnot_lab::verify::{runtime_limit, CriterionResult, CRITERIA};
use serde_json::Value;

const MEMORY_LIMIT: u64 = 4 << 30;

fn verify_all(dir: &Path) -> (Vec<u8>, Value) {
    let _ = std::fs::remove_dir_all(dir);
    let out = Command::new(env!("CARGO_BIN_EXE_carnot-lab"))
        .env_remove("CARNOT_LAB_OUTPUT")
        .arg("--output-dir")
        .arg(dir)
        .arg("verify-all")
        .output()
        .expect("binary runs");
    assert!(out.status.success(), "verify-all failed: {}", String::from_utf8_lossy(&out.stderr));
    let bundle = std::fs::read(dir.join("verify-all.json")).unwrap();
    let timing: Value = serde_json::from_slice(&std::fs::read(dir.join("verify-all.timing.json")).unwrap()).unwrap();
    (bundle, timing)
}

fn criterion_time(timing: &Value, id: u32) -> Duration {
    let ms = timing["sections"]
        .as_array()
        .unwrap()
        .iter()
        .find(|s| s[0] == format!("criterion-{id}"))
        .and_then(|s| s[1].as_f64())
        .unwrap();
    Duration::from_secs_f64(ms / 1e3)
}

#[test]
fn acceptance_matrix() {
    let root = PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join("acceptance");
    let (first, timing) = verify_all(&root.join("run1"));
    let (second, _) = verify_all(&root.join("run2"));

    let bundle: Value = serde_json::from_slice(&first).unwrap();
    let criteria: Vec<CriterionResult> = serde_json::from_value(bundle["payload"]["criteria"].clone()).unwrap();
    assert_eq!(criteria.len(), CRITERIA as usize);

    // Written to the raw handle so the matrix shows without --nocapture.
    let mut err = std::io::stderr();
    let peak = timing["peak_rss_bytes"].as_u64();
    let mut failures = Vec::new();
    for c in &criteria {
        let took = criterion_time(&timing, c.id);
        let limit = runtime_limit(c.id);
        let mut ok = c.passed && took <= limit;
        let mut extra = String::new();
        if c.id == 12 {
            let within = peak.is_some_and(|p| p < MEMORY_LIMIT);
            ok &= within;
            extra = format!(" peak_rss={}", peak.map_or("unknown".into(), |p| p.to_string()));
        }
        writeln!(
            err,
            "[{}] {:>2} {} ({:.3}s / limit {}s){} {}",
            if ok { "PASS" } else { "FAIL" },
            c.id,
            c.title,
            took.as_secs_f64(),
            limit.as_secs(),
            extra,
            c.measurements
        )
        .unwrap();
        if !ok {
            failures.push(c.id);
        }
    }
    let identical = first == second;
    writeln!(
        err,
        "[{}] 13 determinism (verify-all bundles byte-identical across two runs: {identical})",
        if identical { "PASS" } else { "FAIL" }
    )
    .unwrap();
    if !identical {
        failures.push(13);
    }
    assert!(failures.is_empty(), "failed criteria: {failures:?}");
}
