use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use carnot_lab::bundle::{emit_plot_table, ReportBundle};
use carnot_lab::cli::{resolve, Cli};
use carnot_lab::config::{CommandConfig, Format};
use clap::Parser;
use serde_json::Value;

fn bin() -> Command {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_carnot-lab"));
    cmd.env_remove("CARNOT_LAB_OUTPUT");
    cmd
}

fn scratch(name: &str) -> PathBuf {
    let dir = Path::new(env!("CARGO_TARGET_TMPDIR")).join("cli").join(name);
    let _ = std::fs::remove_dir_all(&dir);
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

fn run_ok(dir: &Path, args: &[&str]) -> Output {
    let out = bin().arg("--output-dir").arg(dir).args(args).output().unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    out
}

fn payload(out: &Output) -> Value {
    let bundle: Value = serde_json::from_slice(&out.stdout).unwrap();
    bundle["payload"].clone()
}

#[test]
fn entropy_of_uniform_pair() {
    let dir = scratch("entropy");
    let p = payload(&run_ok(&dir, &["entropy", "--dist", "uniform2", "--q", "2"]));
    assert_eq!(p["tsallis"], 0.5);
    assert!(dir.join("entropy.json").exists());
    assert!(dir.join("entropy.timing.json").exists());
}

#[test]
fn growth_counts_and_csv() {
    let dir = scratch("growth");
    let p = payload(&run_ok(&dir, &["growth", "--group", "heis_Z", "--radius", "2"]));
    assert_eq!(p["table"]["counts"], serde_json::json!([1, 5, 17]));
    assert!(p["fit"].is_null());
    let out = run_ok(&dir, &["--format", "csv", "growth", "--radius", "2"]);
    assert_eq!(String::from_utf8(out.stdout).unwrap(), "r,count\n0,1\n1,5\n2,17\n");
}

#[test]
fn custom_generators() {
    let dir = scratch("gens");
    let p = payload(&run_ok(&dir, &["growth", "--group", "z3", "--radius", "3", "--gens", "1,0,0;0,1,0;0,0,1"]));
    assert_eq!(p["table"]["counts"], serde_json::json!([1, 7, 25, 63]));
}

#[test]
fn qadd_and_group() {
    let dir = scratch("qadd");
    let p = payload(&run_ok(&dir, &["qadd", "--x", "0.5", "--y", "0.25", "--q", "2"]));
    assert_eq!(p["q_add"], 0.5 + 0.25 - 0.5 * 0.25);
    let p = payload(&run_ok(&dir, &["group", "--a", "1,0,0", "--b", "0,1,0"]));
    assert_eq!(p["matrix"]["commutator"], serde_json::json!([0.0, 0.0, 1.0]));
    let p = payload(&run_ok(&dir, &["group", "--a", "2,2,2", "--b", "-3,-3,-3"]));
    assert_eq!(p["matrix"]["commutator"], serde_json::json!([0.0, 0.0, 0.0]));
}

#[test]
fn pansu_examples() {
    let dir = scratch("pansu");
    let p = payload(&run_ok(&dir, &["pansu", "--map", "square", "--base", "1,1,1"]));
    for i in 0..3 {
        assert!((p["matrix"][i][i].as_f64().unwrap() - 2.0).abs() < 1e-9);
    }
    let p = payload(&run_ok(
        &dir,
        &["pansu", "--map", "identity", "--kind", "heis_to_abelian", "--base", "0,0,0"],
    ));
    assert!((p["matrix"][0][0].as_f64().unwrap() - 1.0).abs() < 1e-12);
    assert!(p["matrix"][2][2].as_f64().unwrap().abs() < 1e-9);
    let p = payload(&run_ok(
        &dir,
        &["pansu", "--map", "custom-polynomial", "1,0,3", "--base", "0.5,1,2", "--convention", "source_linear"],
    ));
    assert!((p["matrix"][2][2].as_f64().unwrap() - 12.0).abs() < 1e-8);
    let p = payload(&run_ok(&dir, &["pansu", "--map", "custom-polynomial:-1,2", "--base", "3,3,3"]));
    assert!((p["matrix"][1][1].as_f64().unwrap() - 2.0).abs() < 1e-12);
}

#[test]
fn ccdist_single_and_survey() {
    let dir = scratch("ccdist");
    let p = payload(&run_ok(&dir, &["ccdist", "--a", "0,0,0", "--b", "1,0,0"]));
    assert!((p["dist"].as_f64().unwrap() - 1.0).abs() < 1e-3);
    let out = run_ok(&dir, &["--format", "csv", "ccdist", "--b", "0,0,1"]);
    let csv = String::from_utf8(out.stdout).unwrap();
    assert!(csv.starts_with("t,x,y,z\n"));
    let out = run_ok(&dir, &["--format", "csv", "--seed", "5", "ccdist", "--pairs", "4"]);
    let csv = String::from_utf8(out.stdout).unwrap();
    assert!(csv.starts_with("pair,lower,value,upper\n"));
    assert_eq!(csv.lines().count(), 5);
}

#[test]
fn holonomy_shapes() {
    let dir = scratch("holonomy");
    let p = payload(&run_ok(&dir, &["holonomy", "--shape", "square"]));
    assert!((p["holonomy"].as_f64().unwrap() - 1.0).abs() < 1e-12);
    let poly = dir.join("tri.csv");
    std::fs::write(&poly, "x,y\n0,0\n2,0\n0,2\n0,0\n").unwrap();
    let p = payload(&run_ok(&dir, &["holonomy", "--shape", "polygon", "--file", poly.to_str().unwrap()]));
    assert!((p["holonomy"].as_f64().unwrap() - 2.0).abs() < 1e-12);
}

#[test]
fn volume_csv_has_fit_columns() {
    let dir = scratch("volume");
    let out = run_ok(
        &dir,
        &["--format", "csv", "volume", "--metric", "euclidean", "--radii", "1,2,4", "--samples", "10000"],
    );
    let csv = String::from_utf8(out.stdout).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("log_r,log_vol,fit_log_vol,residual"));
    assert_eq!(lines.count(), 3);
}

#[test]
fn errors_are_machine_readable() {
    let dir = scratch("errors");
    let out = bin().arg("--output-dir").arg(&dir).args(["qadd", "--x", "1"]).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    let err: Value = serde_json::from_slice(&out.stderr).unwrap();
    assert_eq!(err["error"]["kind"], "usage");

    let out = bin().arg("--output-dir").arg(&dir).args(["entropy", "--dist", "0.5,0.6"]).output().unwrap();
    assert_eq!(out.status.code(), Some(1));
    let err: Value = serde_json::from_slice(&out.stderr).unwrap();
    assert_eq!(err["error"]["kind"], "domain");
    assert_eq!(err["error"]["module"], "q_algebra");

    let out = bin().arg("--output-dir").arg(&dir).args(["no-such-command"]).output().unwrap();
    assert_eq!(out.status.code(), Some(2));

    let out = bin()
        .arg("--output-dir")
        .arg(&dir)
        .args(["growth", "--radius", "30", "--mem-budget", "100000"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
    let err: Value = serde_json::from_slice(&out.stderr).unwrap();
    assert_eq!(err["error"]["kind"], "budget");
    let partial = ReportBundle::read(&dir.join("growth.json")).unwrap();
    assert_eq!(partial.payload["table"]["counts"][2], 17);
    assert!(partial.payload["truncated"]["radius"].as_u64().unwrap() <= 30);
}

#[test]
fn precedence_flags_env_file_defaults() {
    let dir = scratch("precedence");
    let cfg = dir.join("lab.toml");
    std::fs::write(&cfg, "seed = 11\nformat = \"csv\"\noutput_dir = \"from-file\"\nq = 3.0\ndist = \"uniform4\"\n").unwrap();
    let parse = |args: &[&str]| {
        let mut full = vec!["carnot-lab", "--config", cfg.to_str().unwrap()];
        full.extend_from_slice(args);
        Cli::try_parse_from(full).unwrap()
    };
    let c = resolve(parse(&["entropy"]), None).unwrap();
    assert_eq!((c.seed, c.format), (11, Format::Csv));
    assert_eq!(c.output_dir, PathBuf::from("from-file"));
    match &c.command {
        CommandConfig::Entropy(e) => assert_eq!((e.q, e.dist.as_str()), (3.0, "uniform4")),
        other => panic!("{other:?}"),
    }
    let c = resolve(parse(&["--seed", "4", "entropy", "--q", "0.5"]), Some("from-env".into())).unwrap();
    assert_eq!(c.seed, 4);
    assert_eq!(c.output_dir, PathBuf::from("from-env"));
    match &c.command {
        CommandConfig::Entropy(e) => assert_eq!(e.q, 0.5),
        other => panic!("{other:?}"),
    }
    let c = resolve(parse(&["--output-dir", "flag", "entropy"]), Some("from-env".into())).unwrap();
    assert_eq!(c.output_dir, PathBuf::from("flag"));

    let out = bin().env("CARNOT_LAB_OUTPUT", &dir).args(["entropy"]).output().unwrap();
    assert!(out.status.success());
    assert!(dir.join("entropy.json").exists());
}

#[test]
fn bundle_round_trip_and_rerun() {
    let dir = scratch("roundtrip");
    run_ok(&dir, &["--seed", "9", "ccdist", "--pairs", "2"]);
    let path = dir.join("ccdist.json");
    let first = std::fs::read(&path).unwrap();
    let bundle = ReportBundle::read(&path).unwrap();
    let again = carnot_lab::run(&bundle.config).unwrap().bundle;
    assert_eq!(again.config, bundle.config);
    assert_eq!(again.payload, bundle.payload);
    assert_eq!(again.to_json().unwrap().as_bytes(), &first[..]);
    assert!(emit_plot_table(&bundle).is_ok());
    let entropy = carnot_lab::run(&resolve(Cli::try_parse_from(["x", "entropy"]).unwrap(), None).unwrap())
        .unwrap()
        .bundle;
    assert!(matches!(emit_plot_table(&entropy), Err(carnot_lab::LabError::Unsupported(_))));
}
