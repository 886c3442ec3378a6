//! End-to-end checks of the binary: exit codes, output determinism, JSON
//! round-trips and the documented file formats.

use bias_gauge::difficulty::DifficultyReport;
use std::path::Path;
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_bias-gauge"))
}

fn fixture(name: &str) -> String {
    format!("{}/fixtures/{name}", env!("CARGO_MANIFEST_DIR"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

#[test]
fn difficulty_json_is_deterministic_and_roundtrips() {
    let args = ["difficulty", "--spec", &fixture("mnist_task.json"), "--output", "json"];
    let a = run(&args);
    let b = run(&args);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout, "repeated runs must be byte-identical");
    let report: DifficultyReport = serde_json::from_slice(&a.stdout).unwrap();
    let spec = serde_json::from_str(
        &std::fs::read_to_string(fixture("mnist_task.json")).unwrap(),
    )
    .unwrap();
    let direct = bias_gauge::difficulty::evaluate(&spec).unwrap();
    assert_eq!(report, direct, "CLI JSON re-parses to the in-memory report");
}

#[test]
fn difficulty_table_prints_total_bits_and_terms() {
    let out = run(&["difficulty", "--spec", &fixture("mnist_task.json")]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.starts_with("total 6.457e15 bits"), "got: {text}");
    assert!(text.contains("log_k"));
    assert!(text.contains("bracket_sum"));
}

#[test]
fn missing_file_exits_2() {
    let out = run(&["difficulty", "--spec", "/nonexistent/task.json"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(!out.stderr.is_empty());
}

#[test]
fn coarse_resolution_exits_3() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("task.json");
    std::fs::write(
        &path,
        r#"{"kind":"classification","m":5,"n":100,"d":3,"r":1.0,"delta":1000.0,"b":1.0,"eps_over_l":0.01}"#,
    )
    .unwrap();
    let out = run(&["difficulty", "--spec", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn invalid_spec_exits_4() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("task.json");
    std::fs::write(
        &path,
        r#"{"kind":"classification","m":5,"n":100,"d":3,"z":7,"r":1.0,"delta":0.5,"b":1.0,"eps_over_l":0.01}"#,
    )
    .unwrap();
    let out = run(&["difficulty", "--spec", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(4));
}

#[test]
fn rl_flags_match_spec_example() {
    let out = run(&[
        "difficulty", "--rl", "--m", "2", "--delta", "0.001", "--n", "10000", "--d", "1",
        "--eps", "0.001",
    ]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.starts_with("total 4.415e9 bits"), "got: {text}");
}

#[test]
fn stats_on_two_cluster_csv_reports_exact_margin() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("toy.csv");
    let mut s = String::from("x,y,label\n");
    for i in 0..25 {
        s.push_str(&format!("{},{},0\n", i as f64 * 0.004, (i % 5) as f64 * 0.02));
    }
    for i in 0..25 {
        s.push_str(&format!("{},{},1\n", 3.0 + i as f64 * 0.004, (i % 5) as f64 * 0.02));
    }
    std::fs::write(&path, s).unwrap();
    let out = run(&[
        "stats", "--input", path.to_str().unwrap(), "--format", "csv", "--label-column",
        "label",
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("\"delta_method\": \"exact\""), "got: {text}");
    // byte-identical on repeat
    let again = run(&[
        "stats", "--input", path.to_str().unwrap(), "--format", "csv", "--label-column",
        "label",
    ]);
    assert_eq!(text, String::from_utf8(again.stdout).unwrap());
}

#[test]
fn stats_missing_input_exits_2() {
    let out = run(&["stats", "--input", "/no/such.csv", "--format", "csv"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn single_class_margin_exits_3() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("toy.csv");
    let mut s = String::new();
    for i in 0..30 {
        s.push_str(&format!("{},{},0\n", i as f64, (i * i) as f64 * 0.1));
    }
    std::fs::write(&path, s).unwrap();
    let out = run(&[
        "stats", "--input", path.to_str().unwrap(), "--format", "csv", "--label-column", "2",
        "--delta-mode", "exact",
    ]);
    assert_eq!(out.status.code(), Some(3), "{}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn combine_self_prints_one_bit_gap() {
    // a small spec keeps the totals in a range where the one-bit gap
    // between the single task and the lower bound is observable
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("small.json");
    std::fs::write(
        &path,
        r#"{"kind":"classification","m":2,"n":10,"d":2,"r":1.0,"delta":1.0,"b":1.0,"eps_over_l":0.01}"#,
    )
    .unwrap();
    let spec = path.to_str().unwrap();
    let out = run(&["combine", spec, spec, "--output", "json"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    let ln_lower = v["lower"]["ln_mag"].as_f64().unwrap();
    let ln_upper = v["upper"]["ln_mag"].as_f64().unwrap();
    let ln_single = v["i1_aug"]["total_nats"]["ln_mag"].as_f64().unwrap();
    // upper = 2 I', and in bits the lower sits exactly one bit under I'
    let single_bits = ln_single.exp() / std::f64::consts::LN_2;
    let lower_bits = ln_lower.exp() / std::f64::consts::LN_2;
    let upper_bits = ln_upper.exp() / std::f64::consts::LN_2;
    assert!(
        (single_bits - lower_bits - 1.0).abs() < 1e-9,
        "gap {} bits",
        single_bits - lower_bits
    );
    assert!((upper_bits / single_bits - 2.0).abs() < 1e-9);
}

#[test]
fn rank_orders_by_information_descending() {
    let out = run(&[
        "rank",
        "--spec",
        &fixture("cifar10_task.json"),
        "--errors",
        &fixture("models_cifar10.csv"),
    ]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let names: Vec<&str> = text
        .lines()
        .skip(1)
        .map(|l| l.split(',').next().unwrap())
        .collect();
    assert_eq!(
        names,
        ["ViT-H/14", "BiT-L", "ResNet-50", "DenseNet", "DSN", "AlexNet", "MCDNN", "FC-4", "Linear"]
    );
}

#[test]
fn kind_override_changes_validation() {
    // overriding a classification spec (z omitted) to general makes the
    // missing submanifold count an error
    let out = run(&[
        "difficulty",
        "--spec",
        &fixture("mnist_task.json"),
        "--kind",
        "general",
    ]);
    assert_eq!(out.status.code(), Some(4));
    // a bogus kind is rejected up front
    let out = run(&[
        "difficulty",
        "--spec",
        &fixture("mnist_task.json"),
        "--kind",
        "quantum",
    ]);
    assert_eq!(out.status.code(), Some(4));
}

#[test]
fn rank_records_per_row_failures_without_aborting() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("models.csv");
    std::fs::write(&path, "name,error_rate\ngood,0.1\nimpossible,1.5\n").unwrap();
    let out = run(&[
        "rank",
        "--spec",
        &fixture("cifar10_task.json"),
        "--errors",
        path.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = String::from_utf8(out.stdout).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 3);
    assert!(lines[1].starts_with("good,0.1,"));
    assert!(lines[2].starts_with("impossible,1.5,,,"), "{}", lines[2]);
}

#[test]
fn validate_wasserstein_writes_both_csvs() {
    let dir = tempfile::tempdir().unwrap();
    let out_path = dir.path().join("w.csv");
    let out = run(&[
        "validate-wasserstein", "--m", "2", "--n", "5,10,20", "--ref", "60", "--trials", "2",
        "--seed", "1", "--out", out_path.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let rows = std::fs::read_to_string(&out_path).unwrap();
    assert!(rows.starts_with("m,n,trial,wasserstein\n"));
    assert_eq!(rows.lines().count(), 1 + 6);
    let fits = std::fs::read_to_string(dir.path().join("w_fit.csv")).unwrap();
    assert!(fits.starts_with("m,slope,intercept,r2\n"));
    assert_eq!(fits.lines().count(), 2);
    // seeded determinism
    let rerun_dir = tempfile::tempdir().unwrap();
    let rerun_path = rerun_dir.path().join("w.csv");
    run(&[
        "validate-wasserstein", "--m", "2", "--n", "5,10,20", "--ref", "60", "--trials", "2",
        "--seed", "1", "--out", rerun_path.to_str().unwrap(),
    ]);
    assert_eq!(rows, std::fs::read_to_string(&rerun_path).unwrap());
}

#[test]
fn sandbox_emits_json_report() {
    let out = run(&[
        "sandbox", "--k", "3", "--n", "2", "--b", "1.5", "--eps", "0.2", "--samples", "2000",
        "--seed", "5",
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert!(v["i_mc_nats"].is_number());
    assert!(v["fraction_generalizing"].is_number());
    assert!(v["implication_violations"].is_number());
    assert_eq!(v["sample_count"], 2000);
}

#[test]
fn sweep_csv_has_documented_columns() {
    let out = run(&[
        "sweep", "--spec", &fixture("imagenet_task.json"), "--param", "n", "--values",
        "1281167,12811670,128116700",
    ]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.starts_with("value,log10_bits,bits,data_sufficient,error\n"));
    let log10s: Vec<f64> = text
        .lines()
        .skip(1)
        .map(|l| l.split(',').nth(1).unwrap().parse().unwrap())
        .collect();
    assert!(log10s.windows(2).all(|w| w[1] < w[0]), "difficulty must fall with n");
    // three decades of data move log-difficulty by well under 5 percent
    let rel = (log10s[0] - log10s[2]).abs() / log10s[0];
    assert!(rel < 0.05, "relative change {rel}");
}

#[test]
fn fixture_dataset_files_exist() {
    for f in [
        "mnist_task.json",
        "svhn_task.json",
        "cifar10_task.json",
        "imagenet_task.json",
        "omniglot_meta.json",
        "models_mnist.csv",
        "models_svhn.csv",
        "models_cifar10.csv",
        "models_imagenet.csv",
    ] {
        assert!(Path::new(&fixture(f)).exists(), "missing fixture {f}");
    }
}
