use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

fn weakstrat(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_weakstrat")).args(args).output().expect("binary runs")
}

fn run_in(dir: &Path, args: &[&str]) -> Output {
    let out = dir.to_str().unwrap();
    let mut all = args.to_vec();
    all.extend(["--output-dir", out]);
    weakstrat(&all)
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exited normally")
}

fn json(path: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

fn check_value(report: &Value, prefix: &str) -> f64 {
    report["checks"]
        .as_array()
        .unwrap()
        .iter()
        .find(|c| c["name"].as_str().unwrap().starts_with(prefix))
        .unwrap_or_else(|| panic!("no check starting with '{prefix}'"))["value"]
        .as_f64()
        .unwrap()
}

#[test]
fn kappa_reports_constant_and_truncation_floor() {
    let o = weakstrat(&["kappa"]);
    assert_eq!(code(&o), 0);
    let v: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert!((v["kappa_sq"].as_f64().unwrap() - 5.391164368226857).abs() < 1e-9);

    let zero: Value = serde_json::from_slice(&weakstrat(&["kappa", "--truncation", "0"]).stdout).unwrap();
    assert_eq!(zero["kappa_sq"].as_f64().unwrap(), 6.0);

    let mut last = f64::INFINITY;
    for r in ["1", "10", "100", "10000"] {
        let v: Value = serde_json::from_slice(&weakstrat(&["kappa", "--truncation", r]).stdout).unwrap();
        let bound = v["tail_bound"].as_f64().unwrap();
        assert!(bound < last);
        last = bound;
    }
}

#[test]
fn exit_codes() {
    let dir = TempDir::new().unwrap();
    assert_eq!(code(&run_in(dir.path(), &["taylor"])), 0);
    assert_eq!(code(&run_in(dir.path(), &["sextic", "--method", "bogus"])), 2);
    assert_eq!(code(&run_in(dir.path(), &["sextic", "--n-list", "10", "--horizon", "0.25"])), 2);
    assert_eq!(code(&run_in(dir.path(), &["scaling", "-m", "100"])), 2);
    assert_eq!(code(&run_in(dir.path(), &["audit", "--n-list", "8192"])), 3);
    assert_eq!(code(&weakstrat(&["no-such-command"])), 2);
}

#[test]
fn failed_check_gives_status_four() {
    // at n = 256 the Hermite variance is still about 30% above its limit
    let dir = TempDir::new().unwrap();
    let args = ["hermite", "--n-list", "256", "-m", "500"];
    assert_eq!(code(&run_in(dir.path(), &args)), 0);
    let mut strict = args.to_vec();
    strict.push("--check");
    let o = run_in(dir.path(), &strict);
    assert_eq!(code(&o), 4, "{}", String::from_utf8_lossy(&o.stdout));
    let report = json(&dir.path().join("report.json"));
    let failed: Vec<&str> = report["checks"]
        .as_array()
        .unwrap()
        .iter()
        .filter(|c| !c["pass"].as_bool().unwrap())
        .map(|c| c["name"].as_str().unwrap())
        .collect();
    assert!(!failed.is_empty() && failed.iter().all(|n| n.contains("var")), "{failed:?}");
}

#[test]
fn outputs_and_manifest_are_reproducible() {
    let dir = TempDir::new().unwrap();
    let args = ["sextic", "--n-list", "64,128", "-m", "50", "--master-seed", "5"];
    assert_eq!(code(&run_in(dir.path(), &args)), 0);
    let first: Vec<(String, Vec<u8>)> = ["sextic.csv", "report.json", "report.txt"]
        .iter()
        .map(|f| (f.to_string(), std::fs::read(dir.path().join(f)).unwrap()))
        .collect();
    let m1 = json(&dir.path().join("manifest.json"));
    assert_eq!(code(&run_in(dir.path(), &args)), 0);
    for (f, bytes) in &first {
        assert_eq!(&std::fs::read(dir.path().join(f)).unwrap(), bytes, "{f} changed");
    }
    let m2 = json(&dir.path().join("manifest.json"));
    assert_eq!(m1["manifest_hash"], m2["manifest_hash"]);
    assert_eq!(m1["files"], m2["files"]);

    let other = run_in(dir.path(), &["sextic", "--n-list", "64,128", "-m", "50", "--master-seed", "6"]);
    assert_eq!(code(&other), 0);
    assert_ne!(json(&dir.path().join("manifest.json"))["manifest_hash"], m1["manifest_hash"]);
}

#[test]
fn manifest_hashes_match_files() {
    use sha2::{Digest, Sha256};
    let dir = TempDir::new().unwrap();
    assert_eq!(code(&run_in(dir.path(), &["audit", "--n-list", "32"])), 0);
    let m = json(&dir.path().join("manifest.json"));
    for f in m["files"].as_array().unwrap() {
        let bytes = std::fs::read(dir.path().join(f["file"].as_str().unwrap())).unwrap();
        let hex: String = Sha256::digest(&bytes).iter().map(|b| format!("{b:02x}")).collect();
        assert_eq!(f["sha256"].as_str().unwrap(), hex);
        assert_eq!(f["bytes"].as_u64().unwrap(), bytes.len() as u64);
    }
    // atomic writes leave only the final files behind
    let mut names: Vec<String> = std::fs::read_dir(dir.path())
        .unwrap()
        .map(|e| e.unwrap().file_name().into_string().unwrap())
        .collect();
    names.sort();
    assert_eq!(
        names,
        ["audit.csv", "defects.csv", "manifest.json", "orthogonality.csv", "report.json", "report.txt"]
    );
}

#[test]
fn config_file_sections_and_overrides() {
    let dir = TempDir::new().unwrap();
    let cfg = dir.path().join("run.cfg");
    std::fs::write(
        &cfg,
        "# shared settings\nreplications = 40\nmaster_seed = 3\n[sextic]\nn_list = 32, 64\n[audit]\nn_list = 16\n",
    )
    .unwrap();
    let out = dir.path().join("out");
    let o = weakstrat(&["sextic", "--config", cfg.to_str().unwrap(), "-m", "30", "-o", out.to_str().unwrap()]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let report = json(&out.join("report.json"));
    assert_eq!(report["grid"], serde_json::json!([32, 64]));
    assert_eq!(report["replications"], 30);
    assert_eq!(report["seeds"]["master_seed"], 3);

    std::fs::write(&cfg, "[sextic]\nwhatever = 1\n").unwrap();
    let bad = weakstrat(&["sextic", "--config", cfg.to_str().unwrap(), "-o", out.to_str().unwrap()]);
    assert_eq!(code(&bad), 2);
}

#[test]
fn sextic_median_deviation_decreases() {
    let dir = TempDir::new().unwrap();
    assert_eq!(code(&run_in(dir.path(), &["sextic", "--n-list", "256,1024", "-m", "200", "--check"])), 0);
    let report = json(&dir.path().join("report.json"));
    let rows = report["details"]["median_sup_deviation"].as_array().unwrap();
    let med: Vec<f64> = rows.iter().map(|r| r["median_sup_deviation"].as_f64().unwrap()).collect();
    assert!(med[1] < med[0], "{med:?}");
}

#[test]
fn taylor_residuals_are_round_off() {
    let dir = TempDir::new().unwrap();
    assert_eq!(code(&run_in(dir.path(), &["taylor", "--check"])), 0);
    let report = json(&dir.path().join("report.json"));
    assert!(check_value(&report, "max relative |R6|") < 1e-9);
    assert!((check_value(&report, "gamma") + 1.0 / 480.0).abs() < 1e-15);
}

#[test]
fn audit_self_pair_ratio_is_one() {
    let dir = TempDir::new().unwrap();
    assert_eq!(code(&run_in(dir.path(), &["audit", "--n-list", "64,128", "--check"])), 0);
    let report = json(&dir.path().join("report.json"));
    assert_eq!(check_value(&report, "n=128 item (i)"), 1.0);
    let csv = std::fs::read_to_string(dir.path().join("audit.csv")).unwrap();
    assert!(csv.lines().any(|l| l.starts_with("128,i,1,")), "{csv}");
}

#[test]
fn converge_with_unit_integrand_matches_terminal_value() {
    let dir = TempDir::new().unwrap();
    let o = run_in(dir.path(), &["converge", "--n-list", "64", "-m", "200", "--integrand", "1"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let csv = std::fs::read_to_string(dir.path().join("converge_n64.csv")).unwrap();
    let header: Vec<&str> = csv.lines().next().unwrap().split(',').collect();
    let col = |name: &str| header.iter().position(|h| *h == name).unwrap_or_else(|| panic!("no column {name}: {header:?}"));
    for (b, i) in [(col("b_t"), col("i_n")), (col("oracle_b_t"), col("oracle_integral"))] {
        let mut rows = 0;
        for line in csv.lines().skip(1) {
            let f: Vec<&str> = line.split(',').collect();
            let (x, y): (f64, f64) = (f[b].parse().unwrap(), f[i].parse().unwrap());
            assert!((x - y).abs() < 1e-12, "{line}");
            rows += 1;
        }
        assert_eq!(rows, 200);
    }
}
