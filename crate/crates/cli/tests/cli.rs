use serde_json::Value;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn saddle(args: &[&str], threads: Option<&str>) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_saddle"));
    cmd.args(args);
    if let Some(n) = threads {
        cmd.env("SADDLE_THREADS", n);
    }
    cmd.output().expect("binary runs")
}

fn workspace() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../..")
}

/// Reads an artifact and checks it against its schema.
fn artifact(path: &Path, schema: &str) -> Value {
    let text = std::fs::read_to_string(path).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
    let value: Value = serde_json::from_str(&text).unwrap();
    let schema_path = workspace().join("schemas").join(format!("{schema}.schema.json"));
    let schema: Value = serde_json::from_str(&std::fs::read_to_string(schema_path).unwrap()).unwrap();
    let compiled = jsonschema::JSONSchema::compile(&schema).expect("schema compiles");
    if let Err(errors) = compiled.validate(&value) {
        let msgs: Vec<String> = errors.map(|e| format!("{} at {}", e, e.instance_path)).collect();
        panic!("{} does not match {schema}: {msgs:?}", path.display());
    }
    value
}

fn dir_arg(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn counterexample_kernel_is_reported_as_failing() {
    let tmp = tempfile::tempdir().unwrap();
    let out = saddle(&["kernel-check", "--family", "piecewise-counterexample", "--out", dir_arg(tmp.path())], None);
    assert_eq!(out.status.code(), Some(2));
    let v = artifact(&tmp.path().join("kernel_check.json"), "kernel_check");
    assert_eq!(v["verdict"], "fails");
    let w = &v["witnesses"][0];
    let (t1, t2) = (w["tau1"].as_f64().unwrap(), w["tau2"].as_f64().unwrap());
    assert!(t1 < 1.0 && t2 > 1.0, "witness ({t1}, {t2}) should straddle tau = 1");
}

#[test]
fn fractional_kernel_passes_the_checks() {
    let tmp = tempfile::tempdir().unwrap();
    let out = saddle(&["kernel-check", "--out", dir_arg(tmp.path())], None);
    assert_eq!(out.status.code(), Some(0));
    let v = artifact(&tmp.path().join("kernel_check.json"), "kernel_check");
    assert_eq!(v["verdict"], "strictly-convex");
    assert_eq!(v["ellipticity"], true);

    let out = saddle(&["verify-inequality", "--samples", "1000", "--out", dir_arg(tmp.path())], None);
    assert_eq!(out.status.code(), Some(0));
    let v = artifact(&tmp.path().join("inequality.json"), "inequality");
    assert_eq!(v["violations"], 0);
    assert_eq!(v["n_samples"], 1000);
    let csv = std::fs::read_to_string(tmp.path().join("inequality_samples.csv")).unwrap();
    assert_eq!(csv.lines().count(), 1001);
    assert!(csv.starts_with("s,t,sigma,tau,gap\n"));

    let out = saddle(&["check-operator", "--R", "4", "--h", "0.5", "--out", dir_arg(tmp.path())], None);
    assert_eq!(out.status.code(), Some(0));
    let v = artifact(&tmp.path().join("operator.json"), "operator");
    assert_eq!(v["z_pattern"], true);
    assert!(v["max_row_sum_error"].as_f64().unwrap() < 1e-3);
}

#[test]
fn invalid_gamma_is_rejected_with_the_field_name() {
    let tmp = tempfile::tempdir().unwrap();
    let out = saddle(&["solve", "--gamma", "1.2", "--out", dir_arg(tmp.path())], None);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("kernel.gamma"));
    let v = artifact(&tmp.path().join("error.json"), "error");
    assert_eq!(v["command"], "solve");
    assert!(v["error"].as_str().unwrap().contains("kernel.gamma"));
}

#[test]
fn unknown_config_keys_are_rejected() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = tmp.path().join("bad.toml");
    std::fs::write(&cfg, "[kernel]\ngama = 0.5\n").unwrap();
    let out = saddle(&["kernel-check", "--config", dir_arg(&cfg), "--out", dir_arg(tmp.path())], None);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("gama"));
}

#[test]
fn uncertified_kernel_needs_force_to_solve() {
    let tmp = tempfile::tempdir().unwrap();
    let base = ["solve", "--family", "piecewise-counterexample", "--R", "6", "--h", "0.5", "--out", dir_arg(tmp.path())];
    let out = saddle(&base, None);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("--force"));
    let mut forced = base.to_vec();
    forced.push("--force");
    let out = saddle(&forced, None);
    assert_ne!(out.status.code(), Some(1), "{}", String::from_utf8_lossy(&out.stderr));
    artifact(&tmp.path().join("solution.json"), "solution");
}

const SMALL_RUN: [&str; 8] = ["--R", "10", "--h", "0.5", "--c-norm", "standard", "--S-list", "2,3,4,5,6"];

#[test]
fn solve_then_scan_then_competitor() {
    let tmp = tempfile::tempdir().unwrap();
    let dir = dir_arg(tmp.path());
    let run = |cmd: &str, extra: &[&str]| {
        let mut args = vec![cmd, "--out", dir];
        args.extend_from_slice(&SMALL_RUN);
        args.extend_from_slice(extra);
        saddle(&args, None)
    };
    assert_eq!(run("solve", &[]).status.code(), Some(0));
    let sol = artifact(&tmp.path().join("solution.json"), "solution");
    assert_eq!(sol["converged"], true);
    assert!(tmp.path().join("profile.csv").exists() && tmp.path().join("profile.svg").exists());

    assert_eq!(run("energy-scan", &[]).status.code(), Some(0));
    let scan = artifact(&tmp.path().join("scan.json"), "scan");
    assert!(scan["slope"].as_f64().unwrap() < 2.0);
    let csv = std::fs::read_to_string(tmp.path().join("scan.csv")).unwrap();
    assert!(csv.starts_with("S,E_total,E_kin,E_pot\n"));
    assert_eq!(csv.lines().count(), 6);

    assert_eq!(run("competitor", &["--S", "4"]).status.code(), Some(0));
    let comp = artifact(&tmp.path().join("competitor.json"), "competitor");
    assert_eq!(comp["all_pass"], true);
    assert_eq!(comp["mu_source"], "measured");
}

#[test]
fn scan_solves_when_no_profile_exists() {
    let tmp = tempfile::tempdir().unwrap();
    let mut args = vec!["energy-scan", "--out", dir_arg(tmp.path())];
    args.extend_from_slice(&SMALL_RUN);
    assert_eq!(saddle(&args, None).status.code(), Some(0));
    artifact(&tmp.path().join("solution.json"), "solution");
    artifact(&tmp.path().join("scan.json"), "scan");
}

#[test]
fn runs_are_byte_identical() {
    let files = ["profile.csv", "solution.json", "scan.json", "scan.csv"];
    let mut outputs = Vec::new();
    for threads in [None, Some("1"), None] {
        let tmp = tempfile::tempdir().unwrap();
        let mut args = vec!["energy-scan", "--out", dir_arg(tmp.path())];
        args.extend_from_slice(&SMALL_RUN);
        assert_eq!(saddle(&args, threads).status.code(), Some(0));
        let out = saddle(&["verify-inequality", "--samples", "300", "--seed", "5", "--out", dir_arg(tmp.path())], threads);
        assert_eq!(out.status.code(), Some(0));
        let mut bytes: Vec<Vec<u8>> = files.iter().map(|f| std::fs::read(tmp.path().join(f)).unwrap()).collect();
        bytes.push(std::fs::read(tmp.path().join("inequality_samples.csv")).unwrap());
        outputs.push(bytes);
    }
    assert!(outputs[0] == outputs[2], "repeated runs differ");
    assert!(outputs[0] == outputs[1], "single-threaded run differs");
}

#[test]
fn example_configs_are_valid() {
    let dir = workspace().join("configs");
    let tmp = tempfile::tempdir().unwrap();
    let mut seen = 0;
    for entry in std::fs::read_dir(&dir).unwrap() {
        let path = entry.unwrap().path();
        if path.extension().and_then(|e| e.to_str()) != Some("toml") {
            continue;
        }
        let cfg = saddle_cli::config::RunConfig::from_file(&path).unwrap();
        cfg.validate().unwrap_or_else(|e| panic!("{}: {e:#}", path.display()));
        cfg.kernel().unwrap();
        seen += 1;
    }
    assert!(seen >= 4);
    let out = saddle(
        &["kernel-check", "--config", dir_arg(&dir.join("tabulated.toml")), "--out", dir_arg(tmp.path())],
        None,
    );
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
}
