use std::path::PathBuf;
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_plaquette"))
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("plaquette-cli-{}-{name}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().unwrap()
}

fn rows(out: &Output) -> Vec<Vec<String>> {
    let mut r = csv::Reader::from_reader(out.stdout.as_slice());
    r.records().map(|x| x.unwrap().iter().map(String::from).collect()).collect()
}

#[test]
fn usage_errors_exit_with_one() {
    assert_eq!(run(&["sweep", "--bogus"]).status.code(), Some(1));
    assert_eq!(run(&["sweep", "--p-min", "0.8", "--p-max", "0.2"]).status.code(), Some(1));
    assert_eq!(run(&["sample", "--p", "0.5", "--beta", "1.0"]).status.code(), Some(1));
    assert_eq!(run(&["sample"]).status.code(), Some(1));
}

#[test]
fn sweep_endpoints_are_exact() {
    let out = run(&[
        "sweep", "--n", "4", "--p-min", "0", "--p-max", "1", "--steps", "2", "--burn-in", "5", "--thinning", "1",
        "--n-samples", "20",
    ]);
    assert!(out.status.success());
    let r = rows(&out);
    assert_eq!(r.len(), 2);
    assert_eq!(r[0][1].parse::<f64>().unwrap(), 0.0);
    assert_eq!(r[1][3].parse::<f64>().unwrap(), 1.0);
}

#[test]
fn sweep_crosses_the_self_dual_point() {
    let out = run(&[
        "sweep", "--n", "16", "--p-min", "0.40", "--p-max", "0.75", "--steps", "2", "--burn-in", "100", "--thinning", "1",
        "--n-samples", "400", "--seed", "3",
    ]);
    let r = rows(&out);
    let lo: f64 = r[0][1].parse().unwrap();
    let hi: f64 = r[1][1].parse().unwrap();
    assert!(lo < 0.1 && hi > 0.9, "{lo} {hi}");
}

#[test]
fn config_file_and_flag_overrides() {
    let dir = scratch("config");
    let cfg = dir.join("run.json");
    std::fs::write(&cfg, r#"{"n": 4, "p": 0.5, "burn-in": 3, "thinning": 1, "n-samples": 5, "n-chains": 2}"#).unwrap();
    let out = bin().args(["sample", "--config", cfg.to_str().unwrap(), "--n-samples", "7", "--out", "s.csv"]).current_dir(&dir).output().unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = std::fs::read_to_string(dir.join("s.csv")).unwrap();
    assert!(text.starts_with("chain,sample,eta,betti_lower,A,S\r\n"));
    assert_eq!(text.lines().count(), 1 + 2 * 7);
    let meta: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(dir.join("s.csv.meta.json")).unwrap()).unwrap();
    assert_eq!(meta["config"]["n-samples"], 7);
    assert_eq!(meta["config"]["p"], 0.5);
    assert!(meta["rng"].as_str().unwrap().contains("ChaCha"));
    assert!(meta["version"].is_string());
    let _ = std::fs::remove_dir_all(&dir);
}

#[test]
fn verify_selected_groups_and_fault_injection() {
    let ok = run(&["verify", "--duality", "--coupling"]);
    assert_eq!(ok.status.code(), Some(0));
    let report: serde_json::Value = serde_json::from_slice(&ok.stdout).unwrap();
    assert_eq!(report["passed"], true);
    assert_eq!(report["meta"]["groups"], serde_json::json!(["duality", "coupling"]));
    let bad = run(&["verify", "--duality", "--inject-fault", "weight"]);
    assert_eq!(bad.status.code(), Some(2));
    let a = run(&["verify", "--alexander", "--seed", "42"]);
    let b = run(&["verify", "--alexander", "--seed", "43"]);
    let strip = |o: &Output| {
        let mut v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
        v["meta"]["seed"] = serde_json::Value::Null;
        v
    };
    assert_eq!(strip(&a), strip(&b));
}

#[test]
fn lambda_reports_non_convergence() {
    // The midpoint 0.2 is far below threshold, so one step leaves a bracket of width 0.15.
    let out = run(&[
        "lambda", "--n", "4", "--q", "1", "--p-min", "0.05", "--p-max", "0.35", "--tolerance", "0.001", "--max-iter", "1",
        "--burn-in", "0", "--thinning", "1", "--n-samples", "200",
    ]);
    assert_eq!(out.status.code(), Some(3));
    let r = rows(&out);
    assert_eq!(r.len(), 1);
    assert_eq!(r[0][6], "false");
    assert_eq!((r[0][2].parse::<f64>().unwrap(), r[0][3].parse::<f64>().unwrap()), (0.2, 0.35));
}

#[test]
fn wilson_writes_wide_long_and_plot_outputs() {
    let dir = scratch("wilson");
    let out = bin()
        .args([
            "wilson", "--d", "3", "--i", "2", "--q", "2", "--p", "0.5", "--loops", "1,2", "--margin", "1", "--burn-in", "20",
            "--thinning", "1", "--n-samples", "100", "--rare-samples", "100", "--rare-burn-in", "20", "--out", "w.csv",
            "--emit-plot-script",
        ])
        .current_dir(&dir)
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let wide = std::fs::read_to_string(dir.join("w.csv")).unwrap();
    assert!(wide.starts_with("beta,p,q,i,d,N,n1,n2,per,area,re_w,im_w,stderr,v_gamma_est,v_stderr,n_samples,seed\r\n"));
    assert_eq!(wide.lines().count(), 3);
    let long = std::fs::read_to_string(dir.join("w.long.csv")).unwrap();
    assert!(long.contains("area_rate"));
    assert!(dir.join("w.csv.meta.json").exists() && dir.join("w.plot.py").exists());
    let _ = std::fs::remove_dir_all(&dir);
}

#[test]
fn sw_run_reports_the_predicted_limit() {
    let out = run(&["sw-run", "--d", "2", "--n", "4", "--i", "1", "--q", "3", "--p", "0.8", "--burn-in", "10", "--thinning", "1", "--n-samples", "50"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let r = rows(&out);
    let limit: f64 = r[0][6].parse().unwrap();
    assert!((limit - (1.0 - 1.0 / 3.0)).abs() < 1e-9);
}
