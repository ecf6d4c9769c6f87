use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use tempfile::TempDir;

fn linelife(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_linelife"))
        .args(args)
        .env_remove("RUST_LOG")
        .output()
        .expect("binary runs")
}

fn path_str(p: &Path) -> &str {
    p.to_str().expect("utf-8 temp path")
}

/// Small Texas scenario with a coarse mesh and a short horizon.
fn small_scenario(dir: &Path, extra: &str) -> PathBuf {
    let path = dir.join("small.toml");
    let text = format!(
        "include = [\"conductor.toml\"]\nname = \"small\"\nweather = \"texas.csv\"\n{extra}\n\
         [simulation]\nn_elements = 20\nn_steps = 40\nsnapshot_every = 20\n"
    );
    fs::write(&path, text).unwrap();
    path
}

fn read_csv(path: &Path) -> (Vec<String>, Vec<Vec<f64>>) {
    let mut reader = csv::Reader::from_path(path).unwrap();
    let header = reader.headers().unwrap().iter().map(String::from).collect();
    let rows = reader
        .records()
        .map(|r| r.unwrap().iter().map(|v| v.parse::<f64>().unwrap()).collect())
        .collect();
    (header, rows)
}

fn json(path: &Path) -> serde_json::Value {
    serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap()
}

/// Every file in `dir` except the run manifest, by name.
fn result_files(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut files: Vec<_> = fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.file_name().unwrap() != "run_manifest.json")
        .map(|p| {
            (
                p.file_name().unwrap().to_string_lossy().into_owned(),
                fs::read(&p).unwrap(),
            )
        })
        .collect();
    files.sort();
    files
}

#[test]
fn simulate_writes_series_snapshots_and_summary() {
    let tmp = TempDir::new().unwrap();
    let scenario = small_scenario(tmp.path(), "");
    let out = tmp.path().join("out");
    let res = linelife(&["simulate", "--scenario", path_str(&scenario), "--out", path_str(&out)]);
    assert!(res.status.success(), "{}", String::from_utf8_lossy(&res.stderr));
    let (header, rows) = read_csv(&out.join("timeseries.csv"));
    assert_eq!(
        header,
        ["t_years", "phi_max", "fatigue_max", "theta_max_k", "voltage_drop_v"]
    );
    assert_eq!(rows.len(), 40);
    assert!(rows.iter().flatten().all(|v| v.is_finite()));
    for step in [0, 20, 40] {
        assert!(out.join(format!("snapshot_{step:05}.csv")).is_file(), "snapshot {step}");
    }
    let summary = json(&out.join("failure_summary.json"));
    assert_eq!(summary["failed"], false);
    assert_eq!(summary["steps_completed"], 40);
    let manifest = json(&out.join("run_manifest.json"));
    assert_eq!(manifest["command"], "simulate");
    assert_eq!(manifest["scenario"]["simulation"]["n_elements"], 20);
}

#[test]
fn zero_temperature_limit_fails_immediately() {
    let tmp = TempDir::new().unwrap();
    let scenario = small_scenario(tmp.path(), "");
    let out = tmp.path().join("out");
    let res = linelife(&[
        "simulate",
        "--scenario",
        path_str(&scenario),
        "--theta-lim",
        "0",
        "--out",
        path_str(&out),
    ]);
    assert!(res.status.success());
    let summary = json(&out.join("failure_summary.json"));
    assert_eq!(summary["failed"], true);
    assert_eq!(summary["failure_step"], 1);
}

#[test]
fn missing_weather_file_is_a_config_error() {
    let tmp = TempDir::new().unwrap();
    let path = tmp.path().join("bad.toml");
    fs::write(
        &path,
        "include = [\"conductor.toml\"]\nname = \"bad\"\nweather = \"nowhere.csv\"\n",
    )
    .unwrap();
    let res = linelife(&["simulate", "--scenario", path_str(&path), "--out", path_str(tmp.path())]);
    assert_eq!(res.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&res.stderr).contains("nowhere.csv"));
}

#[test]
fn unknown_preset_and_bad_flags_are_config_errors() {
    assert_eq!(linelife(&["simulate", "--scenario", "atlantis"]).status.code(), Some(2));
    assert_eq!(
        linelife(&["uq", "--scenario", "texas", "--params", "zeta"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(
        linelife(&["simulate", "--scenario", "texas", "--damage", "-1"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(linelife(&["simulate"]).status.code(), Some(2));
}

#[test]
fn invalid_parameter_is_a_config_error() {
    let tmp = TempDir::new().unwrap();
    let scenario = small_scenario(tmp.path(), "[material]\nfracture_energy = -1.0\n");
    let res = linelife(&[
        "simulate",
        "--scenario",
        path_str(&scenario),
        "--out",
        path_str(tmp.path()),
    ]);
    assert_eq!(res.status.code(), Some(2), "{}", String::from_utf8_lossy(&res.stderr));
}

#[test]
fn solver_breakdown_exits_3_and_flushes_partial_results() {
    let tmp = TempDir::new().unwrap();
    let scenario = small_scenario(tmp.path(), "[current]\nbase_a = 1e150\n");
    let out = tmp.path().join("out");
    let res = linelife(&["simulate", "--scenario", path_str(&scenario), "--out", path_str(&out)]);
    assert_eq!(res.status.code(), Some(3));
    assert!(out.join("timeseries.csv").is_file());
    assert!(out.join("run_manifest.json").is_file());
    let summary = json(&out.join("failure_summary.json"));
    assert!(summary["error"].as_str().unwrap().contains("step"));
}

#[test]
fn single_point_uq_matches_the_deterministic_run() {
    let tmp = TempDir::new().unwrap();
    let scenario = small_scenario(tmp.path(), "");
    let det = tmp.path().join("det");
    let uq = tmp.path().join("uq");
    let s = path_str(&scenario);
    assert!(linelife(&["simulate", "--scenario", s, "--out", path_str(&det)])
        .status
        .success());
    let res = linelife(&[
        "uq",
        "--scenario",
        s,
        "--params",
        "I_b",
        "--points",
        "1",
        "--out",
        path_str(&uq),
    ]);
    assert!(res.status.success(), "{}", String::from_utf8_lossy(&res.stderr));
    let (_, det_rows) = read_csv(&det.join("timeseries.csv"));
    let (header, mean_rows) = read_csv(&uq.join("uq_mean.csv"));
    let theta_col = header.iter().position(|h| h.starts_with("theta")).unwrap();
    assert_eq!(det_rows.len(), mean_rows.len());
    for (d, m) in det_rows.iter().zip(&mean_rows) {
        assert_eq!(d[0], m[0]);
        assert_eq!(d[3], m[theta_col]);
    }
    let (_, std_rows) = read_csv(&uq.join("uq_std.csv"));
    assert!(std_rows.iter().all(|r| r[1..].iter().all(|&v| v == 0.0)));
    let manifest = json(&uq.join("campaign_manifest.json"));
    assert_eq!(manifest["nodes"].as_array().unwrap().len(), 1);
}

#[test]
fn huge_limit_gives_zero_failure_curves() {
    let tmp = TempDir::new().unwrap();
    let scenario = small_scenario(tmp.path(), "");
    let out = tmp.path().join("out");
    let res = linelife(&[
        "pf",
        "--scenario",
        path_str(&scenario),
        "--scenario",
        "california",
        "--elements",
        "20",
        "--steps",
        "30",
        "--params",
        "g_c,I_b",
        "--points",
        "2",
        "--damage",
        "minimal,severe",
        "--theta-lim",
        "1e6",
        "--out",
        path_str(&out),
    ]);
    assert!(res.status.success(), "{}", String::from_utf8_lossy(&res.stderr));
    for name in [
        "small_minimal",
        "small_severe",
        "california_minimal",
        "california_severe",
    ] {
        let (_, rows) = read_csv(&out.join(format!("pf_{name}.csv")));
        assert_eq!(rows.len(), 30);
        assert!(rows.iter().all(|r| r[1] == 0.0), "{name}");
    }
    let (header, _) = read_csv(&out.join("pf_combined.csv"));
    assert_eq!(header.len(), 5);
}

#[test]
fn manifest_reexecution_is_byte_identical_across_worker_counts() {
    let tmp = TempDir::new().unwrap();
    let scenario = small_scenario(tmp.path(), "");
    let first = tmp.path().join("first");
    let res = linelife(&[
        "uq",
        "--scenario",
        path_str(&scenario),
        "--params",
        "g_c,I_b",
        "--points",
        "3",
        "--workers",
        "1",
        "--out",
        path_str(&first),
    ]);
    assert!(res.status.success(), "{}", String::from_utf8_lossy(&res.stderr));
    let manifest = first.join("run_manifest.json");
    let second = tmp.path().join("second");
    let res = linelife(&[
        "uq",
        "--scenario",
        path_str(&manifest),
        "--workers",
        "3",
        "--out",
        path_str(&second),
    ]);
    assert!(res.status.success(), "{}", String::from_utf8_lossy(&res.stderr));
    let a = result_files(&first);
    assert!(a.len() >= 4);
    assert_eq!(a, result_files(&second));
}

#[test]
fn environment_mirrors_flags() {
    let tmp = TempDir::new().unwrap();
    let out = tmp.path().join("out");
    let res = Command::new(env!("CARGO_BIN_EXE_linelife"))
        .arg("simulate")
        .env("LINELIFE_SCENARIO", "florida")
        .env("LINELIFE_ELEMENTS", "10")
        .env("LINELIFE_STEPS", "5")
        .env("LINELIFE_DAMAGE", "severe")
        .env("LINELIFE_OUT", &out)
        .output()
        .unwrap();
    assert!(res.status.success(), "{}", String::from_utf8_lossy(&res.stderr));
    let manifest = json(&out.join("run_manifest.json"));
    assert_eq!(manifest["scenario"]["name"], "florida");
    assert_eq!(manifest["scenario"]["damage"], "severe");
    assert_eq!(manifest["scenario"]["simulation"]["n_steps"], 5);
}

#[test]
fn convergence_reports_both_methods() {
    let tmp = TempDir::new().unwrap();
    let scenario = small_scenario(
        tmp.path(),
        "[campaign]\nconvergence_step = 10\npcm_orders = [2, 3, 8]\nreference_points = 8\nmc_samples = [20, 40]\n",
    );
    let out = tmp.path().join("out");
    let res = linelife(&[
        "convergence",
        "--scenario",
        path_str(&scenario),
        "--out",
        path_str(&out),
    ]);
    assert!(res.status.success(), "{}", String::from_utf8_lossy(&res.stderr));
    let text = fs::read_to_string(out.join("convergence.csv")).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "method,evaluations,relative_error");
    assert_eq!(lines.len(), 1 + 3 + 2);
    assert!(lines.iter().any(|l| l.starts_with("pcm,8,0")));
}
