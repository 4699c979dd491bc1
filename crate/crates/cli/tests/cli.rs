use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_pomdp-voi"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn path(p: &Path) -> &str {
    p.to_str().expect("utf-8 path")
}

/// Writes the deterioration example into `dir` and returns it as JSON.
fn exported(dir: &Path) -> Value {
    let o = run(&["export-model", "--out", path(dir)]);
    assert!(o.status.success(), "{}", stderr(&o));
    serde_json::from_str(&std::fs::read_to_string(dir.join("model.json")).unwrap()).unwrap()
}

fn write_json(dir: &Path, name: &str, v: &Value) -> String {
    let p = dir.join(name);
    std::fs::write(&p, serde_json::to_string(v).unwrap()).unwrap();
    path(&p).to_string()
}

#[test]
fn exported_model_validates() {
    let dir = tempfile::tempdir().unwrap();
    exported(dir.path());
    let model = dir.path().join("model.json");
    let o = run(&["validate", "--model", path(&model), "--out", path(dir.path())]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert!(stdout(&o).contains("valid (3 states, 2 actions, 2 background and 300 additional observations"));
    assert!(dir.path().join("validate.manifest.json").exists());
}

#[test]
fn perturbed_row_is_reported_with_its_coordinates() {
    let dir = tempfile::tempdir().unwrap();
    let mut m = exported(dir.path());
    let p = m["transition"][1][0][1].as_f64().unwrap();
    m["transition"][1][0][1] = Value::from(p + 1e-6);
    let file = write_json(dir.path(), "bad.json", &m);
    let o = run(&["validate", "--model", &file, "--out", path(dir.path())]);
    assert_eq!(o.status.code(), Some(3));
    assert!(stderr(&o).contains("transition row (x=2, a=1)"), "{}", stderr(&o));
    assert!(!dir.path().join("validate.manifest.json").exists());
}

#[test]
fn unit_discount_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let mut m = exported(dir.path());
    m["discount"] = Value::from(1.0);
    let file = write_json(dir.path(), "undiscounted.json", &m);
    let o = run(&["validate", "--model", &file, "--out", path(dir.path())]);
    assert_eq!(o.status.code(), Some(3));
    assert!(stderr(&o).contains("discount 1 outside (0, 1)"), "{}", stderr(&o));
}

#[test]
fn malformed_file_is_a_parse_error_with_location() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("broken.json");
    std::fs::write(&file, "{\n  \"n_states\": 3,\n  oops\n}").unwrap();
    let o = run(&["validate", "--model", path(&file), "--out", path(dir.path())]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("line 3"), "{}", stderr(&o));
}

#[test]
fn unknown_figure_is_a_usage_error() {
    let o = run(&["reproduce", "--figure", "fig12"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn solve_writes_policy_and_threshold() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&["solve", "--grid", "101", "--out", path(dir.path())]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert!(stdout(&o).contains("vectors = 2"));
    let csv = std::fs::read_to_string(dir.path().join("solve_policy.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("belief,p_dam,action,envelope_value"));
    // do nothing below the threshold, repair at and above it
    let actions: Vec<&str> = lines.map(|l| l.split(',').nth(2).unwrap()).collect();
    assert_eq!(actions.len(), 102);
    let first_repair = actions.iter().position(|a| *a == "2").unwrap();
    assert!(actions[..first_repair].iter().all(|a| *a == "1"));
    assert!(actions[first_repair..].iter().all(|a| *a == "2"));
    let alpha: Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("solve_alpha.json")).unwrap()).unwrap();
    assert_eq!(alpha["vectors"].as_array().unwrap().len(), 2);
}

#[test]
fn dry_run_prints_the_manifest_and_writes_nothing() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("never");
    let o = run(&["--dry-run", "voi", "--grid", "51", "--setting", "flexible", "--out", path(&out)]);
    assert!(o.status.success(), "{}", stderr(&o));
    let m: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(m["command"], "voi");
    assert_eq!(m["parameters"]["grid"], 51);
    assert_eq!(m["parameters"]["setting"], "flexible");
    assert_eq!(m["parameters"]["iters"], 180);
    assert_eq!(m["outputs"].as_array().unwrap().len(), 2);
    assert!(!out.exists());
}

#[test]
fn identical_runs_and_reruns_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let (a, b, c) = (dir.path().join("a"), dir.path().join("b"), dir.path().join("c"));
    for out in [&a, &b] {
        let o = run(&["voi", "--grid", "41", "--setting", "flexible", "--out", path(out)]);
        assert!(o.status.success(), "{}", stderr(&o));
    }
    let manifest = a.join("voi.manifest.json");
    let o = run(&["rerun", "--manifest", path(&manifest), "--out", path(&c)]);
    assert!(o.status.success(), "{}", stderr(&o));
    let first = std::fs::read(a.join("voi.csv")).unwrap();
    assert_eq!(first, std::fs::read(b.join("voi.csv")).unwrap());
    assert_eq!(first, std::fs::read(c.join("voi.csv")).unwrap());
    let header = String::from_utf8_lossy(&first).lines().next().unwrap().to_string();
    assert_eq!(header, "belief,p_dam,V_Y,U_Y,V_W,U_W,VoI_CP,VoI_CO,VoI_F,dC,dV");
}

#[test]
fn rollouts_are_deterministic_and_agree_with_the_linear_solve() {
    let dir = tempfile::tempdir().unwrap();
    let mut summaries = Vec::new();
    for (i, workers) in ["1", "2"].iter().enumerate() {
        let out = dir.path().join(i.to_string());
        let o = bin()
            .args(["evaluate", "--grid", "51", "--trajectories", "4000", "--seed", "7", "--export-chain"])
            .args(["--out", path(&out)])
            .env("POMDP_VOI_WORKERS", workers)
            .output()
            .unwrap();
        assert!(o.status.success(), "{}", stderr(&o));
        assert!(out.join("evaluate_chain.csv").exists());
        summaries.push(std::fs::read_to_string(out.join("evaluate_summary.txt")).unwrap());
    }
    assert_eq!(summaries[0], summaries[1]);
    let z: f64 = summaries[0]
        .lines()
        .find_map(|l| l.strip_prefix("z_score = "))
        .unwrap()
        .parse()
        .unwrap();
    assert!(z.abs() < 3.0, "{z}");
}

#[test]
fn bad_worker_count_is_a_parse_error() {
    let o = bin().args(["--dry-run", "solve"]).env("POMDP_VOI_WORKERS", "many").output().unwrap();
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn stationary_reports_a_tight_fixed_point() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&["stationary", "--grid", "101", "--out", path(dir.path())]);
    assert!(o.status.success(), "{}", stderr(&o));
    let residual: f64 = stdout(&o)
        .lines()
        .find_map(|l| l.strip_prefix("fixed_point_residual = "))
        .unwrap()
        .parse()
        .unwrap();
    assert!(residual < 1e-10, "{residual}");
    let csv = std::fs::read_to_string(dir.path().join("stationary.csv")).unwrap();
    let last = csv.lines().last().unwrap();
    let cdf: f64 = last.split(',').nth(3).unwrap().parse().unwrap();
    assert!((cdf - 1.0).abs() < 1e-9);
}

#[test]
fn sweep_keeps_failed_values_in_place() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&["sweep", "--parameter", "sigma", "--values", "3,-1", "--grid", "31", "--out", path(dir.path())]);
    assert_eq!(o.status.code(), Some(3));
    assert!(stderr(&o).contains("sigma = -1"));
    let summary = std::fs::read_to_string(dir.path().join("sweep_summary.csv")).unwrap();
    let rows: Vec<&str> = summary.lines().skip(1).collect();
    assert_eq!(rows.len(), 2);
    assert!(rows[0].contains(",ok,"));
    assert!(rows[1].contains(",failed,"));
}

#[test]
fn fig4_bundle_has_the_plot_columns() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&["reproduce", "--figure", "fig4", "--grid", "41", "--out", path(dir.path())]);
    assert!(o.status.success(), "{}", stderr(&o));
    let csv = std::fs::read_to_string(dir.path().join("fig4.csv")).unwrap();
    assert_eq!(
        csv.lines().next().unwrap(),
        "belief,p_dam,V_Y,U_Y,V_W,U_W,VoI_CP,VoI_CO,VoI_F,pinf_cdf"
    );
    assert_eq!(csv.lines().count(), 43);
    assert!(stdout(&o).contains("E_VoI_F = "));
    assert!(dir.path().join("reproduce-fig4.manifest.json").exists());
}
