use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::{json, Value};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_stlplan"))
}

fn shipped(i: usize) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join(format!("scenarios/scenario{i}.json"))
}

fn shipped_json(i: usize) -> Value {
    serde_json::from_str(&std::fs::read_to_string(shipped(i)).unwrap()).unwrap()
}

fn write_json(dir: &Path, v: &Value) -> PathBuf {
    let p = dir.join("scenario.json");
    std::fs::write(&p, serde_json::to_string_pretty(v).unwrap()).unwrap();
    p
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

#[test]
fn shipped_scenarios_validate() {
    for i in 1..=3 {
        let o = bin().arg("validate").arg(shipped(i)).output().unwrap();
        assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    }
}

#[test]
fn decompose_prints_cuts() {
    let o = bin().arg("decompose").arg(shipped(1)).output().unwrap();
    assert_eq!(code(&o), 0);
    let text = String::from_utf8_lossy(&o.stdout);
    assert!(text.contains("cuts"), "{text}");
}

#[test]
fn config_errors_exit_with_four() {
    let tmp = tempfile::tempdir().unwrap();
    let mut off_grid = shipped_json(3);
    off_grid["formula"] = json!("F[0,0.15] mu1");
    let mut overlap = shipped_json(3);
    overlap["formula"] = json!("G[0,10] F[0,5] mu1 & G[12,20] F[0,5] mu2");
    let mut unknown = shipped_json(3);
    unknown["colour"] = json!("red");
    let mut bad_region = shipped_json(3);
    bad_region["formula"] = json!("F[0,10] nowhere");
    for v in [off_grid, overlap, unknown, bad_region] {
        let p = write_json(tmp.path(), &v);
        for sub in ["validate", "decompose"] {
            let o = bin().arg(sub).arg(&p).output().unwrap();
            assert_eq!(code(&o), 4, "{v}");
            assert!(!o.stderr.is_empty());
        }
    }
    let o = bin().arg("validate").arg(tmp.path().join("missing.json")).output().unwrap();
    assert_eq!(code(&o), 4);
}

#[test]
fn start_inside_obstacle_is_a_config_error() {
    let tmp = tempfile::tempdir().unwrap();
    let mut v = shipped_json(3);
    v["x0"] = json!([5.0, 1.0, 0.0]);
    let p = write_json(tmp.path(), &v);
    let o = bin().arg("run").arg(&p).arg("--out").arg(tmp.path().join("out")).output().unwrap();
    assert_eq!(code(&o), 4);
}

#[test]
fn sealed_start_writes_partial_artifacts() {
    let tmp = tempfile::tempdir().unwrap();
    let mut v = shipped_json(3);
    let obstacles = v["workspace"]["obstacles"].as_array_mut().unwrap();
    obstacles.push(json!([0.0, 2.0, 1.5, 2.0]));
    obstacles.push(json!([1.5, 2.0, 0.0, 1.5]));
    let p = write_json(tmp.path(), &v);
    let out = tmp.path().join("out");
    let o = bin().arg("run").arg(&p).arg("--out").arg(&out).output().unwrap();
    assert_eq!(code(&o), 3, "{}", String::from_utf8_lossy(&o.stdout));
    let report = std::fs::read_to_string(out.join("report.txt")).unwrap();
    assert!(report.contains("plan"), "{report}");
    assert!(out.join("figure.svg").exists());
    assert!(!out.join("traj.csv").exists());
}

#[test]
fn run_then_check_round_trips() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("out");
    let o = bin().arg("run").arg(shipped(3)).args(["--seed", "1", "--out"]).arg(&out).output().unwrap();
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stdout));
    for f in ["plan.csv", "pairs.csv", "corridor.csv", "traj.csv", "figure.svg", "report.txt"] {
        assert!(out.join(f).exists(), "{f}");
    }
    let traj = out.join("traj.csv");
    let o = bin().arg("check").arg(&traj).arg(shipped(3)).output().unwrap();
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stdout));

    // Park the robot at the start for the whole horizon.
    let text = std::fs::read_to_string(&traj).unwrap();
    let mut lines = text.lines();
    let header = lines.next().unwrap();
    let mut parked = vec![header.to_string()];
    for line in lines {
        let mut cols: Vec<String> = line.split(',').map(String::from).collect();
        cols[2] = "1".into();
        cols[3] = "1".into();
        parked.push(cols.join(","));
    }
    let bad = tmp.path().join("parked.csv");
    std::fs::write(&bad, parked.join("\n") + "\n").unwrap();
    let o = bin().arg("check").arg(&bad).arg(shipped(3)).output().unwrap();
    assert_eq!(code(&o), 2, "{}", String::from_utf8_lossy(&o.stdout));
}

#[test]
fn plan_is_reproducible() {
    let a = bin().arg("plan").arg(shipped(2)).args(["--seed", "3"]).output().unwrap();
    let b = bin().arg("plan").arg(shipped(2)).args(["--seed", "3"]).output().unwrap();
    assert_eq!(code(&a), 0);
    assert_eq!(a.stdout, b.stdout);
    assert!(a.stdout.len() > 100);
}
