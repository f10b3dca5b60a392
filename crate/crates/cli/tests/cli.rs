use std::path::Path;
use std::process::{Command, Output};

use serde_json::{json, Value};

fn turret(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_turret"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn write_config(dir: &Path, name: &str, v: &Value) -> String {
    let p = dir.join(name);
    std::fs::write(&p, v.to_string()).unwrap();
    p.to_str().unwrap().to_string()
}

fn stdout_json(o: &Output) -> Value {
    assert!(o.status.success(), "stderr: {}", String::from_utf8_lossy(&o.stderr));
    serde_json::from_slice(&o.stdout).unwrap()
}

fn guaranteed_dilemma() -> Value {
    json!({
        "speeds": {"nu_slow": 0.2, "nu_fast": 0.7, "true_nu": "slow"},
        "state": {"theta_T": 0.0, "attackers": [{"r": 2.0, "theta": 0.6}, {"r": 1.25, "theta": -1.05}]},
        "policies": {
            "turret": [{"kind": "committed", "direction": "cw"}],
            "attackers": {"kind": "two_vs_one", "runner": "A2"},
            "open_loop_table": true
        },
        "sweep": {"ranges": {"r": [1.0, 3.0], "theta": [-3.141592653589793, 0.0]}, "steps": [4, 4]}
    })
}

fn force_dilemma() -> Value {
    json!({
        "speeds": {"nu_slow": 0.25, "nu_fast": 0.7, "true_nu": "slow"},
        "state": {"theta_T": 0.0, "attackers": [{"r": 2.0, "theta": 0.6}, {"r": 1.5, "theta": -1.05}]},
        "sim": {"dt": 0.001, "t_max": 20.0, "seed": 3},
        "policies": {
            "turret": [{"kind": "seek_r2v1"}, {"kind": "seek_r1v1"}, {"kind": "random_walk"}],
            "attackers": {"kind": "forcing_switch"}
        }
    })
}

/// Data rows of a trajectory CSV, after the `#` header and the column line.
fn csv_rows(path: &Path) -> (Vec<String>, Vec<String>, Vec<Vec<f64>>) {
    let text = std::fs::read_to_string(path).unwrap();
    let mut comments = Vec::new();
    let mut lines = text.lines();
    let header = loop {
        let l = lines.next().unwrap();
        match l.strip_prefix("# ") {
            Some(c) => comments.push(c.to_string()),
            None => break l.split(',').map(String::from).collect(),
        }
    };
    let rows = lines
        .map(|l| l.split(',').map(|x| x.parse::<f64>().unwrap()).collect())
        .collect();
    (comments, header, rows)
}

#[test]
fn classify_reports_labels() {
    let dir = tempfile::tempdir().unwrap();
    let gd = write_config(dir.path(), "gd.json", &guaranteed_dilemma());
    let v = stdout_json(&turret(&["classify", "--config", &gd]));
    assert_eq!(v["label"], "GuaranteedDilemma");
    assert_eq!(v["witnesses"]["order"], "A2->A1");
    assert_eq!(v["memberships"]["i1_fast_empty"], true);
    let fd = write_config(dir.path(), "fd.json", &force_dilemma());
    let v = stdout_json(&turret(&["classify", "--config", &fd]));
    assert_eq!(v["label"], "ForceDilemma");
    assert_eq!(v["version"], env!("CARGO_PKG_VERSION"));
}

#[test]
fn malformed_config_exits_2_naming_the_key() {
    let dir = tempfile::tempdir().unwrap();
    let mut v = guaranteed_dilemma();
    v["speeds"]["nu_fsat"] = json!(0.7);
    let p = write_config(dir.path(), "bad.json", &v);
    let o = turret(&["classify", "--config", &p]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("nu_fsat"));

    let mut v = guaranteed_dilemma();
    v["speeds"]["nu_slow"] = json!(0.9);
    let p = write_config(dir.path(), "speeds.json", &v);
    assert_eq!(turret(&["classify", "--config", &p]).status.code(), Some(2));
}

#[test]
fn attacker_inside_target_exits_3() {
    let dir = tempfile::tempdir().unwrap();
    let mut v = guaranteed_dilemma();
    v["state"]["attackers"][1]["r"] = json!(0.5);
    let p = write_config(dir.path(), "inside.json", &v);
    assert_eq!(turret(&["classify", "--config", &p]).status.code(), Some(3));
}

#[test]
fn open_loop_needs_guaranteed_dilemma() {
    let dir = tempfile::tempdir().unwrap();
    let mut v = force_dilemma();
    v["policies"]["open_loop_table"] = json!(true);
    let p = write_config(dir.path(), "ol.json", &v);
    let out = dir.path().join("o");
    let o = turret(&["simulate", "--config", &p, "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(3));
}

#[test]
fn simulate_writes_table_sidecar_and_open_loop_matrix() {
    let dir = tempfile::tempdir().unwrap();
    let p = write_config(dir.path(), "gd.json", &guaranteed_dilemma());
    let out = dir.path().join("out");
    stdout_json(&turret(&["simulate", "--config", &p, "--out", out.to_str().unwrap()]));
    let (comments, header, rows) = csv_rows(&out.join("trajectory.csv"));
    assert_eq!(comments[0], format!("turret {}", env!("CARGO_PKG_VERSION")));
    assert!(comments[1].starts_with("config_sha256 "));
    assert_eq!(header.len(), 15);
    assert_eq!(header[0], "t");
    assert_eq!(header[14], "theta_B2");
    assert!(rows.len() > 100);

    let side: Value = serde_json::from_str(&std::fs::read_to_string(out.join("trajectory.json")).unwrap()).unwrap();
    assert_eq!(side["J"], 0);
    assert_eq!(side["events"].as_array().unwrap().len(), 2);
    assert_eq!(side["config_hash"].as_str().unwrap(), &comments[1]["config_sha256 ".len()..]);

    let ol: Value = serde_json::from_str(&std::fs::read_to_string(out.join("open_loop.json")).unwrap()).unwrap();
    assert_eq!(ol["aggressive"], json!([0, 2]));
    assert_eq!(ol["conservative"], json!([1, 1]));
}

#[test]
fn forcing_runs_keep_distance_for_three_turret_policies() {
    let dir = tempfile::tempdir().unwrap();
    let p = write_config(dir.path(), "fd.json", &force_dilemma());
    let out = dir.path().join("out");
    stdout_json(&turret(&["simulate", "--config", &p, "--out", out.to_str().unwrap()]));
    for (k, name) in ["seek_r2v1", "seek_r1v1", "random_walk"].iter().enumerate() {
        let (_, header, rows) = csv_rows(&out.join(format!("trajectory_{k}_{name}.csv")));
        let d1 = header.iter().position(|h| h == "d1").unwrap();
        let d2 = header.iter().position(|h| h == "d2").unwrap();
        let d0 = rows[0][d1].min(rows[0][d2]);
        assert!(d0.is_finite() && d0 > 0.0);
        let live: Vec<f64> = rows
            .iter()
            .map(|r| r[d1].min(r[d2]))
            .take_while(|d| d.is_finite())
            .collect();
        assert!(live.len() > 10);
        let min = live.iter().cloned().fold(f64::INFINITY, f64::min);
        assert!(min >= d0 - 1e-3, "{name}: {min} < {d0}");
    }
}

#[test]
fn true_speed_flag_does_not_change_ss_fh_play() {
    let dir = tempfile::tempdir().unwrap();
    let mut runs = Vec::new();
    for speed in ["slow", "fast"] {
        let mut v = force_dilemma();
        v["speeds"]["true_nu"] = json!(speed);
        v["policies"]["turret"] = json!([{"kind": "seek_r1v1"}]);
        v["policies"]["attackers"] = json!({"kind": "ss_fh"});
        let p = write_config(dir.path(), &format!("{speed}.json"), &v);
        let out = dir.path().join(speed);
        stdout_json(&turret(&["simulate", "--config", &p, "--out", out.to_str().unwrap()]));
        let side: Value =
            serde_json::from_str(&std::fs::read_to_string(out.join("trajectory.json")).unwrap()).unwrap();
        let first = side["events"][0]["t"].as_f64().unwrap();
        let rows = csv_rows(&out.join("trajectory.csv")).2;
        runs.push(rows.into_iter().take_while(|r| r[0] < first).collect::<Vec<_>>());
    }
    assert_eq!(runs[0].len(), runs[1].len());
    let n = runs[0].len();
    assert!(n > 10);
    for k in 0..n {
        // attacker columns r, θ, v, φ for both attackers
        for c in [2, 3, 4, 5, 7, 8, 9, 10] {
            assert_eq!(runs[0][k][c].to_bits(), runs[1][k][c].to_bits(), "row {k} col {c}");
        }
        assert!(runs[0][k][7] <= 0.25 && runs[0][k][9] <= 0.25);
    }
}

#[test]
fn sweep_is_fast_and_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let p = write_config(dir.path(), "gd.json", &guaranteed_dilemma());
    let mut bytes = Vec::new();
    for run in ["a", "b"] {
        let out = dir.path().join(run);
        let t = std::time::Instant::now();
        stdout_json(&turret(&["sweep", "--config", &p, "--out", out.to_str().unwrap()]));
        assert!(t.elapsed().as_secs_f64() < 1.0);
        let csv = std::fs::read(out.join("sweep.csv")).unwrap();
        let curves = std::fs::read(out.join("curves.json")).unwrap();
        bytes.push((csv, curves));
    }
    assert!(bytes[0] == bytes[1], "outputs differ between runs");
    let text = String::from_utf8(bytes[0].0.clone()).unwrap();
    assert!(text.lines().any(|l| l == "r,theta,label,witness_order"));
    assert_eq!(text.lines().filter(|l| !l.starts_with('#')).count(), 17);
}

#[test]
fn fig8_sweep_has_six_labels() {
    let dir = tempfile::tempdir().unwrap();
    let mut v = guaranteed_dilemma();
    v["sweep"]["steps"] = json!([60, 60]);
    let p = write_config(dir.path(), "gd.json", &v);
    let out = dir.path().join("out");
    let s = stdout_json(&turret(&["sweep", "--config", &p, "--out", out.to_str().unwrap()]));
    assert!(s["counts"].as_array().unwrap().len() >= 6, "{}", s["counts"]);
    let curves: Value = serde_json::from_str(&std::fs::read_to_string(out.join("curves.json")).unwrap()).unwrap();
    let names: Vec<&str> = curves["curves"]
        .as_array()
        .unwrap()
        .iter()
        .map(|c| c["name"].as_str().unwrap())
        .collect();
    for n in ["1v1 Slow", "1v1 Fast", "Runner (slow)", "Runner (fast)", "Penetrator (slow)", "R1v1 exist", "R1v1 degenerate"] {
        assert!(names.contains(&n), "missing {n}");
    }
}

#[test]
fn config_echo_round_trips_and_matches_hash() {
    let dir = tempfile::tempdir().unwrap();
    // the same state in degrees
    let mut v = guaranteed_dilemma();
    v["state"]["attackers"][0]["theta"] = json!(0.6f64.to_degrees());
    v["state"]["attackers"][1]["theta"] = json!((-1.05f64).to_degrees());
    v["sweep"]["ranges"]["theta"] = json!([-180.0, 0.0]);
    let p = write_config(dir.path(), "deg.json", &v);
    let out = dir.path().join("out");
    let r = stdout_json(&turret(&["regions", "--config", &p, "--out", out.to_str().unwrap(), "--degrees"]));
    assert_eq!(r["label"], "GuaranteedDilemma");
    let echo = out.join("config.json");
    let first = std::fs::read_to_string(&echo).unwrap();

    // re-running on the echo, now in radians, reproduces echo and hash
    let out2 = dir.path().join("out2");
    let r2 = stdout_json(&turret(&["regions", "--config", echo.to_str().unwrap(), "--out", out2.to_str().unwrap()]));
    let second = std::fs::read_to_string(out2.join("config.json")).unwrap();
    let a: Value = serde_json::from_str(&first).unwrap();
    let b: Value = serde_json::from_str(&second).unwrap();
    assert_eq!(a["state"], b["state"]);
    assert_eq!(a["speeds"], b["speeds"]);
    assert_eq!(a["sweep"], b["sweep"]);
    assert_eq!(a["output"]["regions"], b["output"]["regions"]);
    assert_eq!(r["sets"], r2["sets"]);
}

#[test]
fn seed_flag_overrides_config() {
    let dir = tempfile::tempdir().unwrap();
    let p = write_config(dir.path(), "fd.json", &force_dilemma());
    let out = dir.path().join("out");
    stdout_json(&turret(&["regions", "--config", &p, "--out", out.to_str().unwrap(), "--seed", "99"]));
    let echo: Value = serde_json::from_str(&std::fs::read_to_string(out.join("config.json")).unwrap()).unwrap();
    assert_eq!(echo["sim"]["seed"], 99);
}

#[test]
fn verify_passes_on_defaults() {
    let o = turret(&["verify"]);
    let v = stdout_json(&o);
    assert_eq!(v["passed"], true);
    let names: Vec<&str> = v["checks"].as_array().unwrap().iter().map(|c| c["name"].as_str().unwrap()).collect();
    assert!(names.contains(&"boundary_rate_max_is_v_over_nu"));
    assert!(names.contains(&"forcing_keeps_distance_to_overlaps"));
    let rate = &v["checks"][0];
    assert!(rate["value"].as_f64().unwrap() < 1e-9);
}
