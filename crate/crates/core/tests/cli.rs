use std::fs;
use std::process::{Command, Output};

use qcap::capacity::{depolarizing_ic_closed_form, repetition_coherent_information};
use qcap::switch::switched_cd_holevo_closed_form;

fn qcap(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qcap"))
        .args(args)
        .env_remove("QCAP_SEED")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn rows(csv: &str) -> Vec<Vec<String>> {
    csv.lines().skip(1).map(|l| l.split(',').map(str::to_string).collect()).collect()
}

#[test]
fn fig8_rows_recompute() {
    let o = qcap(&["fig8"]);
    assert!(o.status.success());
    let text = stdout(&o);
    assert!(text.starts_with("q,ic_single,ic_three_use_rate,ic_three_use_total\n"));
    let table = rows(&text);
    assert_eq!(table.len(), 61);
    assert_eq!(table[0], ["0", "1", "0.333333333333", "1"]);
    for row in table.iter().step_by(7) {
        let v: Vec<f64> = row.iter().map(|c| c.parse().unwrap()).collect();
        let rep = repetition_coherent_information(v[0]).unwrap();
        assert!((v[1] - depolarizing_ic_closed_form(v[0])).abs() < 1e-11);
        assert!((v[2] - rep.rate).abs() < 1e-11);
        assert!((v[3] - rep.total).abs() < 1e-11);
    }
    // sign change of the single-use column
    let zero_at: Vec<f64> = table
        .iter()
        .filter(|r| r[1] == "0")
        .map(|r| r[0].parse().unwrap())
        .collect();
    let root_bracket = (zero_at[0] - 0.005, zero_at[0]);
    assert!(root_bracket.0 < 0.1898 && root_bracket.1 > 0.1888, "{root_bracket:?}");
}

#[test]
fn fig8_is_deterministic_and_json_matches() {
    let a = qcap(&["fig8", "--grid", "0:0.3:0.05"]);
    let b = qcap(&["fig8", "--grid", "0:0.3:0.05"]);
    assert_eq!(a.stdout, b.stdout);
    let j = qcap(&["fig8", "--grid", "0.1,0.2", "--format", "json"]);
    let v: serde_json::Value = serde_json::from_slice(&j.stdout).unwrap();
    assert_eq!(v["rows"].as_array().unwrap().len(), 2);
    assert_eq!(v["rows"][1]["q"], 0.2);
}

#[test]
fn fig8_rejects_out_of_domain_grid() {
    let o = qcap(&["fig8", "--grid", "0.5"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn fig13_closed_form_column() {
    let o = qcap(&["fig13", "--grid", "2,3,9", "--restarts", "4", "--numeric-max-d", "3"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let table = rows(&stdout(&o));
    for row in &table {
        let d: usize = row[0].parse().unwrap();
        let cf: f64 = row[1].parse().unwrap();
        assert!((cf - switched_cd_holevo_closed_form(d).unwrap()).abs() < 1e-12);
    }
    assert_eq!(table[2][2], "");
    let numeric: f64 = table[0][2].parse().unwrap();
    assert!(numeric >= 0.9 * table[0][1].parse::<f64>().unwrap());
}

#[test]
fn config_file_and_overrides() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("cfg.json");
    let out = dir.path().join("out.csv");
    fs::write(
        &cfg,
        format!(
            r#"{{"name": "trial", "grid": [0.1, 0.2], "optimizer": {{"restarts": 3}}, "output": "{}"}}"#,
            out.display()
        ),
    )
    .unwrap();
    let o = qcap(&["fig8", "--config", cfg.to_str().unwrap()]);
    assert!(o.status.success());
    assert!(o.stdout.is_empty());
    assert_eq!(fs::read_to_string(&out).unwrap().lines().count(), 3);

    let o = qcap(&["fig8", "--config", cfg.to_str().unwrap(), "--grid", "0.3", "--format", "json"]);
    assert!(o.status.success());
    let v: serde_json::Value = serde_json::from_str(&fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(v["name"], "trial");
    assert_eq!(v["rows"].as_array().unwrap().len(), 1);

    fs::write(&cfg, r#"{"grid": [0.1], "bogus": 1}"#).unwrap();
    let o = qcap(&["fig8", "--config", cfg.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn seed_precedence() {
    let run = |env: Option<&str>, flag: Option<&str>| {
        let mut cmd = Command::new(env!("CARGO_BIN_EXE_qcap"));
        cmd.args(["switch", "--left", "ebxy", "--right", "ebxy", "--restarts", "2"]);
        if let Some(f) = flag {
            cmd.args(["--seed", f]);
        }
        cmd.env_remove("QCAP_SEED");
        if let Some(e) = env {
            cmd.env("QCAP_SEED", e);
        }
        let o = cmd.output().unwrap();
        assert!(o.status.success());
        let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
        v["optimizer"]["seed"].as_u64().unwrap()
    };
    assert_eq!(run(None, None), 0);
    assert_eq!(run(Some("17"), None), 17);
    assert_eq!(run(Some("17"), Some("5")), 5);
}

#[test]
fn validate_export_and_corruption() {
    let dir = tempfile::tempdir().unwrap();
    let good = dir.path().join("dep.json");
    let o = qcap(&["zoo", "export", "dep:q=0.1", "--out", good.to_str().unwrap()]);
    assert!(o.status.success());
    let o = qcap(&["validate", good.to_str().unwrap()]);
    assert!(o.status.success());
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["valid"], true);
    assert!(v["cptp_residual"].as_f64().unwrap() < 1e-12);
    assert!(v["choi_marginal_residual"].as_f64().unwrap() < 1e-12);

    let mut ch: serde_json::Value = serde_json::from_str(&fs::read_to_string(&good).unwrap()).unwrap();
    ch["kraus"][0][0][0][0] = serde_json::json!(0.99);
    let bad = dir.path().join("bad.json");
    fs::write(&bad, serde_json::to_string(&ch).unwrap()).unwrap();
    let o = qcap(&["validate", bad.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert!(v["cptp_residual"].as_f64().unwrap() > 1e-3);

    let broken = dir.path().join("broken.json");
    fs::write(&broken, "{\n  \"label\": \"x\",\n  \"dim_in\": oops\n}").unwrap();
    let o = qcap(&["validate", broken.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("line 3"));
}

#[test]
fn switch_eb_succeeds() {
    let o = qcap(&["switch-eb", "--restarts", "4"]);
    assert!(o.status.success());
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert!((v["ic_switched"].as_f64().unwrap() - 1.0).abs() < 1e-9);
    assert!(v["effective_channel_residual"].as_f64().unwrap() < 1e-12);
    assert!(v["ic_sequential"]["M after N"].as_f64().unwrap() < 1e-6);
}

#[test]
fn superactivation_report_shape_and_determinism() {
    let args = ["superactivation", "--grid", "0.8", "--restarts", "2"];
    let a = qcap(&args);
    let b = qcap(&args);
    assert_eq!(a.stdout, b.stdout);
    // the grid point is not PPT-certified, so the floor is not met
    assert_eq!(a.status.code(), Some(3));
    let v: serde_json::Value = serde_json::from_slice(&a.stdout).unwrap();
    let p = &v["points"][0];
    assert_eq!(p["joint_argmax"].as_array().unwrap().len(), 16);
    assert!(p["horodecki_best_ic"].as_f64().unwrap() <= 1e-6);
    assert!(p["joint_best_ic"].as_f64().unwrap() > 0.01);
}

#[test]
fn nonconvexity_with_state_file() {
    let dir = tempfile::tempdir().unwrap();
    let state = dir.path().join("rho.json");
    let matrix: Vec<Vec<[f64; 2]>> = (0..16)
        .map(|r| (0..16).map(|c| [if r == c { 1.0 / 16.0 } else { 0.0 }, 0.0]).collect())
        .collect();
    fs::write(&state, serde_json::to_string(&matrix).unwrap()).unwrap();
    let o = qcap(&["nonconvexity", "--state", state.to_str().unwrap(), "--grid", "0.2,0.7"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    for row in rows(&stdout(&o)) {
        let diff: f64 = row[3].parse().unwrap();
        assert!(diff < 1e-9);
    }
}

#[test]
fn zoo_list_names_channels() {
    let o = qcap(&["zoo", "list"]);
    let text = stdout(&o);
    for name in ["dep:", "cd:", "horodecki:", "erasure50", "ebxy"] {
        assert!(text.contains(name));
    }
}
