use std::path::Path;
use std::process::{Command, Output};

fn ibt(args: &[&str], out_dir: Option<&Path>) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_ibt"));
    cmd.args(args).env_remove("IBT_OUT_DIR");
    if let Some(d) = out_dir {
        cmd.env("IBT_OUT_DIR", d);
    }
    cmd.output().expect("spawn ibt")
}

fn json(o: &Output) -> serde_json::Value {
    assert!(o.status.success(), "stderr: {}", String::from_utf8_lossy(&o.stderr));
    serde_json::from_slice(&o.stdout).unwrap()
}

#[test]
fn icf_info_reports_contact_data() {
    let v = json(&ibt(&["icf-info", "--alpha0", "1", "--alpha1", "1"], None));
    assert_eq!(v["tool"], "ibt");
    assert_eq!(v["command"], "icf-info");
    // beta(1,1): phi(x) = 1 - x, so C0 = C1 = 1 and A = 1/2
    assert!((v["c0"].as_f64().unwrap() - 1.0).abs() < 1e-12);
    assert!((v["c1"].as_f64().unwrap() - 1.0).abs() < 1e-12);
    assert!((v["A"].as_f64().unwrap() - 0.5).abs() < 1e-12);

    let v = json(&ibt(&["icf-info", "--alpha0", "2", "--alpha1", "2"], None));
    assert!((v["c0"].as_f64().unwrap() - 3.0).abs() < 1e-9);
}

#[test]
fn invalid_input_exits_two() {
    let o = ibt(&["no-such-command"], None);
    assert_eq!(o.status.code(), Some(2));
    let o = ibt(&["icf-info", "--alpha0", "0", "--alpha1", "1"], None);
    assert_eq!(o.status.code(), Some(2));
    let o = ibt(&["limit-law", "--config", "/definitely/missing.json"], None);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("config not found"));
}

#[test]
fn malformed_config_exits_two() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("c.json");
    // seed is required
    std::fs::write(
        &cfg,
        r#"{"alpha0":1,"alpha1":1,"observable":{"kind":"linear-x","params":{"slope":1}},"n":10,"n_traj":10}"#,
    )
    .unwrap();
    let o = ibt(&["limit-law", "--config", cfg.to_str().unwrap()], None);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn unwritable_output_exits_three() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("missing-dir").join("x.json");
    let o = ibt(&["icf-info", "--alpha0", "1", "--alpha1", "1", "--out", bad.to_str().unwrap()], None);
    assert_eq!(o.status.code(), Some(3));
}

#[test]
fn out_dir_environment_variable() {
    let dir = tempfile::tempdir().unwrap();
    let o = ibt(&["sample-stable", "--p", "1.5", "--a", "1", "--n", "10", "--seed", "3"], Some(dir.path()));
    assert!(o.status.success());
    assert!(o.stdout.is_empty());
    let text = std::fs::read_to_string(dir.path().join("stable.csv")).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert!(lines[0].starts_with("# {"));
    assert_eq!(lines[1], "x");
    assert_eq!(lines.len(), 12);

    let o = ibt(&["icf-info", "--alpha0", "1", "--alpha1", "1", "--out", "info.json"], Some(dir.path()));
    assert!(o.status.success());
    assert!(dir.path().join("info.json").exists());
}

#[test]
fn reruns_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("c.json");
    std::fs::write(
        &cfg,
        r#"{"alpha0":2,"alpha1":2,"observable":{"kind":"linear-x","params":{"slope":-1}},"n":200,"n_traj":300,"seed":11,"xi_samples":1000}"#,
    )
    .unwrap();
    let args = ["limit-law", "--config", cfg.to_str().unwrap()];
    let a = ibt(&args, None);
    let b = ibt(&args, None);
    assert!(a.status.success(), "{}", String::from_utf8_lossy(&a.stderr));
    assert_eq!(a.stdout, b.stdout);
    let v: serde_json::Value = serde_json::from_slice(&a.stdout).unwrap();
    assert_eq!(v["prediction"]["case"], "stable_two_sided");

    let h = ["return-hist", "--samples", "20000", "--max-n", "20", "--seed", "4"];
    assert_eq!(ibt(&h, None).stdout, ibt(&h, None).stdout);
}

#[test]
fn trajectory_rows() {
    let o = ibt(&["trajectory", "--alpha0", "1", "--alpha1", "1", "--x0", "0.3", "--y0", "0.7", "--n", "5"], None);
    assert!(o.status.success());
    let text = String::from_utf8(o.stdout).unwrap();
    let rows: Vec<&str> = text.lines().skip(2).collect();
    assert_eq!(rows.len(), 6);
    assert_eq!(rows[0], "0,3e-1,7e-1");
    for r in rows {
        let v: Vec<f64> = r.split(',').map(|s| s.parse().unwrap()).collect();
        assert!((0.0..=1.0).contains(&v[1]) && (0.0..=1.0).contains(&v[2]));
    }
}

#[test]
fn out_of_range_point_is_invalid() {
    let o = ibt(&["trajectory", "--alpha0", "1", "--alpha1", "1", "--x0", "1.5", "--y0", "0.5", "--n", "5"], None);
    assert_eq!(o.status.code(), Some(2));
}
