use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use shrinkspec::geometry::io::write_profile_csv;
use shrinkspec::geometry::ProfileCurve;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_shrinkspec")).args(args).output().expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn json(path: &Path) -> serde_json::Value {
    serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap()
}

#[test]
fn shoot_torus_writes_profile_and_scan() {
    let dir = tempfile::tempdir().unwrap();
    let profile = dir.path().join("torus.csv");
    let scan = dir.path().join("scan.csv");
    let o = run(&[
        "shoot-torus",
        "--c",
        "-1",
        "--n",
        "256",
        "--out",
        profile.to_str().unwrap(),
        "--emit-scan",
        scan.to_str().unwrap(),
    ]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    assert!(stderr(&o).contains("shrinker residual"));
    let text = fs::read_to_string(&profile).unwrap();
    assert!(text.starts_with("s,rho,z,alpha"));
    assert_eq!(text.lines().count(), 257);
    let scan_text = fs::read_to_string(&scan).unwrap();
    assert!(scan_text.starts_with("r0,miss"));
    assert_eq!(scan_text.lines().count(), 65);
}

#[test]
fn positive_c_is_a_usage_error() {
    let o = run(&["shoot-torus", "--c", "0.5"]);
    assert_eq!(code(&o), 1);
    assert!(stderr(&o).contains("C must be negative for shrinkers"));
}

#[test]
fn empty_bracket_exits_with_no_sign_change() {
    let o = run(&["shoot-torus", "--r-lo", "0.5", "--r-hi", "0.9", "--n", "64"]);
    assert_eq!(code(&o), 2, "{}", stderr(&o));
}

#[test]
fn help_and_version_exit_zero_and_bad_args_exit_one() {
    assert_eq!(code(&run(&["--help"])), 0);
    assert_eq!(code(&run(&["--version"])), 0);
    assert_eq!(code(&run(&["frobnicate"])), 1);
    assert_eq!(code(&run(&["verify", "--n", "many"])), 1);
}

#[test]
fn spectrum_of_shot_profile() {
    let dir = tempfile::tempdir().unwrap();
    let profile = dir.path().join("torus.csv");
    let out = dir.path().join("spectrum.json");
    let dump = dir.path().join("modes");
    assert_eq!(code(&run(&["shoot-torus", "--n", "512", "--out", profile.to_str().unwrap()])), 0);
    let o = run(&[
        "spectrum",
        "--profile",
        profile.to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
        "--dump-eigenfunctions",
        dump.to_str().unwrap(),
    ]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let v = json(&out);
    let l1 = v["spectrum"]["lambda1"].as_f64().unwrap();
    assert!((l1 - 1.0).abs() < 1e-3, "{l1}");
    assert_eq!(v["version"], env!("CARGO_PKG_VERSION"));
    assert_eq!(v["config"]["k_max"], 8);
    assert!(dump.join("mode_k1_j0.csv").exists());
    assert_eq!(fs::read_dir(&dump).unwrap().count(), 9 * 11);
}

#[test]
fn spectrum_with_single_mode_gives_circle_ladder() {
    let dir = tempfile::tempdir().unwrap();
    let profile = dir.path().join("round.csv");
    let curve = ProfileCurve::round_torus(2.0, 1.0, 256).unwrap();
    write_profile_csv(&curve, fs::File::create(&profile).unwrap()).unwrap();
    let o = run(&[
        "spectrum",
        "--profile",
        profile.to_str().unwrap(),
        "--density",
        "constant",
        "--k-max",
        "0",
        "--j-max",
        "4",
        "--format",
        "csv",
    ]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let text = String::from_utf8(o.stdout.clone()).unwrap();
    let rows: Vec<_> = text.lines().skip(1).collect();
    assert_eq!(rows.len(), 5);
    assert!(rows.iter().all(|r| r.split(',').nth(1) == Some("0")));
    assert!(stderr(&o).contains("WARN") || stderr(&o).contains("warn"));
}

#[test]
fn malformed_profile_is_a_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    let profile = dir.path().join("bad.csv");
    fs::write(&profile, "s,rho,z,alpha\n0,1,0,0\n0.1,oops,0,0\n").unwrap();
    let o = run(&["spectrum", "--profile", profile.to_str().unwrap()]);
    assert_eq!(code(&o), 1);
    assert!(stderr(&o).contains("row"), "{}", stderr(&o));
}

#[test]
fn verify_passes_and_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.json");
    let b = dir.path().join("b.json");
    let o = run(&["verify", "--c", "-1", "--out", a.to_str().unwrap()]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let table = String::from_utf8(o.stdout.clone()).unwrap();
    assert!(!table.contains("FAIL"), "{table}");
    for name in ["Reilly inequality", "equality", "sandwich", "Minkowski", "nodal", "second solution"] {
        assert!(table.contains(name), "{name}");
    }
    assert_eq!(code(&run(&["--sequential", "verify", "--c", "-1", "--out", b.to_str().unwrap()])), 0);
    assert_eq!(fs::read(&a).unwrap(), fs::read(&b).unwrap());
    let v = json(&a);
    assert_eq!(v["config"]["C"], -1.0);
    assert_eq!(v["config"]["n"], 1024);
    assert!(v["config"]["shooter"]["bracket"].is_array());
}

#[test]
fn verify_round_torus_is_a_strict_inequality() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("round.json");
    let o = run(&["verify", "--surface", "round-torus", "--out", out.to_str().unwrap()]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let v = json(&out);
    assert_eq!(v["reilly"]["equality"], false);
    assert_eq!(v["reilly"]["inequality_holds"], true);
}

#[test]
fn verify_scales_with_c() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("half.json");
    let o = run(&["verify", "--c", "-0.5", "--out", out.to_str().unwrap()]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let l1 = json(&out)["lambda1"].as_f64().unwrap();
    assert!((l1 - 0.5).abs() < 0.5e-3, "{l1}");
}

#[test]
fn sphere_check_cases() {
    let o = run(&["sphere-check", "--R", "1", "--r", "0.6", "--format", "json"]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert!((v["bound"].as_f64().unwrap() - 1.0 / 0.36).abs() < 1e-10);
    assert_eq!(v["equality"], true);
    let o = run(&["sphere-check", "--r", "1", "--format", "json"]);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert!((v["bound"].as_f64().unwrap() - 1.0).abs() < 1e-15);
    let o = run(&["sphere-check", "--R", "1", "--r", "1.5"]);
    assert_eq!(code(&o), 1);
    assert!(stderr(&o).contains("radius"), "{}", stderr(&o));
}

#[test]
fn sl_solve_on_a_flat_table() {
    let dir = tempfile::tempdir().unwrap();
    let table = dir.path().join("table.csv");
    let n = 400;
    let l = 2.0;
    let mut text = String::from("s,p,q\n");
    for i in 0..n {
        text.push_str(&format!("{},1.0,0.0\n", l * i as f64 / n as f64));
    }
    fs::write(&table, text).unwrap();
    let o = run(&["sl-solve", "--table", table.to_str().unwrap(), "--j-max", "2"]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    let ev = v["eigenvalues"].as_array().unwrap();
    let exact = (std::f64::consts::TAU / l).powi(2);
    assert_eq!(ev[0].as_f64().unwrap(), 0.0);
    assert!((ev[1].as_f64().unwrap() / exact - 1.0).abs() < 1e-4);
}
