use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn fig8(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_fig8"))
        .arg("--out")
        .arg(dir)
        .args(args)
        .output()
        .expect("runs")
}

fn json(path: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

fn body(path: &Path) -> String {
    std::fs::read_to_string(path).unwrap().lines().skip(1).collect::<Vec<_>>().join("\n")
}

fn solve(dir: &Path, name: &str, t: (f64, f64, f64), extra: &[&str]) -> Output {
    let (x0, y0, v) = (t.0.to_string(), t.1.to_string(), t.2.to_string());
    let mut args = extra.to_vec();
    args.extend(["solve", "--x0", &x0, "--y0", &y0, "--v", &v, "--name", name]);
    fig8(dir, &args)
}

#[test]
fn solve_near_alpha() {
    let dir = tempfile::tempdir().unwrap();
    let out = solve(dir.path(), "alpha", (0.75, 0.72, 0.53), &[]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let rec = json(&dir.path().join("alpha.json"));
    assert_eq!(rec["provenance"]["version"], env!("CARGO_PKG_VERSION"));
    assert!(rec["provenance"]["config"]["integrator"].is_object());
    let p = &rec["data"]["params"];
    assert!((p["y0"].as_f64().unwrap() - 0.725966).abs() < 1e-5);
    assert!((p["v"].as_f64().unwrap() - 0.522742).abs() < 1e-5);
    let orbit = std::fs::read_to_string(dir.path().join("alpha_orbit.csv")).unwrap();
    assert!(orbit.starts_with("# {"));
    // provenance, header, 2400 samples
    assert_eq!(orbit.lines().count(), 2 + 2400);
}

#[test]
fn solve_delta_energy() {
    let dir = tempfile::tempdir().unwrap();
    let out = solve(dir.path(), "delta", (0.84, 0.827038, 0.126408), &[]);
    assert!(out.status.success());
    let e = json(&dir.path().join("delta.json"))["data"]["energy"].as_f64().unwrap();
    assert!((e + 0.0330865).abs() < 1e-5, "E = {e}");
}

#[test]
fn garbage_seed_fails_cleanly() {
    let dir = tempfile::tempdir().unwrap();
    let out = solve(dir.path(), "bad", (0.2, 0.1, 3.0), &[]);
    assert!(!out.status.success());
    assert!(matches!(out.status.code(), Some(2) | Some(3)), "{:?}", out.status);
    assert!(String::from_utf8_lossy(&out.stderr).starts_with("error:"));
    assert!(!dir.path().join("bad.json").exists());
}

#[test]
fn scans() {
    let dir = tempfile::tempdir().unwrap();
    let out = fig8(dir.path(), &["scan", "--n", "40"]);
    assert!(out.status.success());
    let seeds = json(&dir.path().join("seeds.json"));
    let near = |y0: f64, v: f64| {
        seeds["data"]["seeds"].as_array().unwrap().iter().any(|c| {
            (c["seed"]["y0"].as_f64().unwrap() - y0).abs() < 0.03 && (c["seed"]["v"].as_f64().unwrap() - v).abs() < 0.03
        })
    };
    assert!(near(0.725966, 0.522742));
    assert!(near(0.553223, 0.615805));
    let grid = json(&dir.path().join("scan.json"));
    assert_eq!(grid["data"]["y0_axis"].as_array().unwrap().len(), 40);
    assert_eq!(body(&dir.path().join("scan.csv")).lines().count(), 1 + 40 * 40);

    let out = fig8(dir.path(), &["scan", "--n", "30", "--y0-max", "0.5"]);
    assert!(out.status.success());
    assert_eq!(json(&dir.path().join("seeds.json"))["data"]["seeds"].as_array().unwrap().len(), 0);

    let out = fig8(dir.path(), &["scan", "--n", "2", "--jobs", "1"]);
    assert!(out.status.success());
    assert!(json(&dir.path().join("seeds.json"))["data"]["seeds"].as_array().unwrap().len() <= 1);
}

#[test]
fn continue_zero_steps_echoes_record() {
    let dir = tempfile::tempdir().unwrap();
    solve(dir.path(), "alpha", (0.75, 0.72, 0.53), &[]);
    let rec = dir.path().join("alpha.json");
    let out = fig8(dir.path(), &["continue", rec.to_str().unwrap(), "--steps", "0", "--label", "echo"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let rows = body(&dir.path().join("echo_series.csv"));
    assert_eq!(rows.lines().count(), 2);
    assert!(rows.lines().nth(1).unwrap().starts_with("echo,7.5"));
}

#[test]
fn epsilon_series_keeps_its_collision_count() {
    let dir = tempfile::tempdir().unwrap();
    solve(dir.path(), "epsilon", (0.91, 0.803912, 0.0857343), &[]);
    let rec = dir.path().join("epsilon.json");
    let out = fig8(
        dir.path(),
        &["continue", rec.to_str().unwrap(), "--x0-min", "0.75", "--x0-max", "1.0", "--no-specials"],
    );
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let mut rdr = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .from_path(dir.path().join("epsilon_series.csv"))
        .unwrap();
    let n0: Vec<String> = rdr.records().map(|r| r.unwrap()[6].to_string()).collect();
    assert!(n0.len() > 5);
    assert!(n0.iter().all(|n| n == "24"), "{n0:?}");
    let special = json(&dir.path().join("epsilon_special.json"));
    assert_eq!(special["data"]["stop"]["reason"], "left_range");
}

#[test]
fn alpha_continuation_spans_the_fold() {
    let dir = tempfile::tempdir().unwrap();
    solve(dir.path(), "alpha", (0.75, 0.72, 0.53), &[]);
    let rec = dir.path().join("alpha.json");
    let out = fig8(dir.path(), &["continue", rec.to_str().unwrap(), "--x0-min", "0.6", "--x0-max", "1.2"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let special = json(&dir.path().join("alpha_special.json"));
    let folds = special["data"]["fold_points"].as_array().unwrap();
    assert_eq!(folds.len(), 1);
    assert!((folds[0]["params"]["x0"].as_f64().unwrap() - 0.6812).abs() < 2e-3);
    let kinds: Vec<&str> =
        special["data"]["special_points"].as_array().unwrap().iter().map(|p| p["kind"].as_str().unwrap()).collect();
    assert!(kinds.contains(&"x0_min"), "{kinds:?}");
}

#[test]
fn analyze_outputs() {
    let dir = tempfile::tempdir().unwrap();
    solve(dir.path(), "beta", (1.0, 0.956733, 0.144241), &[]);
    let out = fig8(dir.path(), &["analyze", dir.path().join("beta_orbit.csv").to_str().unwrap()]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let s = json(&dir.path().join("beta_summary.json"));
    assert_eq!(s["data"]["summary"]["n0"], 8);
    assert_eq!(s["data"]["collisions"]["n0"], 8);

    solve(dir.path(), "h6", (1.0, 0.98, 0.23), &["--potential", "homogeneous:6"]);
    let out = fig8(dir.path(), &["analyze", dir.path().join("h6_orbit.csv").to_str().unwrap()]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let s = json(&dir.path().join("h6_summary.json"));
    assert!((s["data"]["summary"]["energy"].as_f64().unwrap() - 0.0467827).abs() < 1e-4);
    assert!(s["data"]["collisions"].is_null());

    let empty = dir.path().join("empty.json");
    std::fs::write(&empty, "").unwrap();
    let out = fig8(dir.path(), &["analyze", empty.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(5));
}

#[test]
fn rerun_from_embedded_config_is_bit_identical() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    solve(a.path(), "s", (0.84, 0.827038, 0.126408), &["--rel-tol", "1e-12", "--tol", "1e-9"]);
    let cfg = a.path().join("s.json");
    let out = solve(b.path(), "s", (0.84, 0.827038, 0.126408), &["--config", cfg.to_str().unwrap()]);
    assert!(out.status.success());
    let (ja, jb) = (json(&a.path().join("s.json")), json(&b.path().join("s.json")));
    assert_eq!(ja["data"], jb["data"]);
    assert_eq!(jb["provenance"]["config"]["integrator"]["rel_tol"], 1e-12);
    assert_eq!(body(&a.path().join("s_orbit.csv")), body(&b.path().join("s_orbit.csv")));
}

#[test]
fn bad_inputs_map_to_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.json");
    std::fs::write(&cfg, r#"{"schema_version": 99}"#).unwrap();
    let out = fig8(dir.path(), &["--config", cfg.to_str().unwrap(), "scan", "--n", "2"]);
    assert_eq!(out.status.code(), Some(5));
    let out = fig8(dir.path(), &["--potential", "lj:6,12", "scan", "--n", "2"]);
    assert_eq!(out.status.code(), Some(5));
    let out = fig8(dir.path(), &["frobnicate"]);
    assert_eq!(out.status.code(), Some(5));

    let file = dir.path().join("file");
    std::fs::write(&file, "").unwrap();
    let out = Command::new(env!("CARGO_BIN_EXE_fig8"))
        .args(["--out", file.join("sub").to_str().unwrap(), "scan", "--n", "2"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(4));
}

#[test]
fn reproduce_quick_subset() {
    let dir = tempfile::tempdir().unwrap();
    let out = fig8(dir.path(), &["reproduce", "--quick", "--criteria", "1,2"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stdout));
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(stdout.lines().next().unwrap().starts_with("PASS criterion  1"));
    let reports = json(&dir.path().join("reproduce.json"));
    assert_eq!(reports["data"].as_array().unwrap().len(), 2);
}
