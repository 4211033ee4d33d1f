use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn geophase(args: &[&str], cwd: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_geophase")).args(args).current_dir(cwd).output().expect("spawn geophase")
}

fn json(out: &Output) -> Value {
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

fn listing(dir: &Path) -> Vec<String> {
    let mut names: Vec<_> = fs::read_dir(dir).unwrap().map(|e| e.unwrap().file_name().into_string().unwrap()).collect();
    names.sort();
    names
}

#[test]
fn trajectory_writes_one_file_per_total_spin() {
    let dir = tempfile::tempdir().unwrap();
    let out = geophase(&["--n1", "3", "--n2", "3", "trajectory", "--out", "traj"], dir.path());
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let names = listing(&dir.path().join("traj"));
    assert_eq!(names.len(), 7);
    assert!(names.contains(&"trajectory_stot+000.csv".to_string()));
    assert!(names.contains(&"trajectory_stot-006.csv".to_string()));

    let text = fs::read_to_string(dir.path().join("traj/trajectory_stot+000.csv")).unwrap();
    assert!(text.lines().any(|l| l.starts_with("# units:")));
    let header = text.lines().find(|l| !l.starts_with('#')).unwrap();
    assert_eq!(header, "t,re_alpha_c,im_alpha_c,re_alpha,im_alpha,phase");
    let rows: Vec<_> = text.lines().filter(|l| !l.starts_with('#')).skip(1).collect();
    assert_eq!(rows.len(), 4097);
    let last: Vec<f64> = rows[4096].split(',').map(|x| x.parse().unwrap()).collect();
    assert!((last[0] - std::f64::consts::TAU).abs() < 1e-12);
    assert!(last[1].hypot(last[2]) < 1e-9);
    assert!((last[5] - std::f64::consts::FRAC_PI_3).abs() < 1e-6);
}

#[test]
fn outputs_are_byte_identical_across_runs() {
    let dir = tempfile::tempdir().unwrap();
    for args in [
        &["--n1", "2", "--n2", "2", "phases"][..],
        &["--n1", "2", "--n2", "2", "phases", "--format", "csv"][..],
        &["--n1", "3", "--n2", "3", "entangle", "--delta-alpha", "0.5"][..],
        &["feasibility"][..],
    ] {
        let a = geophase(args, dir.path());
        let b = geophase(args, dir.path());
        assert!(a.status.success(), "{args:?}");
        assert_eq!(a.stdout, b.stdout, "{args:?}");
    }
    geophase(&["--n1", "2", "--n2", "2", "trajectory", "--out", "a"], dir.path());
    geophase(&["--n1", "2", "--n2", "2", "trajectory", "--out", "b"], dir.path());
    let names = listing(&dir.path().join("a"));
    assert_eq!(names, listing(&dir.path().join("b")));
    for name in names {
        assert_eq!(fs::read(dir.path().join("a").join(&name)).unwrap(), fs::read(dir.path().join("b").join(&name)).unwrap());
    }
}

#[test]
fn even_harmonic_is_a_usage_error_without_partial_output() {
    let dir = tempfile::tempdir().unwrap();
    let out = geophase(&["--m", "2", "--n1", "2", "--n2", "2", "trajectory", "--out", "traj"], dir.path());
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("m must be odd"), "{err}");
    assert!(out.stdout.is_empty());
    assert!(!dir.path().join("traj").exists());
    assert_eq!(geophase(&["--m", "4", "phases"], dir.path()).status.code(), Some(2));
}

#[test]
fn invalid_inputs_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    for args in [
        &["feasibility", "--kappa-mhz", "0"][..],
        &["feasibility", "--atoms", "0"][..],
        &["--n1", "0", "phases"][..],
        &["--n1", "2", "--n2", "3", "phases"][..],
        &["--steps", "17", "phases"][..],
        &["--g", "0", "phases"][..],
        &["no-such-command"][..],
    ] {
        let out = geophase(args, dir.path());
        assert_eq!(out.status.code(), Some(2), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
        assert!(out.stdout.is_empty(), "{args:?}");
    }
    assert_eq!(geophase(&["--help"], dir.path()).status.code(), Some(0));
}

#[test]
fn validate_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let ok = geophase(&["validate"], dir.path());
    assert_eq!(ok.status.code(), Some(0));
    assert_eq!(json(&ok)["all_passed"], Value::Bool(true));

    let injected = geophase(&["validate", "--inject-even-m"], dir.path());
    assert_eq!(injected.status.code(), Some(3));
    let report: Value = serde_json::from_slice(&injected.stdout).unwrap();
    let closure = report["checks"].as_array().unwrap().iter().find(|c| c["name"] == "closure").unwrap();
    assert_eq!(closure["passed"], Value::Bool(false));

    let coarse = geophase(&["validate", "--steps", "16"], dir.path());
    assert_eq!(coarse.status.code(), Some(3));
}

#[test]
fn bell_case_through_cli() {
    let dir = tempfile::tempdir().unwrap();
    let v = json(&geophase(
        &["--n1", "1", "--n2", "1", "entangle", "--gate-phase", "0.78539816339744828"],
        dir.path(),
    ));
    assert!((v["E"].as_f64().unwrap() - 1.0).abs() < 1e-8);
    assert!((v["normalized"].as_f64().unwrap() - 1.0).abs() < 1e-8);
    assert_eq!(v["E_max"].as_f64().unwrap(), 1.0);
}

#[test]
fn entangle_sweep_and_density_files() {
    let dir = tempfile::tempdir().unwrap();
    let out = geophase(
        &["--n1", "3", "--n2", "3", "entangle", "--sweep", "sweep.csv", "--points", "5", "--density-out", "rho.json"],
        dir.path(),
    );
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let sweep = fs::read_to_string(dir.path().join("sweep.csv")).unwrap();
    let body: Vec<_> = sweep.lines().filter(|l| !l.starts_with('#')).collect();
    assert_eq!(body[0], "phi2,delta_alpha,delta_theta,E,E_max,normalized");
    assert_eq!(body.len(), 1 + 5 * 4);
    let rho: Value = serde_json::from_slice(&fs::read(dir.path().join("rho.json")).unwrap()).unwrap();
    assert_eq!(rho["dims"], serde_json::json!([3, 3]));
    assert_eq!(rho["entries"].as_array().unwrap().len(), 16 * 16);
}

#[test]
fn zero_drive_gives_zero_trajectories_and_phases() {
    let dir = tempfile::tempdir().unwrap();
    let out = geophase(&["--n1", "2", "--n2", "2", "--f0", "0", "trajectory", "--out", "t"], dir.path());
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    for name in listing(&dir.path().join("t")) {
        let text = fs::read_to_string(dir.path().join("t").join(name)).unwrap();
        for row in text.lines().filter(|l| !l.starts_with('#')).skip(1) {
            let v: Vec<f64> = row.split(',').map(|x| x.parse().unwrap()).collect();
            assert!(v[1..].iter().all(|x| *x == 0.0), "{row}");
        }
    }
    let v = json(&geophase(&["--n1", "2", "--n2", "2", "--f0", "0", "phases"], dir.path()));
    for table in ["stage1", "stage2", "total"] {
        for entry in v[table]["entries"].as_array().unwrap() {
            assert_eq!(entry["phi"].as_f64().unwrap(), 0.0);
        }
    }
}

#[test]
fn larger_detuning_weakens_the_gate() {
    let dir = tempfile::tempdir().unwrap();
    let phi2 = |n: &str| {
        let v = json(&geophase(&["--n1", "2", "--n2", "2", "--n", n, "phases"], dir.path()));
        v["coefficients"]["closed"]["phi2"].as_f64().unwrap()
    };
    assert!(phi2("5").abs() < phi2("1").abs());
}

#[test]
fn feasibility_formats() {
    let dir = tempfile::tempdir().unwrap();
    let v = json(&geophase(&["feasibility"], dir.path()));
    assert_eq!(v["delta_min"].as_f64().unwrap(), 19000.0);
    assert!((v["alpha_sq_max"].as_f64().unwrap() - 0.2907).abs() < 1e-4);
    let table = geophase(&["feasibility", "--format", "table"], dir.path());
    let text = String::from_utf8(table.stdout).unwrap();
    assert!(text.contains("Delta_min = Gamma N"));
    assert!(text.lines().last().unwrap().ends_with("true"));
}
