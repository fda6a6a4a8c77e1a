use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use lienard::analytic::{EigenState, Sector};
use lienard::io;
use lienard::numeric;
use lienard::PhysParams;

fn lienard(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_lienard"))
        .args(args)
        .env("LIENARD_OUT_DIR", dir)
        .output()
        .expect("binary runs")
}

fn read(dir: &Path, name: &str) -> String {
    fs::read_to_string(dir.join(name)).unwrap()
}

#[test]
fn analytic_spectrum_lists_half_integer_levels() {
    let dir = tempfile::tempdir().unwrap();
    let out = lienard(dir.path(), &["spectrum", "--omega", "1", "--k", "1", "--hbar", "1", "--n-max", "4", "--method", "analytic"]);
    assert_eq!(out.status.code(), Some(0));
    let doc: io::SpectrumDocument = serde_json::from_str(&read(dir.path(), "spectrum_analytic_bound.json")).unwrap();
    assert_eq!(doc.energies(), vec![0.5, 1.5, 2.5, 3.5, 4.5]);
    assert_eq!(doc.top, Some(4));
}

#[test]
fn broken_spectrum_is_negative() {
    let dir = tempfile::tempdir().unwrap();
    let out = lienard(dir.path(), &["spectrum", "--n-max", "2", "--sector", "broken", "--omega", "2"]);
    assert_eq!(out.status.code(), Some(0));
    let doc: io::SpectrumDocument = serde_json::from_str(&read(dir.path(), "spectrum_analytic_broken.json")).unwrap();
    assert_eq!(doc.energies(), vec![-1.0, -3.0, -5.0]);
}

#[test]
fn shooting_spectrum_close_to_closed_form() {
    let dir = tempfile::tempdir().unwrap();
    let out = lienard(dir.path(), &["spectrum", "--n-max", "2", "--method", "shooting"]);
    assert_eq!(out.status.code(), Some(0));
    let doc: io::SpectrumDocument = serde_json::from_str(&read(dir.path(), "spectrum_shooting_bound.json")).unwrap();
    for (n, e) in doc.energies().iter().enumerate() {
        let want = n as f64 + 0.5;
        assert!(((e - want) / want).abs() < 1e-6, "{n}: {e}");
    }
    let out = lienard(dir.path(), &["spectrum", "--method", "shooting", "--sector", "broken"]);
    assert_eq!(out.status.code(), Some(64));
}

#[test]
fn rest_orbit_is_one_row() {
    let dir = tempfile::tempdir().unwrap();
    let out = lienard(dir.path(), &["simulate", "--A", "0", "--periods", "1"]);
    assert_eq!(out.status.code(), Some(0));
    let rows = io::read_trajectory_csv(&read(dir.path(), "trajectory.csv")).unwrap();
    assert_eq!(rows, vec![[0.0; 5]]);
}

#[test]
fn simulate_writes_sidecar_and_conserves_energy() {
    let dir = tempfile::tempdir().unwrap();
    let out = lienard(dir.path(), &["simulate", "--A", "2", "--periods", "2", "--dt", "1e-3"]);
    assert_eq!(out.status.code(), Some(0));
    let rows = io::read_trajectory_csv(&read(dir.path(), "trajectory.csv")).unwrap();
    let h0 = rows[0][4];
    assert!(rows.iter().all(|r| (r[4] - h0).abs() < 1e-8 * h0));
    let meta: serde_json::Value = serde_json::from_str(&read(dir.path(), "trajectory.csv.meta.json")).unwrap();
    assert_eq!(meta["details"]["integrator"], "rk4");
    let period = meta["details"]["period"].as_f64().unwrap();
    assert!((period - 2.0 * std::f64::consts::PI).abs() < 1e-6);
}

#[test]
fn irregular_amplitude_is_a_domain_error() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(lienard(dir.path(), &["simulate", "--A", "3.5"]).status.code(), Some(1));
}

#[test]
fn usage_errors_exit_64() {
    let dir = tempfile::tempdir().unwrap();
    for args in [
        &["portrait", "--energies", ""][..],
        &["portrait", "--energies", "1,-2"],
        &["--omega", "0", "semiclassical"],
        &["--k", "-1", "semiclassical"],
        &["spectrum", "--method", "bogus"],
        &["frobnicate"],
        &["simulate", "--A", "-1"],
    ] {
        assert_eq!(lienard(dir.path(), args).status.code(), Some(64), "{args:?}");
    }
    assert_eq!(fs::read_dir(dir.path()).unwrap().count(), 0);
}

#[test]
fn portrait_spans_turning_points() {
    let dir = tempfile::tempdir().unwrap();
    let out = lienard(dir.path(), &["portrait", "--energies", "0.5,4.5", "--points", "101"]);
    assert_eq!(out.status.code(), Some(0));
    let params = PhysParams::default();
    // the separatrix contour is open and stops just short of p_star
    for (name, e, lo, hi, end_tol) in [
        ("contour_E0.5.csv", 0.5, -7.0 / 6.0, 5.0 / 6.0, 1e-12),
        ("contour_E4.5.csv", 4.5, -4.5, 1.5, 1e-10),
    ] {
        let rows = io::read_contour_csv(&read(dir.path(), name)).unwrap();
        assert_eq!(rows.len(), 101);
        assert!((rows[0][0] - lo).abs() < 1e-12);
        assert!((rows[100][0] - hi).abs() < end_tol);
        let meta: serde_json::Value = serde_json::from_str(&read(dir.path(), &format!("{name}.meta.json"))).unwrap();
        assert_eq!(meta["details"]["open"], e >= 4.5);
        assert_eq!(meta["details"]["p_range"][1].as_f64().unwrap(), hi);
        for r in rows {
            assert!((params.hamiltonian(r[1], r[0]).unwrap() - e).abs() < 1e-10);
        }
    }
}

#[test]
fn outputs_are_byte_identical_across_runs() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    let runs: [&[&str]; 4] = [
        &["simulate", "--A", "1.5", "--periods", "1"],
        &["portrait", "--energies", "1,2"],
        &["semiclassical"],
        &["wavefunction", "--n", "1", "--sector", "broken"],
    ];
    for args in runs {
        assert_eq!(lienard(a.path(), args).status.code(), Some(0));
        assert_eq!(lienard(b.path(), args).status.code(), Some(0));
    }
    let mut names: Vec<_> = fs::read_dir(a.path())
        .unwrap()
        .map(|e| e.unwrap().file_name().into_string().unwrap())
        .filter(|n| !n.ends_with(".meta.json"))
        .collect();
    names.sort();
    assert_eq!(names.len(), 6);
    for n in names {
        assert_eq!(fs::read(a.path().join(&n)).unwrap(), fs::read(b.path().join(&n)).unwrap(), "{n}");
    }
}

#[test]
fn semiclassical_levels_at_unit_parameters() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(lienard(dir.path(), &["semiclassical"]).status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&read(dir.path(), "semiclassical.json")).unwrap();
    assert_eq!(v["N"], 3);
    let levels = v["levels"].as_array().unwrap();
    for (n, l) in levels.iter().enumerate() {
        assert_eq!(l["E_n"].as_f64().unwrap(), n as f64 + 0.5);
        let a = l["A_n"].as_f64().unwrap();
        assert!((a * a - (2 * n + 1) as f64).abs() < 1e-12);
    }
}

#[test]
fn wavefunction_round_trip_reproduces_residual() {
    let dir = tempfile::tempdir().unwrap();
    let params = PhysParams::default();
    for (sector, n) in [(Sector::Bound, 3), (Sector::Broken, 2)] {
        let out = lienard(dir.path(), &["wavefunction", "--n", &n.to_string(), "--sector", sector.as_str()]);
        assert_eq!(out.status.code(), Some(0));
        let stem = format!("wavefunction_{}_n{n}", sector.as_str());
        let rows = io::read_wavefunction_csv(&read(dir.path(), &format!("{stem}.csv"))).unwrap();
        let report: serde_json::Value = serde_json::from_str(&read(dir.path(), &format!("{stem}.residual.json"))).unwrap();
        let state = EigenState::new(n, sector, &params).unwrap();
        for (p, v) in &rows {
            assert_eq!(*v, state.amplitude(*p));
        }
        let grid: Vec<f64> = rows.iter().map(|r| r.0).collect();
        let again = numeric::residual_norm(&state, &grid, &params).unwrap();
        let stored = report["residual_norm"].as_f64().unwrap();
        assert!((again.residual_norm - stored).abs() <= 1e-12, "{stored} vs {}", again.residual_norm);
        assert!(stored <= 1e-8);
    }
}

#[test]
fn verify_classical_and_semiclassical_pass() {
    let dir = tempfile::tempdir().unwrap();
    for suite in ["classical", "semiclassical"] {
        let out = lienard(dir.path(), &["verify", "--suite", suite, "--parallel"]);
        assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stdout));
        let stdout = String::from_utf8(out.stdout).unwrap();
        assert!(stdout.lines().filter(|l| l.starts_with("PASS")).count() >= 3);
        assert!(!stdout.contains("FAIL"));
        let report: serde_json::Value = serde_json::from_str(&read(dir.path(), &format!("verify_{suite}.json"))).unwrap();
        assert_eq!(report["passed"], true);
    }
}

#[test]
fn out_dir_flag_beats_environment() {
    let env_dir = tempfile::tempdir().unwrap();
    let flag_dir = tempfile::tempdir().unwrap();
    let out = lienard(env_dir.path(), &["semiclassical", "--out-dir", flag_dir.path().to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    assert!(flag_dir.path().join("semiclassical.json").exists());
    assert!(!env_dir.path().join("semiclassical.json").exists());
}
