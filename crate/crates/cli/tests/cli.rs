use std::collections::HashMap;
use std::f64::consts::{FRAC_PI_2, PI, TAU};
use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use curved_nbody::io::{parse_key_values, parse_trajectory};
use tempfile::TempDir;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_curved-nbody"))
        .args(args)
        .env_remove("CURVED_NBODY_TOL_SCALE")
        .output()
        .expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exited normally")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

/// Last value for each key in a key=value report.
fn values(text: &str) -> HashMap<String, String> {
    parse_key_values(text)
        .unwrap()
        .into_iter()
        .map(|e| (e.key, e.value))
        .collect()
}

fn reals(s: &str) -> Vec<f64> {
    s.split(',').map(|x| x.parse().unwrap()).collect()
}

fn list(v: &[f64]) -> String {
    v.iter()
        .map(|x| format!("{x:.17e}"))
        .collect::<Vec<_>>()
        .join(",")
}

/// `drift_H=.. drift_c=.. halted=..` as a map.
fn summary(o: &Output) -> HashMap<String, String> {
    stdout(o)
        .split_whitespace()
        .filter_map(|kv| kv.split_once('='))
        .map(|(k, v)| (k.to_string(), v.to_string()))
        .collect()
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    fs::write(&p, text).unwrap();
    p.to_str().unwrap().to_string()
}

// simulate

#[test]
fn fixed_point_configuration_does_not_move() {
    let dir = TempDir::new().unwrap();
    let cfg = dir.path().join("fp.cfg");
    let csv = dir.path().join("fp.csv");
    let o = run(&[
        "fixed-point",
        "--kappa",
        "1",
        "--angles",
        "0.3,2.0,4.4",
        "--emit",
        cfg.to_str().unwrap(),
    ]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let o = run(&[
        "simulate",
        "--config",
        cfg.to_str().unwrap(),
        "--t_end",
        "2",
        "--output",
        csv.to_str().unwrap(),
    ]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let rows = parse_trajectory(&fs::read_to_string(&csv).unwrap()).unwrap();
    assert!(rows.len() > 10);
    for row in &rows {
        for (p, q) in row.positions.iter().zip(&rows[0].positions) {
            assert!((p - q).amax() < 1e-12, "{p:?} vs {q:?}");
        }
    }
}

#[test]
fn relative_equilibrium_conserves_energy_over_ten_time_units() {
    let dir = TempDir::new().unwrap();
    let cfg = dir.path().join("re.cfg");
    let o = run(&[
        "fixed-point",
        "--kappa",
        "1",
        "--angles",
        "1.0,2.6,5.0",
        "--speed",
        "0.7",
        "--emit",
        cfg.to_str().unwrap(),
    ]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    assert_eq!(
        values(&fs::read_to_string(&cfg).unwrap())["t_end"]
            .parse::<f64>()
            .unwrap(),
        10.0
    );
    let o = run(&["simulate", "--config", cfg.to_str().unwrap()]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let s = summary(&o);
    assert_eq!(s["halted"], "none");
    assert!(s["drift_H"].parse::<f64>().unwrap() < 1e-8, "{s:?}");
}

#[test]
fn antipodal_start_halts_with_code_two() {
    let o = run(&[
        "simulate",
        "--kappa",
        "1",
        "--masses",
        "1,1",
        "--positions",
        "1,0,0,-1,0,0",
        "--dt",
        "1e-3",
        "--t_end",
        "1",
    ]);
    assert_eq!(code(&o), 2, "{}", stderr(&o));
    assert_eq!(summary(&o)["halted"], "antipodal");
}

#[test]
fn polygon_initial_data_runs_and_writes_csv() {
    let dir = TempDir::new().unwrap();
    let csv = dir.path().join("out.csv");
    let o = run(&[
        "simulate",
        "--kappa",
        "-1",
        "--masses",
        "1,1,1,1",
        "--regular",
        "4",
        "--r",
        "0.8",
        "--omega_dot",
        "1.3",
        "--dt",
        "1e-3",
        "--t_end",
        "1",
        "--stride",
        "10",
        "--output",
        csv.to_str().unwrap(),
    ]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let text = fs::read_to_string(&csv).unwrap();
    assert!(text.starts_with("t,H,cx,cy,cz,x1,y1,z1,vx1,vy1,vz1,x2,"));
    assert_eq!(parse_trajectory(&text).unwrap().len(), 101);
}

// criterion

#[test]
fn equal_mass_regular_pentagon_passes() {
    let o = run(&[
        "criterion",
        "--kappa",
        "1",
        "--masses",
        "1,1,1,1,1",
        "--regular",
        "5",
    ]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let text = stdout(&o);
    assert_eq!(text.matches("verdict=true").count(), 10);
    assert!(text.starts_with("# curved-nbody"));
}

#[test]
fn unequal_mass_regular_pentagon_fails() {
    let o = run(&[
        "criterion",
        "--kappa",
        "1",
        "--masses",
        "1,2,1,1,1",
        "--regular",
        "5",
    ]);
    assert_eq!(code(&o), 3, "{}", stderr(&o));
    assert_eq!(values(&stdout(&o))["verdict"], "false");
}

#[test]
fn scalene_triangle_on_the_hyperboloid_fails() {
    let dir = TempDir::new().unwrap();
    let report = dir.path().join("report.txt");
    let cfg = write(
        dir.path(),
        "c.cfg",
        "# scalene\nkappa = -1\nmasses = 1,1,1\nangles = 0,1.9,3.6\n",
    );
    let o = run(&[
        "criterion",
        "--config",
        &cfg,
        "--output",
        report.to_str().unwrap(),
    ]);
    assert_eq!(code(&o), 3, "{}", stderr(&o));
    assert!(stdout(&o).contains("verdict=false"));
    let text = fs::read_to_string(&report).unwrap();
    assert_eq!(text.matches("delta_spread=").count(), 9);
}

#[test]
fn criterion_report_is_deterministic() {
    let args = [
        "criterion",
        "--kappa",
        "0.5",
        "--masses",
        "2,1,1",
        "--angles",
        "0,2,4",
        "--r_grid",
        "0.3,0.7",
    ];
    let (a, b) = (run(&args), run(&args));
    assert_eq!(a.stdout, b.stdout);
    assert_eq!(stdout(&a).matches("\nr=").count(), 2);
}

// solve-masses

#[test]
fn regular_hexagon_needs_equal_masses() {
    let o = run(&[
        "solve-masses",
        "--kappa",
        "1",
        "--regular",
        "6",
        "--r",
        "0.5",
    ]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let v = values(&stdout(&o));
    let m = reals(&v["masses"]);
    assert_eq!(m.len(), 6);
    assert!(m.iter().all(|x| (x - m[0]).abs() < 1e-12 * m[0]));
    assert_eq!(v["feasible"], "true");
}

#[test]
fn irregular_quadrilateral_is_infeasible() {
    let o = run(&[
        "solve-masses",
        "--kappa",
        "1",
        "--angles",
        "0,1.1,2.9,4.0",
        "--r",
        "0.5",
    ]);
    assert_eq!(code(&o), 3, "{}", stderr(&o));
    assert_eq!(values(&stdout(&o))["feasible"], "false");
}

#[test]
fn doubling_the_target_doubles_the_masses() {
    let base = [
        "solve-masses",
        "--kappa",
        "-1",
        "--angles",
        "0,1.1,2.9,4.0",
        "--r",
        "0.6",
    ];
    let one = values(&stdout(&run(&base)));
    let mut args = base.to_vec();
    args.extend(["--delta_target", "2"]);
    let two = values(&stdout(&run(&args)));
    for (a, b) in reals(&one["masses"]).iter().zip(reals(&two["masses"])) {
        assert!((b - 2.0 * a).abs() < 1e-12 * a.abs());
    }
}

// fixed-point

#[test]
fn equilateral_triangle_has_equal_masses() {
    let angles = [
        FRAC_PI_2,
        FRAC_PI_2 + TAU / 3.0,
        FRAC_PI_2 + 2.0 * TAU / 3.0,
    ];
    let o = run(&["fixed-point", "--kappa", "1", "--angles", &list(&angles)]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let v = values(&stdout(&o));
    for m in reals(&v["masses"]) {
        assert!((m - 1.0).abs() < 1e-12, "{m}");
    }
    assert!(v["accel_residual"].parse::<f64>().unwrap() < 1e-10);
}

#[test]
fn obtuse_triangle_is_rejected() {
    let o = run(&["fixed-point", "--kappa", "1", "--angles", "0,0.8,2.0"]);
    assert_eq!(code(&o), 3, "{}", stderr(&o));
    assert!(stderr(&o).contains("not acute"));
}

#[test]
fn isosceles_position_gives_the_expected_mass_ratio() {
    let (y, x) = (0.6f64, 0.8f64);
    let theta = y.atan2(x);
    let o = run(&[
        "fixed-point",
        "--kappa",
        "1",
        "--angles",
        &list(&[theta, PI - theta, 1.5 * PI]),
    ]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let m = reals(&values(&stdout(&o))["masses"]);
    assert!((m[0] / m[2] - 1.44).abs() < 1e-12, "{m:?}");
    assert!((m[1] / m[2] - 1.44).abs() < 1e-12, "{m:?}");
}

#[test]
fn fixed_points_need_positive_curvature() {
    let o = run(&["fixed-point", "--kappa", "-1", "--angles", "0,2,4"]);
    assert_eq!(code(&o), 1);
}

// isosceles

#[test]
fn equal_masses_sit_at_half_radius() {
    let o = run(&["isosceles", "--M", "1", "--m", "1", "--kappa", "1"]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let v = values(&stdout(&o));
    assert_eq!(v["feasible"], "true");
    assert!((v["y"].parse::<f64>().unwrap() - 0.5).abs() < 1e-15);
}

#[test]
fn heavy_base_has_no_isosceles_fixed_point() {
    let o = run(&["isosceles", "--M", "4", "--m", "1", "--kappa", "1"]);
    assert_eq!(code(&o), 3, "{}", stderr(&o));
    assert_eq!(values(&stdout(&o))["feasible"], "false");
}

// configuration handling

#[test]
fn parse_errors_name_the_line_and_exit_one() {
    let dir = TempDir::new().unwrap();
    let cfg = write(dir.path(), "bad.cfg", "M = 1\n\nthis is not a pair\n");
    let o = run(&["isosceles", "--config", &cfg]);
    assert_eq!(code(&o), 1);
    assert!(stderr(&o).contains("line 3"), "{}", stderr(&o));

    let cfg = write(dir.path(), "bad2.cfg", "M = 1\nm = one\nkappa = 1\n");
    let o = run(&["isosceles", "--config", &cfg]);
    assert_eq!(code(&o), 1);
    assert!(stderr(&o).contains("line 2"), "{}", stderr(&o));
}

#[test]
fn unknown_keys_are_input_errors() {
    let o = run(&[
        "isosceles",
        "--M",
        "1",
        "--m",
        "1",
        "--kappa",
        "1",
        "--kapa",
        "2",
    ]);
    assert_eq!(code(&o), 1);
    assert!(stderr(&o).contains("kapa"));
}

#[test]
fn flags_override_the_file() {
    let dir = TempDir::new().unwrap();
    let cfg = write(dir.path(), "iso.cfg", "M = 4\nm = 1\nkappa = 1\n");
    assert_eq!(code(&run(&["isosceles", "--config", &cfg])), 3);
    assert_eq!(code(&run(&["isosceles", "--config", &cfg, "--M=1"])), 0);
}

#[test]
fn tolerance_scale_comes_from_the_environment() {
    // a perturbation of 1e-7 in one mass fails at the default tolerance but
    // passes once tolerances are scaled up
    let args = [
        "criterion",
        "--kappa",
        "1",
        "--masses",
        "1,1.0000001,1,1",
        "--regular",
        "4",
        "--r_grid",
        "0.5",
    ];
    assert_eq!(code(&run(&args)), 3);
    let o = Command::new(env!("CARGO_BIN_EXE_curved-nbody"))
        .args(args)
        .env("CURVED_NBODY_TOL_SCALE", "1e4")
        .output()
        .unwrap();
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let o = Command::new(env!("CARGO_BIN_EXE_curved-nbody"))
        .args(args)
        .env("CURVED_NBODY_TOL_SCALE", "-3")
        .output()
        .unwrap();
    assert_eq!(code(&o), 1);
}
