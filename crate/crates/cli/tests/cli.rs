use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use tempfile::TempDir;

fn run(dir: &Path, sub: &str, config: &str, extra: &[&str]) -> Output {
    let path = dir.join(format!("{sub}.json"));
    fs::write(&path, config).unwrap();
    Command::new(env!("CARGO_BIN_EXE_valdist"))
        .arg(sub)
        .arg("--config")
        .arg(&path)
        .args(extra)
        .output()
        .unwrap()
}

fn rows(out: &Output) -> Vec<Vec<String>> {
    assert!(
        out.status.success(),
        "stderr: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    let mut r = csv::Reader::from_reader(out.stdout.as_slice());
    r.records()
        .map(|rec| rec.unwrap().iter().map(str::to_owned).collect())
        .collect()
}

fn num(s: &str) -> f64 {
    s.parse().unwrap()
}

#[test]
fn density_half_order_matches_free() {
    let dir = TempDir::new().unwrap();
    let cfg = r#"{"potential": {"kind": "inverse_square", "nu": 0.5, "a": 1.0}, "lambda": [1, 9], "grid_n": 5}"#;
    let out = run(dir.path(), "density", cfg, &[]);
    let header = String::from_utf8_lossy(&out.stdout)
        .lines()
        .next()
        .unwrap()
        .to_owned();
    assert_eq!(
        header,
        "lambda,a_tilde,b_tilde,c_tilde,f_numeric,f_closed_form,rel_error"
    );
    let rows = rows(&out);
    assert_eq!(rows.len(), 5);
    for r in &rows {
        assert!(num(&r[6]) <= 1e-6, "{r:?}");
    }
}

#[test]
fn density_zero_potential_value() {
    let dir = TempDir::new().unwrap();
    let cfg = r#"{"potential": {"kind": "zero"}, "lambda": [1, 9], "grid_n": 9}"#;
    let rows = rows(&run(dir.path(), "density", cfg, &[]));
    let r = rows.iter().find(|r| num(&r[0]) == 4.0).unwrap();
    assert!((num(&r[4]) - std::f64::consts::FRAC_2_PI).abs() < 1e-8);
}

#[test]
fn density_order_zero_closed_form() {
    let dir = TempDir::new().unwrap();
    let cfg = r#"{"potential": {"kind": "inverse_square", "nu": 0, "a": 1}, "lambda": [1, 2], "grid_n": 2}"#;
    let rows = rows(&run(dir.path(), "density", cfg, &[]));
    assert!((num(&rows[0][5]) - 0.34155).abs() < 5e-5);
}

#[test]
fn density_tabulated_leaves_closed_form_blank() {
    let dir = TempDir::new().unwrap();
    let mut table = String::from("x,q\n");
    for i in 0..=120 {
        let x = 0.25 * i as f64;
        table.push_str(&format!("{x},{}\n", 2.0 * (-x).exp()));
    }
    fs::write(dir.path().join("bump.csv"), table).unwrap();
    let cfg = r#"{"potential": {"kind": "tabulated", "table": "bump.csv"}, "lambda": [4, 9], "grid_n": 2}"#;
    let rows = rows(&run(dir.path(), "density", cfg, &[]));
    assert_eq!(rows[0][5], "");
    assert!(num(&rows[0][4]) > 0.0);
}

#[test]
fn theorem2_free_limit_and_empty_target() {
    let dir = TempDir::new().unwrap();
    let cfg = r#"{"potential": {"kind": "zero"}, "lambda": [1, 4], "grid_n": 2000,
                  "x_list": [25, 50], "target": [[0, null]]}"#;
    let rows = rows(&run(dir.path(), "theorem2", cfg, &[]));
    assert_eq!(rows.len(), 2);
    for r in &rows {
        assert!((num(&r[2]) - 1.5).abs() < 1e-6);
    }
    let empty = r#"{"potential": {"kind": "zero"}, "lambda": [1, 4], "grid_n": 200, "x_list": [25], "target": []}"#;
    let rows = self::rows(&run(dir.path(), "theorem2", empty, &[]));
    assert_eq!(num(&rows[0][1]), 0.0);
}

#[test]
fn condition_a_free_case() {
    let dir = TempDir::new().unwrap();
    let cfg =
        r#"{"potential": {"kind": "zero"}, "lambda": [1, 4], "grid_n": 3, "n_list": [10, 100]}"#;
    let rows = rows(&run(dir.path(), "condition-a", cfg, &[]));
    assert_eq!(rows.len(), 6);
    for r in rows.iter().filter(|r| num(&r[1]) == 100.0) {
        assert!(num(&r[4]) <= 0.01, "{r:?}");
    }
}

#[test]
fn herglotz_rhs_nonincreasing() {
    let dir = TempDir::new().unwrap();
    let cfg = r#"{"herglotz": {"kind": "rational", "poles": [[1, 1]]}, "target": [[0, 2]],
                  "lambda": [-1, 3], "grid_n": 20000, "eps_list": [0.01, 0.1, 1]}"#;
    let rows = rows(&run(dir.path(), "herglotz", cfg, &[]));
    assert_eq!(rows.len(), 3);
    assert!(rows.windows(2).all(|w| num(&w[0][2]) <= num(&w[1][2])));
    assert!(rows.iter().all(|r| r[3] == "true"));
}

#[test]
fn distcheck_step_band() {
    let dir = TempDir::new().unwrap();
    let cfg = r#"{"potential": {"kind": "zero"}, "lambda": [1, 4], "grid_n": 4000, "x_list": [25, 200],
                  "band": {"c": 0, "d": {"breaks": [2.5], "values": [1.5707963267948966, 3.141592653589793]}}}"#;
    let rows = rows(&run(dir.path(), "distcheck", cfg, &[]));
    assert!((num(&rows[1][2]) - 2.25).abs() < 1e-9);
    assert!((num(&rows[1][1]) - 2.25).abs() < 0.05);
}

#[test]
fn bessel_dump() {
    let dir = TempDir::new().unwrap();
    let cfg = r#"{"nu_list": [0], "x_list": [1]}"#;
    let rows = rows(&run(dir.path(), "bessel", cfg, &[]));
    assert!((num(&rows[0][2]) - 0.765197686558).abs() < 1e-11);
    assert!((num(&rows[0][3]) - 0.088256964215).abs() < 1e-11);
}

#[test]
fn output_is_deterministic_across_thread_counts() {
    let dir = TempDir::new().unwrap();
    let cfg = r#"{"potential": {"kind": "inverse_square", "nu": 1, "a": 1}, "lambda": [1, 4], "grid_n": 400,
                  "x_list": [25, 50], "target": [[0, 1]]}"#;
    let a = run(dir.path(), "theorem2", cfg, &["--threads", "1"]);
    let b = run(dir.path(), "theorem2", cfg, &["--threads", "3"]);
    assert!(a.status.success() && b.status.success());
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn out_flag_writes_file() {
    let dir = TempDir::new().unwrap();
    let target = dir.path().join("table.csv");
    let cfg = r#"{"nu_list": [0.5], "x_list": [2, 3]}"#;
    let out = run(
        dir.path(),
        "bessel",
        cfg,
        &["--out", target.to_str().unwrap()],
    );
    assert!(out.status.success());
    assert!(out.stdout.is_empty());
    assert_eq!(fs::read_to_string(target).unwrap().lines().count(), 3);
}

#[test]
fn config_errors_exit_2() {
    let dir = TempDir::new().unwrap();
    for cfg in [
        r#"{"potential": {"kind": "zero"}, "lambda": [4, 1], "grid_n": 3}"#,
        r#"{"potential": {"kind": "zero"}, "lambda": [1, 4], "grid_n": 1}"#,
        r#"{"potential": {"kind": "zero"}, "lambda": [1, 4], "grid_n": 3, "bogus": 1}"#,
        r#"{"potential": {"kind": "inverse_square"}, "lambda": [1, 4], "grid_n": 3}"#,
        "not json",
    ] {
        let out = run(dir.path(), "density", cfg, &[]);
        assert_eq!(out.status.code(), Some(2), "{cfg}");
    }
    let cfg = r#"{"potential": {"kind": "zero"}, "lambda": [1, 4], "grid_n": 10, "x_list": [50, 25], "target": [[0, 1]]}"#;
    assert_eq!(run(dir.path(), "theorem2", cfg, &[]).status.code(), Some(2));
}

#[test]
fn numerical_failure_exits_3_with_lambda() {
    let dir = TempDir::new().unwrap();
    // a step budget this small cannot reach the matching points
    let cfg = r#"{"potential": {"kind": "zero"}, "lambda": [1, 4], "grid_n": 2,
                  "tolerances": {"rel_tol": 1e-10, "abs_tol": 1e-12, "max_step": 1e-7}}"#;
    let out = run(dir.path(), "density", cfg, &[]);
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stderr).contains("lambda = 1"));
}
