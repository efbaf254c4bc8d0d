//! Contract tests for the qpv binary: exit codes, determinism, and the
//! format of the machine-readable outputs.

use std::process::{Command, Output};

fn qpv(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qpv"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

#[test]
fn compat_passes_and_is_deterministic() {
    let a = qpv(&["compat", "--trials", "2", "--seed", "1"]);
    assert_eq!(a.status.code(), Some(0));
    let b = qpv(&["compat", "--trials", "2", "--seed", "1"]);
    assert_eq!(stdout(&a), stdout(&b), "byte-identical for fixed seed");
    assert!(stdout(&a).contains("all tags PASS"));
}

#[test]
fn compat_rejects_zero_trials() {
    let o = qpv(&["compat", "--trials", "0"]);
    assert_eq!(o.status.code(), Some(2), "usage error must exit 2");
}

#[test]
fn compat_corrupt_fails_with_exit_1() {
    let o = qpv(&["compat", "--trials", "1", "--seed", "1", "--corrupt"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn orbit_zero_steps_prints_header_and_initial_row() {
    let o = qpv(&["orbit", "--n-max", "0"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    let lines: Vec<&str> = text.trim().lines().collect();
    assert_eq!(lines.len(), 2);
    assert!(lines[0].starts_with("n,y,z,w,a1,a2"));
    assert!(lines[1].starts_with("0,"));
}

#[test]
fn orbit_trivial_word_fixes_y_z() {
    let o = qpv(&["orbit", "--n-max", "1", "--word", "T0 T1 T2 T3 T4"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    let rows: Vec<Vec<&str>> = text.trim().lines().skip(1).map(|l| l.split(',').collect()).collect();
    assert_eq!(rows.len(), 2);
    assert_eq!(rows[0][1], rows[1][1], "y unchanged");
    assert_eq!(rows[0][2], rows[1][2], "z unchanged");
}

#[test]
fn orbit_malformed_json_exits_2() {
    let dir = std::env::temp_dir().join("qpv_cli_test_bad.json");
    std::fs::write(&dir, "{ not json").unwrap();
    let o = qpv(&["orbit", "--params", dir.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn special_residual_columns_are_small() {
    let o = qpv(&["special", "--n-max", "3", "--digits", "40"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    for line in text.trim().lines().skip(1) {
        let cols: Vec<&str> = line.split(',').collect();
        assert_eq!(cols.len(), 13);
        for c in &cols[9..13] {
            let v: f64 = c.parse().unwrap();
            assert!(v.abs() < 1e-20, "residual column {c} too large");
        }
    }
}

#[test]
fn special_doubling_digits_shrinks_residuals() {
    let worst = |digits: &str| -> f64 {
        let o = qpv(&["special", "--n-max", "2", "--digits", digits]);
        assert_eq!(o.status.code(), Some(0));
        stdout(&o)
            .trim()
            .lines()
            .skip(1)
            .flat_map(|l| l.split(',').skip(9).map(|c| c.parse::<f64>().unwrap().abs()).collect::<Vec<_>>())
            .fold(0.0f64, f64::max)
    };
    let w40 = worst("40");
    let w80 = worst("80");
    // either both at the f64-underflow floor, or at least 10 orders gained
    assert!(w80 <= w40 * 1e-10 || w80 < 1e-300, "w40 = {w40}, w80 = {w80}");
}

#[test]
fn eval_values() {
    // (1/2; 1/2)_2 = 3/8
    let o = qpv(&["eval", "qpoch", "--a", "1/2", "--q", "1/2", "--k", "2", "--digits", "20"]);
    let v: f64 = stdout(&o).trim().parse().unwrap();
    assert!((v - 0.375).abs() < 1e-15);
    // int_0^1 t d_q t = 1/(1+q) at q = 1/4
    let o = qpv(&["eval", "jackson-monomial", "--k", "1", "--a", "0", "--b", "1", "--q", "1/4"]);
    let v: f64 = stdout(&o).trim().parse().unwrap();
    assert!((v - 0.8).abs() < 1e-15);
    // theta_q(-1) = 0
    let o = qpv(&["eval", "theta", "--x", "-1", "--q", "1/3", "--digits", "30"]);
    let v: f64 = stdout(&o).trim().parse().unwrap();
    assert!(v.abs() < 1e-25);
}

#[test]
fn lattice_suite_passes() {
    let o = qpv(&["lattice", "--trials", "2", "--seed", "5"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("lattice suite PASS"));
}

#[test]
fn freud_suite_passes() {
    let o = qpv(&["freud", "--n-max", "3", "--digits", "40"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("suite PASS"));
}
