use std::fs;
use std::process::Command;

use std::f64::consts::PI;

struct Run {
    code: i32,
    stdout: String,
    stderr: String,
}

fn choquet(args: &[&str]) -> Run {
    let out = Command::new(env!("CARGO_BIN_EXE_choquet"))
        .args(args)
        .output()
        .expect("binary runs");
    Run {
        code: out.status.code().expect("exit code"),
        stdout: String::from_utf8(out.stdout).unwrap(),
        stderr: String::from_utf8(out.stderr).unwrap(),
    }
}

/// Header and rows keyed by column name.
fn rows(csv: &str) -> (Vec<String>, Vec<Vec<String>>) {
    let mut lines = csv.lines();
    let header = lines
        .next()
        .expect("header")
        .split(',')
        .map(String::from)
        .collect();
    let body = lines
        .map(|l| l.split(',').map(String::from).collect())
        .collect();
    (header, body)
}

fn column(csv: &str, name: &str) -> Vec<f64> {
    let (header, body) = rows(csv);
    let i = header.iter().position(|h| h == name).expect(name);
    body.iter().map(|r| r[i].parse().unwrap()).collect()
}

fn config(json: &str) -> tempfile::NamedTempFile {
    let f = tempfile::NamedTempFile::new().unwrap();
    fs::write(f.path(), json).unwrap();
    f
}

#[test]
fn integrate_discrete_fixture() {
    let cfg = config(
        r#"{"capacity":{"kind":"discrete","rule":"distorted","gamma":"sqrt","size":3},
            "values":[1,3,2]}"#,
    );
    let r = choquet(&["integrate", "--config", cfg.path().to_str().unwrap()]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    let expected = 1.0 + (2.0f64 / 3.0).sqrt() + (1.0f64 / 3.0).sqrt();
    let sorted = column(&r.stdout, "sorted")[0];
    assert!((sorted - expected).abs() < 1e-12);
    assert!((sorted - 2.39385).abs() < 1e-5);
    assert!(column(&r.stdout, "difference")[0].abs() < 1e-9);
}

#[test]
fn integrate_kernel_normalizers() {
    let r = choquet(&[
        "integrate",
        "--capacity",
        "sqrt",
        "--function",
        "e0",
        "--n",
        "2",
        "--xgrid",
        "0:1:2",
    ]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    for v in column(&r.stdout, "level_set_closed") {
        assert!((v - (PI / 4.0).sqrt()).abs() < 1e-6);
        assert!((v - 0.886227).abs() < 1e-6);
    }
    assert!(column(&r.stdout, "difference")
        .iter()
        .all(|d| d.abs() < 1e-9));
    let r = choquet(&[
        "integrate",
        "--capacity",
        "possibility",
        "--function",
        "e0",
        "--n",
        "1,4,16",
        "--xgrid",
        "-2:2:3",
    ]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    assert!(column(&r.stdout, "level_set_closed")
        .iter()
        .all(|v| (v - 1.0).abs() < 1e-12));
    assert!(column(&r.stdout, "level_set_generic")
        .iter()
        .all(|v| (v - 1.0).abs() < 1e-9));
}

#[test]
fn operator_rows() {
    // exactness on exponentials
    let r = choquet(&[
        "operator",
        "--operator",
        "picard_choquet",
        "--function",
        "exp_neg",
        "--n",
        "2,4,8,32",
        "--xgrid",
        "-1:2:4",
    ]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    let (header, body) = rows(&r.stdout);
    assert_eq!(
        header,
        [
            "operator",
            "capacity",
            "function",
            "n",
            "x",
            "value",
            "f",
            "abs_error",
            "bound"
        ]
    );
    assert_eq!(body.len(), 16);
    assert!(column(&r.stdout, "abs_error").iter().all(|e| *e <= 1e-6));

    // θ = 0 collapses onto the classical polynomial
    let args = [
        "--function",
        "concave_quad",
        "--n",
        "4,9",
        "--xgrid",
        "0:1:7",
    ];
    let zero = choquet(
        &[
            &[
                "operator",
                "--operator",
                "bernstein_choquet",
                "--theta",
                "0",
            ],
            &args[..],
        ]
        .concat(),
    );
    let plain = choquet(&[&["operator", "--operator", "bernstein"], &args[..]].concat());
    assert_eq!(zero.code, 0, "{}", zero.stderr);
    let (a, b) = (
        column(&zero.stdout, "value"),
        column(&plain.stdout, "value"),
    );
    assert!(a.iter().zip(&b).all(|(u, v)| (u - v).abs() < 1e-14));

    // bound column dominates the error
    let r = choquet(&[
        "operator",
        "--operator",
        "bernstein_choquet",
        "--function",
        "sqrt",
        "--xgrid",
        "0:1:21",
    ]);
    let err = column(&r.stdout, "abs_error");
    let bound = column(&r.stdout, "bound");
    assert!(err.iter().zip(&bound).all(|(e, b)| *e <= b + 1e-6));
}

#[test]
fn compare_picard_pair() {
    let r = choquet(&[
        "compare",
        "--operator",
        "picard",
        "--function",
        "exp_neg",
        "--n",
        "2,3,8",
        "--xgrid",
        "0:1:2",
    ]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    let (header, body) = rows(&r.stdout);
    assert_eq!(
        header,
        [
            "n",
            "x",
            "f",
            "classical",
            "choquet",
            "err_classical",
            "err_choquet",
            "bound"
        ]
    );
    for (row, classical) in body.iter().zip(column(&r.stdout, "classical")) {
        let n: f64 = row[0].parse().unwrap();
        let x: f64 = row[1].parse().unwrap();
        let oracle = (-x).exp() * n * n / (n * n - 1.0);
        assert!((classical - oracle).abs() < 1e-12 * oracle, "{row:?}");
    }
    assert!(column(&r.stdout, "err_choquet").iter().all(|e| *e < 1e-12));
}

#[test]
fn compare_bernstein_improvement() {
    let r = choquet(&[
        "compare",
        "--operator",
        "bernstein_choquet",
        "--function",
        "concave_quad",
        "--n",
        "4,8",
        "--xgrid",
        "0.1:0.5:5",
    ]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    let classical = column(&r.stdout, "err_classical");
    let choquet = column(&r.stdout, "err_choquet");
    assert!(classical.iter().zip(&choquet).all(|(c, l)| l < c));
}

#[test]
fn verify_suites() {
    let r = choquet(&["verify"]);
    assert_eq!(r.code, 0, "{}\n{}", r.stdout, r.stderr);
    let (_, body) = rows(&r.stdout);
    let suites: Vec<&str> = body.iter().map(|r| r[0].as_str()).collect();
    for s in ["capacity", "integral", "chebyshev", "bounds"] {
        assert!(suites.contains(&s), "{s} missing");
    }
    for s in ["capacity", "integral", "chebyshev", "bounds"] {
        let r = choquet(&["verify", s, "--trials", "20", "--seed", "7"]);
        assert_eq!(r.code, 0, "{s}: {}", r.stdout);
    }
}

#[test]
fn verify_empty_and_injected() {
    let r = choquet(&["verify", "--trials", "0"]);
    assert_eq!(r.code, 0);
    assert_eq!(
        r.stdout,
        "suite,check,evaluated,violations,worst_gap,witness\n"
    );

    let bad = r#"{"kind":"discrete","rule":"table","size":2,"table":[0,0.6,0.4,0.5]}"#;
    let r = choquet(&["verify", "capacity", "--capacity", bad]);
    assert_eq!(r.code, 1);
    assert!(
        r.stdout.contains("monotone fails at A={0} B={0 1}"),
        "{}",
        r.stdout
    );
}

#[test]
fn config_errors_exit_2() {
    let cases: Vec<Vec<&str>> = vec![
        vec!["operator", "--n", ""],
        vec!["operator", "--n", "0,4"],
        vec!["operator", "--xgrid", "0:1:1"],
        vec!["operator", "--xgrid", "0:2:3"],
        vec!["operator", "--operator", "nope"],
        vec!["operator", "--function", "nope"],
        vec!["operator", "--i0", "7", "--n", "4"],
        vec!["operator", "--theta", "2"],
        vec![
            "operator",
            "--operator",
            "picard_choquet",
            "--function",
            "e1",
        ],
        vec!["compare", "--operator", "weierstrass_choquet"],
        vec![
            "integrate",
            "--capacity",
            "{\"kind\":\"discrete\",\"rule\":\"additive\",\"weights\":[1]}",
        ],
        vec!["integrate", "--capacity", "bogus"],
        vec!["operator", "--config", "/nonexistent/config.json"],
    ];
    for args in cases {
        let r = choquet(&args);
        assert_eq!(r.code, 2, "{args:?}: {}", r.stderr);
        assert!(
            r.stdout.is_empty(),
            "{args:?} produced output before failing"
        );
    }
    let cfg = config(r#"{"n_list":[], "x_grid":{"min":0,"max":1,"count":3}}"#);
    let r = choquet(&["operator", "--config", cfg.path().to_str().unwrap()]);
    assert_eq!(r.code, 2);
    let cfg = config(r#"{"unknown_field":1}"#);
    let r = choquet(&["operator", "--config", cfg.path().to_str().unwrap()]);
    assert_eq!(r.code, 2);
}

#[test]
fn divergence_exits_3() {
    let f = r#"{"name":"exp_neg","lambda":3}"#;
    let r = choquet(&[
        "operator",
        "--operator",
        "picard_choquet",
        "--function",
        f,
        "--n",
        "2",
        "--xgrid",
        "0:1:2",
    ]);
    assert_eq!(r.code, 3, "{}", r.stderr);
    let r = choquet(&[
        "compare",
        "--operator",
        "picard",
        "--function",
        f,
        "--n",
        "3",
        "--xgrid",
        "0:1:2",
    ]);
    assert_eq!(r.code, 3, "{}", r.stderr);
}

#[test]
fn output_is_deterministic_lf_csv() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.csv");
    let b = dir.path().join("b.csv");
    for p in [&a, &b] {
        let r = choquet(&[
            "operator",
            "--operator",
            "weierstrass_choquet",
            "--function",
            "sqrt",
            "--n",
            "2,5",
            "--xgrid",
            "-1:1:9",
            "--out",
            p.to_str().unwrap(),
        ]);
        assert_eq!(r.code, 0, "{}", r.stderr);
        assert!(r.stdout.is_empty());
    }
    let (a, b) = (fs::read(&a).unwrap(), fs::read(&b).unwrap());
    assert_eq!(a, b);
    let text = String::from_utf8(a).unwrap();
    assert!(!text.contains('\r'));
    for v in rows(&text).1.iter().flat_map(|r| r[5..].to_vec()) {
        let digits = v
            .split('e')
            .next()
            .unwrap()
            .chars()
            .filter(char::is_ascii_digit)
            .collect::<String>();
        assert!(digits.trim_start_matches('0').len() <= 15, "{v}");
    }
    let s1 = choquet(&["verify", "integral", "--seed", "3", "--trials", "15"]);
    let s2 = choquet(&["verify", "integral", "--seed", "3", "--trials", "15"]);
    assert_eq!(s1.stdout, s2.stdout);
}

#[test]
fn flags_override_config() {
    let cfg = config(
        r#"{"operator":"bernstein","function":"e1","n_list":[3],"x_grid":{"min":0,"max":1,"count":2}}"#,
    );
    let path = cfg.path().to_str().unwrap();
    let r = choquet(&["operator", "--config", path]);
    assert_eq!(rows(&r.stdout).1[0][0], "bernstein");
    let r = choquet(&[
        "operator",
        "--config",
        path,
        "--operator",
        "bernstein_choquet",
        "--n",
        "5",
    ]);
    let (_, body) = rows(&r.stdout);
    assert_eq!(body[0][0], "bernstein_choquet");
    assert_eq!(body[0][3], "5");
    assert_eq!(body.len(), 2);
}
