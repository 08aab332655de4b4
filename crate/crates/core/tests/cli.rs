use std::process::{Command, Output};

use gexpand::cli::exit_code;
use gexpand::Error;

fn gexpand(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_gexpand"))
        .args(args)
        .output()
        .unwrap()
}

fn code(args: &[&str]) -> i32 {
    gexpand(args).status.code().unwrap()
}

#[test]
fn derive_matches_golden() {
    let out = gexpand(&["derive", "--equation", "burgers"]);
    assert!(out.status.success());
    let golden = include_str!("golden/derive_burgers.json");
    assert_eq!(String::from_utf8(out.stdout).unwrap(), golden);
}

#[test]
fn derive_table_lists_systems() {
    let out = gexpand(&["derive", "--equation", "kdv", "--format", "table"]);
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(
        text.contains("w^4: 1/2*alpha*a2^2 + 6*gamma*a2 = 0"),
        "{text}"
    );
    assert!(text.contains("a2 = -12*gamma/alpha"));
}

#[test]
fn passing_verify_exits_zero() {
    assert_eq!(
        code(&["verify", "--family", "engine:burgers:0", "--seed", "7"]),
        0
    );
    assert_eq!(
        code(&[
            "verify",
            "--family",
            "U21",
            "--params",
            "alpha=2,gamma=1,lambda=5,mu=4,C=1"
        ]),
        0
    );
}

#[test]
fn failing_verify_exits_one() {
    let out = gexpand(&[
        "verify",
        "--family",
        "U11",
        "--params",
        "alpha=2,beta=1,lambda=3,mu=1,C=1",
    ]);
    assert_eq!(out.status.code(), Some(1));
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["classification"], "FAIL");
    assert!(v["max_residual"].as_f64().unwrap() > 1e-3);
}

#[test]
fn all_pole_grid_exits_one() {
    // k1 = k2 = 1 on the zero-discriminant row puts a pole at xi = -1; every point is within 1e-11 of it
    let out = gexpand(&[
        "sample",
        "--family",
        "U11",
        "--params",
        "alpha=2,beta=1,lambda=2,mu=1,C=0,k1=1,k2=1",
        "--grid",
        "x=-1.00000000001:-0.99999999999:2,t=0:0.000000000001:2",
    ]);
    assert_eq!(
        out.status.code(),
        Some(1),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(code(&["derive", "--equation", "foo"]), 2);
    assert_eq!(
        code(&[
            "verify",
            "--family",
            "U11",
            "--params",
            "alpha=2,lambda=3,mu=1,C=1"
        ]),
        2
    );
    assert_eq!(
        code(&[
            "verify",
            "--family",
            "U11",
            "--params",
            "alpha=0,beta=1,lambda=3,mu=1,C=1"
        ]),
        2
    );
    assert_eq!(code(&["verify", "--family", "U99"]), 2);
    assert_eq!(
        code(&["verify", "--family", "U11", "--params", "alpha=2,alpha=3"]),
        2
    );
    assert_eq!(code(&["sample", "--family", "U11"]), 2);

    let out = gexpand(&[
        "verify",
        "--family",
        "U11",
        "--params",
        "alpha=0,beta=1,lambda=3,mu=1,C=1",
    ]);
    assert!(String::from_utf8_lossy(&out.stderr).contains("assumption alpha != 0 violated"));
}

#[test]
fn solver_errors_map_to_three() {
    assert_eq!(exit_code(&Error::SolverIncomplete("x".into())), 3);
    assert_eq!(exit_code(&Error::NoBalance("x".into())), 3);
    assert_eq!(exit_code(&Error::UnsupportedForm("x".into())), 3);
    assert_eq!(exit_code(&Error::EmptyGrid), 1);
    assert_eq!(exit_code(&Error::UnknownSymbol("x".into())), 2);
}

#[test]
fn sample_writes_csv_and_script() {
    let dir = std::env::temp_dir().join(format!("gexpand-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let csv = dir.join("u.csv");
    let status = gexpand(&[
        "sample",
        "--family",
        "U24",
        "--params",
        "alpha=1/2,gamma=1,lambda=2,mu=1/2,C=0.1,k1=1,k2=0.3",
        "--grid",
        "x=-1:1:3,t=0:1:2",
        "--out",
        csv.to_str().unwrap(),
    ])
    .status;
    assert!(status.success());
    let text = std::fs::read_to_string(&csv).unwrap();
    assert!(text.starts_with("x,t,u\n"));
    assert_eq!(text.lines().filter(|l| !l.is_empty()).count(), 1 + 6);
    let gp = std::fs::read_to_string(dir.join("u.gp")).unwrap();
    assert!(gp.contains("splot 'u.csv'"), "{gp}");
    std::fs::remove_dir_all(&dir).unwrap();
}
