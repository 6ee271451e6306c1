//! The `bsnet` binary: exit codes, outputs and files.

use std::process::{Command, Output};

fn bsnet(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_bsnet"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn basis_lists_states() {
    let o = bsnet(&["basis", "-m", "3", "-n", "2"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o).lines().count(), 7);
}

#[test]
fn evolve_reports_probabilities() {
    let o = bsnet(&[
        "evolve",
        "-m",
        "3",
        "-n",
        "2",
        "--theta",
        "0",
        "--targets",
        "psi+,noon+",
    ]);
    assert_eq!(o.status.code(), Some(0));
    let s = stdout(&o);
    assert!(s.contains("probability psi+ 0.333333333333"), "{s}");
    assert!(s.contains("probability noon+(2) 0.000000000000"), "{s}");
}

#[test]
fn sweep_writes_csv_and_json() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("s.csv");
    let o = bsnet(&[
        "sweep",
        "-m",
        "3",
        "-n",
        "2",
        "--grid",
        "0:3.14159:11",
        "--targets",
        "psi+,phi-",
        "--out",
        csv.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0));
    let text = std::fs::read_to_string(&csv).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("theta,p_psi_plus,p_phi_minus"));
    assert_eq!(lines.count(), 11);
    assert!(stdout(&o).contains("psi+"));

    let o = bsnet(&["sweep", "-m", "2", "-n", "1", "--grid", "0:1:5", "--format", "json"]);
    assert_eq!(o.status.code(), Some(0));
    let doc: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(doc["grid"].as_array().unwrap().len(), 5);
}

#[test]
fn sweep_accepts_custom_network() {
    let dir = tempfile::tempdir().unwrap();
    let net = dir.path().join("net.json");
    std::fs::write(
        &net,
        r#"{"modes":3,"splitters":[{"a":2,"b":3,"theta":0},{"a":1,"b":2,"theta":0}]}"#,
    )
    .unwrap();
    let o = bsnet(&[
        "sweep",
        "-m",
        "3",
        "-n",
        "2",
        "--grid",
        "0:1:3",
        "--network",
        net.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0));
    let o = bsnet(&[
        "sweep",
        "-m",
        "4",
        "-n",
        "2",
        "--grid",
        "0:1:3",
        "--network",
        net.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn invalid_input_exits_one() {
    for args in [
        &["basis", "-m", "0", "-n", "0"][..],
        &["evolve", "-m", "3", "-n", "2", "--grid", "0:1:3"],
        &["sweep", "-m", "3", "-n", "2", "--keep", "2,2"],
        &["sweep", "-m", "3", "-n", "2", "--grid", "1:0:3"],
        &["sweep", "-m", "3", "-n", "2", "--targets", "bogus"],
        &[
            "sweep",
            "-m",
            "3",
            "-n",
            "2",
            "--grid",
            "0:1:3",
            "--out",
            "/nonexistent/dir/x.csv",
        ],
        &["evolve", "-m", "3", "-n", "2", "--theta", "nan"],
        &["frobnicate"],
    ] {
        let o = bsnet(args);
        assert_eq!(o.status.code(), Some(1), "{args:?}");
        assert!(!o.stderr.is_empty(), "{args:?}");
    }
}

#[test]
fn verify_passes() {
    let o = bsnet(&["verify", "-m", "4", "-n", "2", "--seed", "7"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    assert!(stdout(&o).contains("all checks passed"));
}
