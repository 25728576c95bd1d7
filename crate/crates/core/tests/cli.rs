//! End-to-end tests of the `chanfid` binary: exit codes, output
//! formats, and byte stability of the emitted files.

use std::process::{Command, Output};

fn chanfid(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_chanfid"))
        .args(args)
        .env_remove("CFL_SEED")
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

#[test]
fn fidelity_point_query() {
    let out = chanfid(&["fidelity", "--p", "0.5", "--alpha2", "0.5"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert!(text.contains("\"F\":0.728553390593"), "got: {text}");
    assert!(text.contains("\"C_in\":1.00000000000"));
    assert!(text.contains("\"N_out\":0.500000000000"));
    assert!(text.contains("\"f_tele\":"));
}

#[test]
fn fidelity_noise_free_is_one() {
    let out = chanfid(&["fidelity", "--p", "0", "--alpha2", "0.5"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout(&out).contains("\"F\":1.00000000000"));
}

#[test]
fn fidelity_validation_failure_names_flag() {
    let out = chanfid(&["fidelity", "--p", "1.5", "--alpha2", "0.5"]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr).into_owned();
    assert!(err.contains('p'), "stderr should name the flag: {err}");

    let out = chanfid(&["fidelity", "--p", "0.5", "--alpha2", "0.2"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("alpha2"));
}

#[test]
fn fstar_analytic_branch2_point() {
    let out = chanfid(&["fstar", "--p", "0.8", "--alpha2", "0.55"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert!(text.contains("\"value\":0.568750000000"), "got: {text}");
    assert!(text.contains("\"branch\":\"branch2\""));
    assert!(text.contains("\"enhanced\":true"));
}

#[test]
fn fstar_analytic_branch1_point() {
    let out = chanfid(&["fstar", "--p", "0.5", "--alpha2", "0.9"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert!(text.contains("\"branch\":\"branch1\""));
    assert!(text.contains("\"enhanced\":false"));
}

#[test]
fn fstar_bell_input_branch2_value() {
    let out = chanfid(&["fstar", "--p", "0.8", "--alpha2", "0.5"]);
    assert!(stdout(&out).contains("\"value\":0.562500000000"));
}

#[test]
fn fstar_both_methods_agree() {
    let out = chanfid(&[
        "fstar",
        "--p",
        "0.8",
        "--alpha2",
        "0.55",
        "--method",
        "both",
        "--restarts",
        "16",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert!(text.contains("\"value_analytic\":0.568750000000"));
    assert!(text.contains("\"value_sdp\":"));
    assert!(text.contains("\"discrepancy\":"));
    assert!(text.contains("\"converged\":true"));
}

#[test]
fn fstar_analytic_rejects_non_amp_channel() {
    let out = chanfid(&[
        "fstar",
        "--p",
        "0.5",
        "--alpha2",
        "0.6",
        "--channel",
        "phase",
    ]);
    assert_eq!(out.status.code(), Some(2));
    // the SDP route accepts any channel family
    let out = chanfid(&[
        "fstar",
        "--p",
        "0.5",
        "--alpha2",
        "0.6",
        "--channel",
        "phase",
        "--method",
        "sdp",
        "--restarts",
        "8",
    ]);
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout(&out).contains("\"branch\":\"numeric_only\""));
}

#[test]
fn fstar_seed_env_and_flag_precedence() {
    let with_env = Command::new(env!("CARGO_BIN_EXE_chanfid"))
        .args([
            "fstar",
            "--p",
            "0.7",
            "--alpha2",
            "0.6",
            "--method",
            "sdp",
            "--restarts",
            "4",
        ])
        .env("CFL_SEED", "99")
        .output()
        .unwrap();
    assert!(stdout(&with_env).contains("\"seed\":99"));

    let flag_wins = Command::new(env!("CARGO_BIN_EXE_chanfid"))
        .args([
            "fstar",
            "--p",
            "0.7",
            "--alpha2",
            "0.6",
            "--method",
            "sdp",
            "--restarts",
            "4",
            "--seed",
            "3",
        ])
        .env("CFL_SEED", "99")
        .output()
        .unwrap();
    assert!(stdout(&flag_wins).contains("\"seed\":3"));
}

#[test]
fn sweep_csv_is_byte_stable_with_fixed_header() {
    let dir = tempfile::tempdir().unwrap();
    let path1 = dir.path().join("sweep1.csv");
    let path2 = dir.path().join("sweep2.csv");
    for path in [&path1, &path2] {
        let out = chanfid(&[
            "sweep",
            "--grid",
            "6",
            "--seed",
            "7",
            "--out",
            path.to_str().unwrap(),
        ]);
        assert_eq!(out.status.code(), Some(0));
    }
    let bytes1 = std::fs::read(&path1).unwrap();
    let bytes2 = std::fs::read(&path2).unwrap();
    assert_eq!(
        bytes1, bytes2,
        "identical flags and seed must give identical bytes"
    );

    let text = String::from_utf8(bytes1).unwrap();
    let mut lines = text.lines();
    let meta = lines.next().unwrap();
    assert!(meta.starts_with("# {\"command\":\"sweep\""));
    assert_eq!(
        lines.next().unwrap(),
        "p,alpha2,F,Fstar,branch,C_in,C_out,N_out,enhanced,f_tele"
    );
    assert_eq!(text.lines().count(), 2 + 36);
    assert!(!text.contains('\r'));
}

#[test]
fn sweep_json_lines() {
    let out = chanfid(&["sweep", "--grid", "4", "--format", "json"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert_eq!(text.lines().count(), 16);
    for line in text.lines() {
        assert!(line.starts_with("{\"p\":") && line.ends_with('}'));
        assert!(line.contains("\"branch\":\""));
    }
}

#[test]
fn figure1_csv_and_svg() {
    let out = chanfid(&["figure1", "--n", "50"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert!(text.lines().nth(1) == Some("p,C_chi0"));
    assert_eq!(text.lines().count(), 2 + 50);

    let dir = tempfile::tempdir().unwrap();
    let svg_path = dir.path().join("fig1.svg");
    let out = chanfid(&[
        "figure1",
        "--n",
        "200",
        "--format",
        "svg",
        "--out",
        svg_path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    let svg = std::fs::read_to_string(&svg_path).unwrap();
    assert!(svg.starts_with("<svg"));
    assert!(svg.contains("viewBox=\"0 0 800 600\""));

    // polyline y-pixels increase (C decreases) monotonically
    let points = svg
        .split("points=\"")
        .nth(1)
        .unwrap()
        .split('"')
        .next()
        .unwrap();
    let ys: Vec<f64> = points
        .split_whitespace()
        .map(|pair| pair.split(',').nth(1).unwrap().parse().unwrap())
        .collect();
    assert_eq!(ys.len(), 200);
    for w in ys.windows(2) {
        assert!(w[1] >= w[0]);
    }
}

#[test]
fn channel_opt_single_row() {
    let out = chanfid(&["channel-opt", "--p", "0.5"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert!(text.lines().nth(1) == Some("p,F_channel,argmax_alpha2,chi0_alpha2,match"));
    let row = text.lines().nth(2).unwrap();
    let fields: Vec<&str> = row.split(',').collect();
    assert_eq!(fields[1], "0.750000000000");
    assert!(fields[2].starts_with("0.66666666"));
    assert_eq!(fields[4], "true");
}

#[test]
fn verify_small_grid_passes() {
    let out = chanfid(&["verify", "--grid", "50", "--seed", "7", "--restarts", "16"]);
    assert_eq!(
        out.status.code(),
        Some(0),
        "stderr: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    let text = stdout(&out);
    assert_eq!(text.matches(" PASS").count(), 7, "got: {text}");
    assert_eq!(text.matches(" FAIL").count(), 0);
    for name in [
        "P1",
        "P2",
        "P3",
        "ordering_remark",
        "choi_eigvec",
        "entanglement_breaking",
        "classical_threshold",
    ] {
        assert!(text.contains(name), "missing {name} in: {text}");
    }
}

#[test]
fn unknown_flag_is_usage_error() {
    let out = chanfid(&["sweep", "--bogus", "1"]);
    assert_eq!(out.status.code(), Some(2));
}
