//! End-to-end checks of the binary: exit codes, JSON round-tripping, and
//! the preset-directory override.

use std::process::{Command, Output};

fn qhlag(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qhlag"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

#[test]
fn cubic_reports_the_m2_certificate() {
    let out = qhlag(&[
        "cubic",
        "--ring",
        "preset:M2",
        "--lagrangian",
        "E1-E2",
        "--chi",
        "2",
    ]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.contains("sigma      0"), "{text}");
    assert!(text.contains("tau        5/4"), "{text}");
    assert!(text.contains("delta      5"), "{text}");
}

#[test]
fn pair_reports_the_vanishing_product() {
    let out = qhlag(&[
        "pair",
        "--ring",
        "preset:M3",
        "--l1",
        "H-E1-E2-E3",
        "--l2",
        "E2-E3",
    ]);
    assert!(out.status.success());
    assert!(stdout(&out).contains("[L1]*[L2] = 0"));
}

#[test]
fn table1_matches_and_exits_zero() {
    let out = qhlag(&["table1"]);
    assert!(out.status.success());
    assert!(stdout(&out).contains("11/11 rows match"));
}

#[test]
fn json_output_round_trips_byte_identical() {
    for args in [
        vec![
            "cubic",
            "--ring",
            "preset:M2",
            "--lagrangian",
            "E1-E2",
            "--chi",
            "2",
            "--json",
        ],
        vec!["table1", "--json"],
        vec![
            "lambda",
            "--ring",
            "preset:M4",
            "--class",
            "E1-E2",
            "--json",
        ],
        vec![
            "specseq",
            "--betti",
            "1,0,1",
            "--maslov",
            "2",
            "--classify",
            "--json",
        ],
    ] {
        let out = qhlag(&args);
        assert!(out.status.success(), "{args:?}");
        let text = stdout(&out);
        let value: serde_json::Value = serde_json::from_str(text.trim()).unwrap();
        assert_eq!(
            serde_json::to_string(&value).unwrap(),
            text.trim(),
            "{args:?}"
        );
    }
}

#[test]
fn usage_errors_exit_two() {
    // Unknown flag.
    let out = qhlag(&["cubic", "--nope"]);
    assert_eq!(out.status.code(), Some(2));
    // Unknown basis name with a column in the message.
    let out = qhlag(&["mul", "--ring", "preset:M2", "--a", "E1+XX", "--b", "E2"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("column 6"));
    // Unknown preset.
    let out = qhlag(&["verify", "--ring", "preset:M9"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn verify_failure_exits_one() {
    // Write a structurally valid but non-associative table and verify it.
    let dir = tempfile::tempdir().unwrap();
    let out = qhlag(&["specialize", "--ring", "preset:M2T", "--json"]);
    assert!(out.status.success());
    let mut doc: serde_json::Value = serde_json::from_str(stdout(&out).trim()).unwrap();
    doc["name"] = serde_json::json!("tampered");
    for entry in doc["table"].as_array_mut().unwrap() {
        if entry["left"] == "E1" && entry["right"] == "E2" {
            let c = entry["result"][0]["coeff"].as_str().unwrap_or("1");
            let bumped: i64 = c.parse::<i64>().unwrap_or(1) + 1;
            entry["result"][0]["coeff"] = serde_json::json!(bumped);
        }
    }
    let path = dir.path().join("tampered.json");
    std::fs::write(&path, serde_json::to_string_pretty(&doc).unwrap()).unwrap();
    let out = qhlag(&["verify", "--ring", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stdout(&out).contains("FAIL"));
}

#[test]
fn preset_dir_overrides_lookup() {
    let dir = tempfile::tempdir().unwrap();
    // Export M3 as a custom preset named CUSTOM.
    let out = qhlag(&["specialize", "--ring", "preset:M2T", "--json"]);
    let mut doc: serde_json::Value = serde_json::from_str(stdout(&out).trim()).unwrap();
    doc["name"] = serde_json::json!("CUSTOM");
    std::fs::write(
        dir.path().join("CUSTOM.json"),
        serde_json::to_string_pretty(&doc).unwrap(),
    )
    .unwrap();
    let out = Command::new(env!("CARGO_BIN_EXE_qhlag"))
        .args(["verify", "--ring", "preset:CUSTOM"])
        .env("QHLAG_PRESET_DIR", dir.path())
        .output()
        .unwrap();
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    assert!(stdout(&out).contains("CUSTOM"));
}

#[test]
fn refined_check_passes_for_stored_rows() {
    let out = qhlag(&["refined", "check", "--manifold", "M3", "--class", "E1-E2"]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.contains("homogeneous=true"));
    assert!(text.contains("specializes=true"));
}

#[test]
fn gamma_matches_quadric_sign_law() {
    for (n, gamma) in [("2", "4"), ("4", "-4"), ("6", "4")] {
        let out = qhlag(&["quadric", "--n", n]);
        assert!(out.status.success());
        assert!(
            stdout(&out).contains(&format!("gamma      {gamma}")),
            "n={n}: {}",
            stdout(&out)
        );
    }
}

#[test]
fn negative_numeric_flags_parse() {
    let out = qhlag(&[
        "quadalg",
        "--sigma",
        "3",
        "--tau",
        "-1",
        "--isomorphic",
        "-3,-1",
    ]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    assert!(stdout(&out).contains("isomorphic true"));
}
