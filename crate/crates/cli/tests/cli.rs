//! End-to-end checks of the `cfp` binary: documented output values, kernel
//! spec files, numeric modes and exit codes.

use std::path::PathBuf;
use std::process::{Command, Output};

fn cfp(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_cfp"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn tmp(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join("cfp_cli_tests");
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

fn data_rows(path: &PathBuf) -> Vec<Vec<String>> {
    let body = std::fs::read_to_string(path).unwrap();
    body.lines()
        .filter(|l| !l.starts_with('#'))
        .skip(1)
        .map(|l| l.split(',').map(str::to_string).collect())
        .collect()
}

#[test]
fn exact_pi_matches_documented_values() {
    let out = tmp("pi.csv");
    let result = cfp(&[
        "exact", "--kernel", "constant", "--a", "1", "--n", "3", "--out",
        out.to_str().unwrap(),
    ]);
    assert!(result.status.success());
    let rows = data_rows(&out);
    assert_eq!(rows.len(), 3);
    let expected = [3.0 / 11.0, 6.0 / 11.0, 2.0 / 11.0];
    for (row, want) in rows.iter().zip(expected) {
        let got: f64 = row[1].parse().unwrap();
        assert!((got - want).abs() < 1e-12, "{row:?}");
    }
}

#[test]
fn exact_rational_mode_emits_fractions() {
    let out = tmp("pi_rational.csv");
    let result = cfp(&[
        "exact", "--kernel", "constant", "--a", "1", "--n", "3", "--numeric", "rational",
        "--out", out.to_str().unwrap(),
    ]);
    assert!(result.status.success());
    let rows = data_rows(&out);
    assert_eq!(rows[0][1], "3/11");
    assert_eq!(rows[1][1], "6/11");
    assert_eq!(rows[2][1], "2/11");
}

#[test]
fn kernel_spec_file_roundtrip() {
    let spec = tmp("kernel.json");
    std::fs::write(&spec, r#"{"family":"bounded","a":0.5,"M":4}"#).unwrap();
    let out = tmp("spec_pi.csv");
    let result = cfp(&[
        "exact", "--kernel", spec.to_str().unwrap(), "--n", "9", "--out",
        out.to_str().unwrap(),
    ]);
    assert!(result.status.success());
    let rows = data_rows(&out);
    assert_eq!(rows.len(), 9);
    // K = 1, 2 are unreachable under M = 4.
    assert_eq!(rows[0][1], "0");
    assert_eq!(rows[1][1], "0");
}

#[test]
fn malformed_spec_file_is_a_usage_error() {
    let spec = tmp("bad_kernel.json");
    std::fs::write(&spec, r#"{"family":"sideways"}"#).unwrap();
    let out = tmp("unused.csv");
    let result = cfp(&[
        "exact", "--kernel", spec.to_str().unwrap(), "--n", "5", "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(result.status.code(), Some(1));
}

#[test]
fn unknown_flag_exits_one() {
    let result = cfp(&["exact", "--frobnicate"]);
    assert_eq!(result.status.code(), Some(1));
}

#[test]
fn resource_cap_exits_two() {
    let out = tmp("too_big.json");
    let result = cfp(&[
        "pairtimes", "--kernel", "constant", "--a", "1", "--n", "64", "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(result.status.code(), Some(2));
}

#[test]
fn sweep_grid_order_is_deterministic() {
    let out1 = tmp("sweep1.csv");
    let out2 = tmp("sweep2.csv");
    for out in [&out1, &out2] {
        let result = cfp(&[
            "sweep", "--kernel", "constant", "--n", "4,5", "--a", "0.5,2", "--quantity",
            "p2", "--out", out.to_str().unwrap(),
        ]);
        assert!(result.status.success());
    }
    let a = std::fs::read(&out1).unwrap();
    let b = std::fs::read(&out2).unwrap();
    assert_eq!(a, b);
    let rows = data_rows(&out1);
    // n outermost, then the a list in declaration order.
    let key: Vec<(String, String)> = rows.iter().map(|r| (r[0].clone(), r[1].clone())).collect();
    assert_eq!(
        key,
        vec![
            ("4".into(), "0.5".into()),
            ("4".into(), "2".into()),
            ("5".into(), "0.5".into()),
            ("5".into(), "2".into()),
        ]
    );
}

#[test]
fn simulate_writes_stats_and_events() {
    let out = tmp("sim.json");
    let events = tmp("events.csv");
    let result = cfp(&[
        "simulate", "--kernel", "constant", "--a", "1", "--n", "4", "--t-end", "50",
        "--replicas", "2", "--seed", "11", "--track-pair", "--events",
        events.to_str().unwrap(), "--out", out.to_str().unwrap(),
    ]);
    assert!(result.status.success());
    let doc: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    let stats = &doc["result"];
    assert_eq!(stats["n"], 4);
    assert_eq!(stats["rng_algorithm"], "chacha12");
    assert!(stats["kernel_spec_hash"].as_str().unwrap().len() == 64);
    let event_rows = data_rows(&events);
    assert_eq!(
        event_rows.len() as u64,
        stats["events_total"].as_u64().unwrap()
    );
    let header = std::fs::read_to_string(&events).unwrap();
    assert!(header.contains("time,kind,size_a,size_b"));
}

#[test]
fn analytic_taylor_needs_order_one() {
    let out = tmp("g2_taylor.csv");
    let result = cfp(&[
        "analytic", "--quantity", "g", "--order", "2", "--method", "taylor", "--n", "9",
        "--a", "0.01", "--out", out.to_str().unwrap(),
    ]);
    assert_eq!(result.status.code(), Some(1));
}

#[test]
fn emit_p2_vs_a_shows_the_low_a_plateaus() {
    let out = tmp("p2_plateau.csv");
    let result = cfp(&[
        "emit", "--quantity", "p2-vs-a", "--kernel", "bounded", "--n", "9", "--m", "4,9",
        "--a", "1e-7", "--out", out.to_str().unwrap(),
    ]);
    assert!(result.status.success());
    for row in data_rows(&out) {
        let p2: f64 = row[3].parse().unwrap();
        let expected = if row[0] == "4" { 7.0 / 24.0 } else { 1.0 };
        assert!((p2 - expected).abs() < 1e-4, "{row:?}");
    }
}
