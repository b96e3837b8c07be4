//! End-to-end tests of the `enzlogic` binary: exit codes, output formats,
//! determinism, and the netlist dump round trip.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("tests/fixtures")
        .join(name)
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_enzlogic"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

#[test]
fn truth_table_not_gate_matches_and_exits_zero() {
    let out = run(&[
        "truth-table",
        "--config",
        fixture("not.cfg").to_str().unwrap(),
    ]);
    let text = stdout(&out);
    assert_eq!(out.status.code(), Some(0), "stderr: {}", stderr(&out));
    assert_eq!(text.matches("match=yes").count(), 2);
    // Input 0 reads 1, input 1 reads 0.
    assert!(text.contains("E1=0"), "{text}");
    assert!(text
        .lines()
        .any(|l| l.contains("E1=0") && l.contains("level=1")));
    assert!(text
        .lines()
        .any(|l| l.contains("E1=1") && l.contains("level=0")));
}

#[test]
fn truth_table_violating_and_gate_fails_on_both_high() {
    let out = run(&[
        "truth-table",
        "--config",
        fixture("and_violating.cfg").to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(1));
    let text = stdout(&out);
    let bad_row = text
        .lines()
        .find(|l| l.contains("E2=1 E3=1"))
        .expect("row (1,1) present");
    assert!(bad_row.contains("match=NO"), "{bad_row}");
    // The three low rows still match.
    assert_eq!(text.matches("match=yes").count(), 3, "{text}");
}

#[test]
fn malformed_threshold_exits_two_and_names_invariant() {
    let out = run(&[
        "truth-table",
        "--config",
        fixture("bad_threshold.cfg").to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("tau0 < tau1"), "{}", stderr(&out));
}

#[test]
fn simulate_writes_expected_header_and_is_deterministic() {
    let dir = std::env::temp_dir().join("enzlogic-cli-test");
    std::fs::create_dir_all(&dir).unwrap();
    let out_a = dir.join("a.csv");
    let out_b = dir.join("b.csv");
    for out_path in [&out_a, &out_b] {
        let out = run(&[
            "simulate",
            "--config",
            fixture("not.cfg").to_str().unwrap(),
            "--out",
            out_path.to_str().unwrap(),
        ]);
        assert_eq!(out.status.code(), Some(0), "stderr: {}", stderr(&out));
    }
    let a = std::fs::read(&out_a).unwrap();
    let b = std::fs::read(&out_b).unwrap();
    assert_eq!(a, b, "identical config must give byte-identical CSV");
    let text = String::from_utf8(a).unwrap();
    assert!(
        text.starts_with("t,S1,S1p,E1,P1\n"),
        "header: {}",
        text.lines().next().unwrap()
    );
    assert!(!text.contains('\r'));
    // 160 / 0.25 + 1 samples plus the header.
    assert_eq!(text.lines().count(), 1 + 641);
}

#[test]
fn simulate_seed_override_changes_random_waveforms() {
    let dir = std::env::temp_dir().join("enzlogic-cli-seed");
    std::fs::create_dir_all(&dir).unwrap();
    let p1 = dir.join("s1.csv");
    let p2 = dir.join("s2.csv");
    for (path, seed) in [(&p1, "1"), (&p2, "2")] {
        let out = run(&[
            "simulate",
            "--config",
            fixture("xor_nand.cfg").to_str().unwrap(),
            "--out",
            path.to_str().unwrap(),
            "--seed",
            seed,
        ]);
        assert_eq!(out.status.code(), Some(0), "stderr: {}", stderr(&out));
    }
    assert_ne!(std::fs::read(&p1).unwrap(), std::fs::read(&p2).unwrap());
}

#[test]
fn check_seqmap_not_gate_passes() {
    let out = run(&[
        "check-seqmap",
        "--config",
        fixture("not.cfg").to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0), "stderr: {}", stderr(&out));
    let text = stdout(&out);
    assert!(text.contains("PASS"), "{text}");
}

#[test]
fn check_seqmap_fails_with_tiny_tau() {
    // tau far below the settle time: deviations cannot recover in time.
    let cfg = std::env::temp_dir().join("enzlogic-tiny-tau.cfg");
    let text = std::fs::read_to_string(fixture("not.cfg"))
        .unwrap()
        .replace("tau = auto", "tau = 0.5");
    std::fs::write(&cfg, text).unwrap();
    let out = run(&["check-seqmap", "--config", cfg.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    let text = stdout(&out);
    assert!(text.contains("FAIL"), "{text}");
    assert!(text.contains("err_after_tau"), "{text}");
}

#[test]
fn check_seqmap_short_trace_is_all_unchecked_with_warning() {
    let cfg = std::env::temp_dir().join("enzlogic-short-trace.cfg");
    let text = std::fs::read_to_string(fixture("not.cfg"))
        .unwrap()
        .replace("t_end = 160", "t_end = 4")
        .replace("E1 = 0@0, 1@40, 0@80, 1@120", "E1 = 0@0")
        .replace("tau = auto", "tau = 100");
    std::fs::write(&cfg, text).unwrap();
    let out = run(&["check-seqmap", "--config", cfg.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0), "stderr: {}", stderr(&out));
    let text = stdout(&out);
    assert!(text.contains("warning: all instants unchecked"), "{text}");
    assert!(text.contains("checked=0"), "{text}");
}

#[test]
fn check_seqmap_batch_reports_worst_code() {
    let ok = fixture("not.cfg");
    let bad = std::env::temp_dir().join("enzlogic-batch-bad.cfg");
    let text = std::fs::read_to_string(&ok)
        .unwrap()
        .replace("tau = auto", "tau = 0.5");
    std::fs::write(&bad, text).unwrap();
    let out = run(&[
        "check-seqmap",
        "--config",
        ok.to_str().unwrap(),
        bad.to_str().unwrap(),
        "--jobs",
        "2",
    ]);
    assert_eq!(out.status.code(), Some(1));
    let text = stdout(&out);
    assert!(text.contains("PASS"), "{text}");
    assert!(text.contains("FAIL"), "{text}");
}

#[test]
fn bounds_default_reports_t_plus_and_domain_flag() {
    let out = run(&[
        "bounds",
        "--config",
        fixture("bounds_default.cfg").to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0), "stderr: {}", stderr(&out));
    let text = stdout(&out);
    assert!(text.contains("t_plus = 16.476"), "{text}");
    assert!(text.contains("domain violated"), "{text}");
    assert!(text.contains("empirical_settle_forward"), "{text}");
    assert!(text.contains("empirical_settle_backward"), "{text}");
}

#[test]
fn bounds_with_weak_bias_defines_both() {
    let out = run(&[
        "bounds",
        "--config",
        fixture("bounds_domain_ok.cfg").to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0), "stderr: {}", stderr(&out));
    let text = stdout(&out);
    assert!(text.contains("t_minus = "), "{text}");
    assert!(!text.contains("domain violated"), "{text}");
}

#[test]
fn bounds_rejects_kappa_outside_unit_interval() {
    let out = run(&[
        "bounds",
        "--config",
        fixture("bounds_bad_kappa.cfg").to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(2), "stderr: {}", stderr(&out));
}

#[test]
fn synth_dump_reingests_as_netlist_scenario() {
    let dir = std::env::temp_dir().join("enzlogic-synth");
    std::fs::create_dir_all(&dir).unwrap();
    let net_path = dir.join("xor.net");
    let out = run(&[
        "synth",
        "--config",
        fixture("xor_nand.cfg").to_str().unwrap(),
        "--out",
        net_path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0), "stderr: {}", stderr(&out));
    let dump = std::fs::read_to_string(&net_path).unwrap();
    assert!(dump.contains("GATE "), "{dump}");
    assert!(dump.contains("WIRE "), "{dump}");

    // Re-ingest the dump through a netlist scenario and run its truth table.
    let cfg = dir.join("xor_netlist.cfg");
    std::fs::write(&cfg, "[circuit]\ntype = netlist\nfile = xor.net\n").unwrap();
    let tt = run(&["truth-table", "--config", cfg.to_str().unwrap()]);
    assert_eq!(tt.status.code(), Some(0), "stderr: {}", stderr(&tt));
    // XOR: rows (0,1) and (1,0) read 1.
    let text = stdout(&tt);
    assert_eq!(text.matches("match=yes").count(), 4, "{text}");
}

#[test]
fn latch_simulation_csv_contains_q_column() {
    let dir = std::env::temp_dir().join("enzlogic-latch");
    std::fs::create_dir_all(&dir).unwrap();
    let csv = dir.join("latch.csv");
    let out = run(&[
        "simulate",
        "--config",
        fixture("latch_set_hold.cfg").to_str().unwrap(),
        "--out",
        csv.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0), "stderr: {}", stderr(&out));
    let text = std::fs::read_to_string(&csv).unwrap();
    let header = text.lines().next().unwrap();
    assert!(header.split(',').any(|c| c == "Q"), "{header}");
    // Q settles to the high rail after the set segment.
    let last = text.lines().last().unwrap();
    let q_idx = header.split(',').position(|c| c == "Q").unwrap();
    let q: f64 = last.split(',').nth(q_idx).unwrap().parse().unwrap();
    assert!(q > 0.95, "Q = {q}");
}
