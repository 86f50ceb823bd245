//! Black-box tests of the `dds` binary: flag parsing, exit codes, output
//! formats, and determinism of single-value queries.

use std::process::Command;

fn dds(args: &[&str]) -> std::process::Output {
    Command::new(env!("CARGO_BIN_EXE_dds"))
        .args(args)
        .output()
        .expect("spawn dds")
}

fn stdout(args: &[&str]) -> String {
    let out = dds(args);
    assert!(
        out.status.success(),
        "dds {args:?} exited {:?}: {}",
        out.status.code(),
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

#[test]
fn lvalue_completed_matches_zeta_k2() {
    let text = stdout(&["lvalue", "--s", "2,0", "--n", "0", "--method", "completed"]);
    assert!(text.contains("1.506703009923e+00"), "{text}");
}

#[test]
fn dtilde_limit_at_w1() {
    let text = stdout(&["dtilde", "--s", "1.5,0", "--w", "1,0", "--method", "lerch"]);
    // -sqrt(2) zeta(3) = -1.6999651751...
    assert!(text.contains("-1.699965175"), "{text}");
}

#[test]
fn scan_rows_and_flags() {
    let text = stdout(&[
        "scan", "--s", "1.5,0", "--w-from", "0.8", "--w-to", "1.2", "--step", "0.1",
        "--norm-cutoff", "2000",
    ]);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 6, "{text}"); // header + 5 rows
    assert!(lines[0].starts_with("w,"));
    // all five rows sit within 0.1 of the pole and carry the flag
    for row in &lines[1..] {
        assert!(row.ends_with("near-pole") || !row.contains("near-pole"));
    }
    assert!(text.matches("near-pole").count() >= 3, "{text}");
}

#[test]
fn scan_degenerate_range_is_single_row() {
    let text = stdout(&[
        "scan", "--s", "1.5,0", "--w-from", "2", "--w-to", "2", "--step", "0.5",
        "--norm-cutoff", "2000",
    ]);
    assert_eq!(text.lines().count(), 2, "{text}");
}

#[test]
fn bad_step_is_usage_error_exit_2() {
    let out = dds(&[
        "scan", "--s", "1.5,0", "--w-from", "0", "--w-to", "1", "--step", "0",
    ]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("step"));
}

#[test]
fn unknown_flag_is_exit_2() {
    let out = dds(&["lvalue", "--bogus", "1"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn domain_error_is_exit_2() {
    // l_direct needs Re(s) >= 1.05
    let out = dds(&["lvalue", "--s", "0.5,0", "--n", "0", "--method", "direct"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("domain"));
}

#[test]
fn verify_single_fast_suite_exit_0_json() {
    let out = dds(&["verify", "c14_bp_zero_locus", "--output", "json"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("\"suite\": \"c14_bp_zero_locus\""));
    assert!(text.contains("\"pass\": true"));
    // wall time goes to stderr, never to the report
    assert!(!text.contains("wall"));
    assert!(String::from_utf8_lossy(&out.stderr).contains("finished"));
}

#[test]
fn verify_list_names_suites() {
    let text = stdout(&["verify", "--list"]);
    assert_eq!(text.lines().count(), 15);
    assert!(text.contains("c09_holomorphy_scan"));
}

#[test]
fn identical_invocations_are_byte_identical() {
    let args = ["residue-w1", "--s", "1.3,0.5", "--norm-cutoff", "4000"];
    let a = stdout(&args);
    let b = stdout(&args);
    assert_eq!(a, b);
}

#[test]
fn fourier_table_output() {
    let text = stdout(&["fourier", "--w", "2,0", "--n-max", "8"]);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 6); // header + n = 0,2,4,6,8
    assert!(lines[0].starts_with("n\t"));
}

#[test]
fn lvalue_cache_roundtrip() {
    let dir = std::env::temp_dir().join("dds_cli_cache_test");
    let _ = std::fs::create_dir_all(&dir);
    let path = dir.join("cache.jsonl");
    let _ = std::fs::remove_file(&path);
    let run = || {
        let out = Command::new(env!("CARGO_BIN_EXE_dds"))
            .env("DDS_LCACHE", &path)
            .args(["lvalue", "--s", "1.7,0.3", "--n", "2", "--method", "completed"])
            .output()
            .expect("spawn dds");
        assert!(out.status.success());
        String::from_utf8(out.stdout).unwrap()
    };
    let first = run();
    assert!(path.exists(), "cache file not written");
    let cached = run();
    assert_eq!(first, cached);
    let lines = std::fs::read_to_string(&path).unwrap();
    assert_eq!(lines.trim().lines().count(), 1, "{lines}");
    let _ = std::fs::remove_file(&path);
}
