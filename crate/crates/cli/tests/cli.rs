//! End-to-end tests of the `basmajian` binary: preset round-trips, report
//! output, exit codes, and the diagnostic subcommands.

use std::path::PathBuf;
use std::process::{Command, Output};

use basmajian_cli::config::ConfigFile;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_basmajian"))
}

fn write_preset(dir: &tempfile::TempDir, name: &str) -> PathBuf {
    let path = dir.path().join(format!("{name}.cfg"));
    let out = bin()
        .args(["preset", name, "-o"])
        .arg(&path)
        .output()
        .unwrap();
    assert!(out.status.success(), "preset {name} failed");
    path
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

#[test]
fn preset_roundtrip_all() {
    let dir = tempfile::tempdir().unwrap();
    for name in ["ex51", "ex52", "veronese3"] {
        let path = write_preset(&dir, name);
        let text = std::fs::read_to_string(&path).unwrap();
        let cfg = ConfigFile::parse(&text).unwrap();
        assert_eq!(ConfigFile::parse(&cfg.print()).unwrap(), cfg, "{name}");
        cfg.to_representation().unwrap();
    }
}

#[test]
fn verify_ex51_text_and_exit_code() {
    let dir = tempfile::tempdir().unwrap();
    let path = write_preset(&dir, "ex51");
    let out = bin()
        .arg("verify")
        .arg(&path)
        .args(["--cutoff", "8"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert!(text.contains("SUM lhs=4 rhs=4 nonzero=4"));
    assert!(text.contains("status=VERIFIED"));
    // determinism: byte-identical on a second run
    let again = bin()
        .arg("verify")
        .arg(&path)
        .args(["--cutoff", "8"])
        .output()
        .unwrap();
    assert_eq!(out.stdout, again.stdout);
}

#[test]
fn verify_geometric_agrees() {
    let dir = tempfile::tempdir().unwrap();
    let path = write_preset(&dir, "ex51");
    let alg = bin()
        .arg("verify")
        .arg(&path)
        .args(["--cutoff", "6"])
        .output()
        .unwrap();
    let geo = bin()
        .arg("verify")
        .arg(&path)
        .args(["--cutoff", "6", "--geometric"])
        .output()
        .unwrap();
    assert_eq!(alg.status.code(), Some(0));
    assert_eq!(alg.stdout, geo.stdout);
}

#[test]
fn verify_cutoff_zero_is_partial() {
    let dir = tempfile::tempdir().unwrap();
    let path = write_preset(&dir, "ex51");
    let out = bin()
        .arg("verify")
        .arg(&path)
        .args(["--cutoff", "0"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
    assert!(stdout(&out).contains("status=PARTIAL"));
}

#[test]
fn verify_json_format() {
    let dir = tempfile::tempdir().unwrap();
    let path = write_preset(&dir, "ex51");
    let out = bin()
        .arg("verify")
        .arg(&path)
        .args(["--cutoff", "6", "--format", "json"])
        .output()
        .unwrap();
    let text = stdout(&out);
    assert!(text.contains("\"status\":\"VERIFIED\""));
    assert!(text.contains("\"lhs\":4"));
}

#[test]
fn length_classify_gap() {
    let dir = tempfile::tempdir().unwrap();
    let ex51 = write_preset(&dir, "ex51");
    let ex52 = write_preset(&dir, "ex52");
    let out = bin().arg("length").arg(&ex51).arg("abAB").output().unwrap();
    assert_eq!(stdout(&out).trim(), "LENGTH 4");
    let out = bin().arg("classify").arg(&ex52).arg("a").output().unwrap();
    assert_eq!(stdout(&out).trim(), "CLASS HYPERBOLIC");
    let out = bin()
        .arg("gap")
        .arg(&ex51)
        .args(["--max-len", "4"])
        .output()
        .unwrap();
    let text = stdout(&out);
    let rows: Vec<&str> = text.lines().collect();
    assert_eq!(rows.len(), 4);
    for row in rows {
        let gap: i64 = row.split_whitespace().last().unwrap().parse().unwrap();
        assert!(gap > 0, "non-positive gap in `{row}`");
    }
}

#[test]
fn errors_exit_one() {
    let out = bin()
        .args(["verify", "/nonexistent/definitely-not-here.cfg"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
    let out = bin().args(["preset", "nosuch"]).output().unwrap();
    assert_eq!(out.status.code(), Some(1));
    // parse error carries a line number
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.cfg");
    std::fs::write(&bad, "field qp 3\ndim 2\nsurface 1 1\nbogus x\n").unwrap();
    let out = bin().arg("verify").arg(&bad).output().unwrap();
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 4"));
}
