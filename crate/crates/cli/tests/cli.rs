use std::path::PathBuf;
use std::process::{Command, Output};

fn fixture(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../core/tests/fixtures")
        .join(name)
        .display()
        .to_string()
}

fn ca2om(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ca2om"))
        .args(args)
        .env_remove("CA2OM_OUT_DIR")
        .output()
        .expect("binary runs")
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

#[test]
fn derive_writes_the_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let out_dir = dir.path().join("out");
    let out = ca2om(&[
        "derive",
        &fixture("hospital.carm"),
        "--annotations",
        &fixture("hospital.ann"),
        "-o",
        out_dir.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    assert!(stdout(&out).is_empty(), "outputs go to files only");
    for name in ["model.json", "classes.dot", "std_MEDICAL_TREATMENT.dot", "trace.tsv"] {
        assert!(out_dir.join(name).is_file(), "{name} missing");
    }
    let warnings = stderr(&out);
    assert!(warnings.contains("WARNING") && warnings.contains("OM8"), "{warnings}");
}

#[test]
fn out_dir_from_the_environment() {
    let dir = tempfile::tempdir().unwrap();
    let out = Command::new(env!("CARGO_BIN_EXE_ca2om"))
        .args(["derive", &fixture("sketch.carm"), "--format", "json"])
        .env("CA2OM_OUT_DIR", dir.path())
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    assert!(dir.path().join("model.json").is_file());
    assert!(!dir.path().join("trace.tsv").exists());
}

#[test]
fn validate_reports_one_error() {
    let out = ca2om(&["validate", &fixture("two_marks.carm")]);
    assert_eq!(out.status.code(), Some(1));
    let err = stderr(&out);
    let errors: Vec<&str> = err.lines().filter(|l| l.starts_with("ERROR")).collect();
    assert_eq!(errors.len(), 1, "{err}");
    assert!(errors[0].contains("OM2"), "{err}");
}

#[test]
fn validate_accepts_a_valid_model() {
    let out = ca2om(&["validate", &fixture("three_processes.carm")]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
}

#[test]
fn failed_derivation_writes_nothing() {
    let dir = tempfile::tempdir().unwrap();
    let out_dir = dir.path().join("out");
    let out = ca2om(&["derive", &fixture("cycle.carm"), "-o", out_dir.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("OM3"));
    assert!(!out_dir.exists());
}

#[test]
fn strict_mode_turns_fallbacks_into_errors() {
    let dir = tempfile::tempdir().unwrap();
    let args = [
        "derive",
        &fixture("hospital.carm"),
        "--annotations",
        &fixture("hospital.ann"),
        "--strict",
        "-o",
        dir.path().to_str().unwrap(),
    ];
    let out = ca2om(&args);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).lines().any(|l| l.starts_with("ERROR") && l.contains("OM8")));
}

#[test]
fn dump_order() {
    let dir = tempfile::tempdir().unwrap();
    let out = ca2om(&[
        "derive",
        &fixture("hospital.carm"),
        "--annotations",
        &fixture("hospital.ann"),
        "--dump-order",
        "-o",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let order: Vec<String> = stdout(&out).lines().map(String::from).collect();
    let pos = |id: &str| order.iter().position(|o| o == id).unwrap();
    for (a, b) in [("NUR 1", "TREAT 1"), ("MED 1", "TREAT 1"), ("APP 1", "TREAT 1"), ("TREAT 1", "TREAT 2"), ("DIS 1", "TREAT 2")] {
        assert!(pos(a) < pos(b), "{a} after {b} in {order:?}");
    }
}

#[test]
fn process_restricts_the_derivation() {
    let dir = tempfile::tempdir().unwrap();
    let out = ca2om(&[
        "derive",
        &fixture("three_processes.carm"),
        "--process",
        "A",
        "--dump-order",
        "-o",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    assert_eq!(stdout(&out), "B9\nB4\nA1\nA2\nA3\nA4\n");
}

#[test]
fn trace_prints_links() {
    let out = ca2om(&[
        "trace",
        "MEDICAL_TREATMENT.comments",
        &fixture("hospital.carm"),
        "--annotations",
        &fixture("hospital.ann"),
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    assert_eq!(stdout(&out), "OM6\tTREAT 1/MEDICAL TREATMENT/Comments\tMEDICAL_TREATMENT.comments\n");

    let missing = ca2om(&["trace", "NO_SUCH_CLASS", &fixture("sketch.carm")]);
    assert_eq!(missing.status.code(), Some(1));
}

#[test]
fn usage_errors_exit_with_two() {
    for args in [
        vec!["frobnicate"],
        vec!["derive"],
        vec!["derive", "--no-such-flag", "x.carm"],
        vec!["validate", "/no/such/file.carm"],
    ] {
        let out = ca2om(&args);
        assert_eq!(out.status.code(), Some(2), "{args:?}: {}", stderr(&out));
    }
    let out = ca2om(&["derive", &fixture("sketch.carm"), "--format", "xmi"]);
    assert_eq!(out.status.code(), Some(2));
    let out = ca2om(&["derive", &fixture("sketch.carm"), "--process", "Z"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn help_exits_cleanly() {
    let out = ca2om(&["--help"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout(&out).contains("derive"));
}
