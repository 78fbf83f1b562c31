use std::io::Write;
use std::process::{Command, Output, Stdio};

fn bin() -> Command {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_rescoord"));
    cmd.current_dir(env!("CARGO_MANIFEST_DIR"));
    cmd
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().unwrap()
}

fn run_with_stdin(args: &[&str], input: &[u8]) -> Output {
    let mut child = bin()
        .args(args)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .unwrap();
    child.stdin.take().unwrap().write_all(input).unwrap();
    child.wait_with_output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

#[test]
fn catalog_certificate_verifies() {
    let cert = run(&["--json", "catalog", "nagata"]);
    assert!(cert.status.success());
    let checked = run_with_stdin(&["verify", "-"], &cert.stdout);
    assert_eq!(checked.status.code(), Some(0), "{}", stdout(&checked));
}

#[test]
fn tampered_certificate_fails_verification() {
    let cert = run(&["--json", "catalog", "nagata"]);
    let mut json: serde_json::Value = serde_json::from_slice(&cert.stdout).unwrap();
    json["theta_y"][0] = serde_json::Value::String("y + x*z".into());
    let checked = run_with_stdin(&["verify", "-"], json.to_string().as_bytes());
    assert_eq!(checked.status.code(), Some(1));
}

#[test]
fn sigma_sequence_of_the_venereau_word() {
    let out = run(&["sigma-seq", "data/venereau_word.json"]);
    assert!(out.status.success());
    assert!(stdout(&out).contains("(1,2,1),(0,2,1),(0,0,1),(0,0,0),(0,0,0)"));
}

#[test]
fn empty_word_composes_to_identity() {
    let out = run(&["compose", "--word", ""]);
    assert!(out.status.success());
    assert!(stdout(&out).contains("(y, z)"), "{}", stdout(&out));
}

#[test]
fn n2_on_an_inline_word() {
    let out = run(&["n2", "--word", "z: y^2/x"]);
    assert!(out.status.success());
    assert!(stdout(&out).contains("(y, z)"), "{}", stdout(&out));
}

#[test]
fn catalog_lists_presets() {
    let out = run(&["catalog"]);
    assert!(out.status.success());
    for name in [
        "nagata",
        "anick",
        "venereau",
        "russell",
        "crucial-difficulty",
    ] {
        assert!(stdout(&out).contains(name), "missing {name}");
    }
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(run(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(run(&["compose", "--word", "z: y^"]).status.code(), Some(2));
    assert_eq!(run(&["compose", "--word", "w: y"]).status.code(), Some(2));
    assert_eq!(
        run(&["compose", "no/such/file.json"]).status.code(),
        Some(2)
    );
}
