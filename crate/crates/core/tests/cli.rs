use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn iontide(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_iontide")).args(args).output().expect("binary runs")
}

fn config(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("configs").join(format!("{name}.toml"))
}

fn write_config(dir: &Path, text: &str) -> PathBuf {
    let p = dir.join("c.toml");
    fs::write(&p, text).unwrap();
    p
}

fn csvs(dir: &Path) -> Vec<(String, String)> {
    let mut v: Vec<_> = fs::read_dir(dir)
        .unwrap()
        .filter_map(|e| e.ok())
        .filter(|e| e.path().extension().is_some_and(|x| x == "csv"))
        .map(|e| {
            let text = fs::read_to_string(e.path()).unwrap();
            let kept: Vec<&str> = text.lines().filter(|l| !l.starts_with("# generated_unix")).collect();
            (e.file_name().to_string_lossy().into_owned(), kept.join("\n"))
        })
        .collect();
    v.sort();
    v
}

#[test]
fn list_names_every_scenario() {
    let o = iontide(&["list"]);
    assert!(o.status.success());
    let text = String::from_utf8(o.stdout).unwrap();
    for s in ["fig6", "fig7", "throw-catch", "timing", "fig9", "squeeze", "properties", "kick", "micromotion"] {
        assert!(text.lines().any(|l| l.split_whitespace().next() == Some(s)), "{s} missing from:\n{text}");
    }
}

#[test]
fn rerun_writes_identical_tables() {
    let dir = tempfile::tempdir().unwrap();
    let (a, b) = (dir.path().join("a"), dir.path().join("b"));
    let cfg = config("kick");
    for out in [&a, &b] {
        let o = iontide(&["run", "kick", "--config", cfg.to_str().unwrap(), "--out", out.to_str().unwrap()]);
        assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
        assert!(out.join("report.json").exists());
    }
    let (ta, tb) = (csvs(&a), csvs(&b));
    assert!(!ta.is_empty());
    assert_eq!(ta, tb);
}

#[test]
fn json_report_carries_checks_and_parameters() {
    let cfg = config("micromotion");
    let o = iontide(&["run", "micromotion", "--config", cfg.to_str().unwrap(), "--json"]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["scenario"], "micromotion");
    assert!(v["checks"].as_array().is_some_and(|c| c.len() == 2));
    assert!(v["parameters"].is_object());
}

#[test]
fn failing_check_exits_one() {
    let dir = tempfile::tempdir().unwrap();
    // C0 = 10 µm scales C±2 to 0.25 fm, far outside the 2.5 fm band
    let p = write_config(dir.path(), "scenario = \"micromotion\"\n[protocol]\nsecular_amplitude = \"10um\"\n");
    let o = iontide(&["run", "micromotion", "--config", p.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn configuration_errors_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    let cases = [
        ("micromotion", "scenario = \"kick\"\n"),
        ("micromotion", "scenario = \"micromotion\"\n[trap]\nfrequency = \"1 parsec\"\n"),
        ("micromotion", "scenario = \"micromotion\"\n[bogus]\nx = 1\n"),
        ("micromotion", "scenario = \"micromotion\"\n[trap\n"),
        ("nope", "scenario = \"nope\"\n"),
    ];
    for (name, text) in cases {
        let p = write_config(dir.path(), text);
        let o = iontide(&["run", name, "--config", p.to_str().unwrap()]);
        assert_eq!(o.status.code(), Some(2), "config {text:?}: {}", String::from_utf8_lossy(&o.stderr));
    }
    let o = iontide(&["run", "kick", "--config", dir.path().join("missing.toml").to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
}
