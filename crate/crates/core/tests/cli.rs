use std::path::Path;
use std::process::{Command, Output};

fn minecraft(args: &[&str], out: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_minecraft"))
        .args(args)
        .arg("--out")
        .arg(out)
        .output()
        .unwrap()
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p.display().to_string()
}

#[test]
fn kernel_eval_with_bundled_config() {
    let dir = tempfile::tempdir().unwrap();
    let out = minecraft(&["kernel-eval"], dir.path());
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let csv = std::fs::read_to_string(dir.path().join("kernel.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next().unwrap(), "r,K11,K12,K21,K22");
    assert_eq!(lines.count(), 81);
    assert!(dir.path().join("manifest.toml").exists());
}

#[test]
fn manifest_reproduces_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let first = dir.path().join("a");
    let second = dir.path().join("b");
    assert_eq!(minecraft(&["coherence"], &first).status.code(), Some(0));
    let manifest = first.join("manifest.toml").display().to_string();
    assert_eq!(
        minecraft(&["coherence", "--config", &manifest], &second)
            .status
            .code(),
        Some(0)
    );
    let a = std::fs::read(first.join("coherence.csv")).unwrap();
    let b = std::fs::read(second.join("coherence.csv")).unwrap();
    assert_eq!(a, b);
}

#[test]
fn manifest_from_another_command_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(
        minecraft(&["kernel-eval"], dir.path()).status.code(),
        Some(0)
    );
    let manifest = dir.path().join("manifest.toml").display().to_string();
    let out = minecraft(&["coherence", "--config", &manifest], &dir.path().join("x"));
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("kernel-eval"));
}

#[test]
fn bad_config_exits_with_two() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(
        dir.path(),
        "bad.toml",
        "[lags]\nstart = 0.0\nstop = 1.0\npoints = \"many\"\n",
    );
    let out = minecraft(&["kernel-eval", "--config", &cfg], &dir.path().join("o"));
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("`lags`"));
}

#[test]
fn missing_config_exits_with_four() {
    let dir = tempfile::tempdir().unwrap();
    let missing = dir.path().join("nope.toml").display().to_string();
    let out = minecraft(&["coherence", "--config", &missing], &dir.path().join("o"));
    assert_eq!(out.status.code(), Some(4));
}

#[test]
fn missing_series_exits_with_four() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(
        dir.path(),
        "fit.toml",
        "[input]\npath = \"absent.csv\"\n\n[fit]\nfamily = \"block\"\ncomponents = 2\n",
    );
    let out = minecraft(&["fit-series", "--config", &cfg], &dir.path().join("o"));
    assert_eq!(
        out.status.code(),
        Some(4),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
}

#[test]
fn unknown_subcommand_exits_with_two() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(minecraft(&["teleport"], dir.path()).status.code(), Some(2));
}
