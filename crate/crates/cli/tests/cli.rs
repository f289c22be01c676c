use std::fs;
use std::path::PathBuf;
use std::process::{Command, Output};

fn klshell(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_klshell")).args(args).output().expect("binary runs")
}

fn scratch(name: &str) -> PathBuf {
    let dir = PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join(name);
    let _ = fs::remove_dir_all(&dir);
    dir
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

#[test]
fn verify_passes() {
    let o = klshell(&["verify", "--draws", "2"]);
    assert!(o.status.success(), "{}", stdout(&o));
    assert!(stdout(&o).contains("pass/fail matrix [ok]"));
}

#[test]
fn bench_writes_trace_vtk_and_manifest() {
    let dir = scratch("bench");
    let o = klshell(&["bench", "plate", "--mesh", "4", "--out", dir.to_str().unwrap()]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    for f in ["trace.csv", "surface.vtk", "control_net.vtk", "manifest.json"] {
        assert!(dir.join(f).is_file(), "missing {f}");
    }
    let manifest: serde_json::Value = serde_json::from_str(&fs::read_to_string(dir.join("manifest.json")).unwrap()).unwrap();
    assert_eq!(manifest["config"]["mesh"], 4);
}

#[test]
fn config_file_overrides_flags() {
    let dir = scratch("config");
    fs::create_dir_all(&dir).unwrap();
    let config = dir.join("plate.json");
    fs::write(&config, r#"{"mesh": 3, "model": "koiter"}"#).unwrap();
    let out = dir.join("run");
    let o = klshell(&["bench", "plate", "--mesh", "6", "--model", "canham", "--config", config.to_str().unwrap(), "--out", out.to_str().unwrap()]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let manifest: serde_json::Value = serde_json::from_str(&fs::read_to_string(out.join("manifest.json")).unwrap()).unwrap();
    assert_eq!(manifest["config"]["mesh"], 3);
    assert_eq!(manifest["config"]["model"], "koiter");
}

#[test]
fn convergence_writes_its_table() {
    let dir = scratch("convergence");
    let o = klshell(&["convergence", "plate", "--meshes", "4,8,16", "--out", dir.to_str().unwrap()]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let csv = fs::read_to_string(dir.join("convergence.csv")).unwrap();
    assert_eq!(csv.lines().count(), 4);
    assert!(csv.starts_with("mesh,dofs,value,reference,error"));
    assert!(stdout(&o).contains("observed order"));
}

#[test]
fn bad_arguments_fail() {
    assert!(!klshell(&["bench", "plate", "--degree", "1"]).status.success());
    assert!(!klshell(&["bench", "nothing"]).status.success());
}
