//! Command-line behavior of the two binaries.

use std::path::Path;
use std::process::Command;

use tempfile::TempDir;

fn yang_dir() -> &'static Path {
    Path::new(concat!(env!("CARGO_MANIFEST_DIR"), "/yang"))
}

#[test]
fn yang2jin_writes_to_stdout_by_default() {
    let output = Command::new(env!("CARGO_BIN_EXE_yang2jin"))
        .arg(yang_dir().join("example.yang"))
        .arg("-I")
        .arg(yang_dir())
        .output()
        .unwrap();
    assert!(output.status.success());
    let value: serde_json::Value = serde_json::from_slice(&output.stdout).unwrap();
    assert_eq!(value["name"], serde_json::json!("example"));
    assert_eq!(value["map"]["device"]["type"], serde_json::json!("container"));
}

#[test]
fn yang2jin_reports_diagnostics_with_file_and_line() {
    let dir = TempDir::new().unwrap();
    let path = dir.path().join("broken.yang");
    std::fs::write(
        &path,
        "module broken {\n  prefix b;\n  import orc-uci { prefix uci; }\n  uci:package \"b\";\n  list l { key \"k\"; leaf k { type string; } }\n}\n",
    )
    .unwrap();
    let output = Command::new(env!("CARGO_BIN_EXE_yang2jin"))
        .arg(&path)
        .output()
        .unwrap();
    assert_eq!(output.status.code(), Some(1));
    let stderr = String::from_utf8(output.stderr).unwrap();
    let expected = format!("{}:5: list-missing-section: ", path.display());
    assert!(stderr.contains(&expected), "{stderr}");
}

#[test]
fn yang2jin_fails_on_unresolvable_types_without_import_dirs() {
    let dir = TempDir::new().unwrap();
    let path = dir.path().join("needs_import.yang");
    std::fs::write(
        &path,
        "module needs-import {\n  prefix n;\n  import orc-uci { prefix uci; }\n  import types { prefix t; }\n  uci:package \"n\";\n  container c {\n    uci:section \"c\";\n    leaf x { type t:custom; }\n  }\n}\n",
    )
    .unwrap();
    let output = Command::new(env!("CARGO_BIN_EXE_yang2jin"))
        .arg(&path)
        .output()
        .unwrap();
    assert_eq!(output.status.code(), Some(1));
    let stderr = String::from_utf8(output.stderr).unwrap();
    assert!(stderr.contains("unknown-type"), "{stderr}");
}

#[test]
fn orc_without_a_mode_exits_with_usage_error() {
    let models = TempDir::new().unwrap();
    let jin = Command::new(env!("CARGO_BIN_EXE_yang2jin"))
        .arg(yang_dir().join("example.yang"))
        .output()
        .unwrap();
    std::fs::write(models.path().join("example.json"), &jin.stdout).unwrap();
    let store = TempDir::new().unwrap();
    let output = Command::new(env!("CARGO_BIN_EXE_orc"))
        .arg("--models")
        .arg(models.path())
        .arg("--store")
        .arg(store.path())
        .env_remove("GATEWAY_INTERFACE")
        .output()
        .unwrap();
    assert_eq!(output.status.code(), Some(2));
}

#[test]
fn orc_rejects_an_empty_model_directory() {
    let models = TempDir::new().unwrap();
    let store = TempDir::new().unwrap();
    let output = Command::new(env!("CARGO_BIN_EXE_orc"))
        .arg("--models")
        .arg(models.path())
        .arg("--store")
        .arg(store.path())
        .arg("--cgi")
        .output()
        .unwrap();
    assert_eq!(output.status.code(), Some(1));
    assert!(String::from_utf8(output.stderr).unwrap().contains("no *.json models"));
}
