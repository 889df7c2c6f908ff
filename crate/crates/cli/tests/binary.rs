use std::process::Command;

use serde_json::Value;

fn sbo(args: &[&str], table: Option<&std::path::Path>) -> (i32, Value) {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_sbo"));
    cmd.args(args);
    if let Some(t) = table {
        cmd.env("SBO_TABLE_PATH", t);
    }
    let out = cmd.output().expect("binary runs");
    let text = String::from_utf8(out.stdout).unwrap();
    (out.status.code().unwrap(), serde_json::from_str(&text).unwrap_or(Value::String(text)))
}

#[test]
fn exit_codes_and_json() {
    let (code, v) = sbo(&["sl2", "dim", "--l1", "-3/2", "--l2", "0", "--l3", "5/2"], None);
    assert_eq!(code, 0);
    assert_eq!(v["class"], "omega_generic");
    let (code, v) = sbo(&["conf", "verify", "--n", "2", "--lambda", "0", "--nu", "1"], None);
    assert_eq!(code, 2);
    assert!(v["hint"].is_string());
    let (code, v) = sbo(&["--help"], None);
    assert_eq!(code, 0);
    assert!(v.as_str().unwrap().contains("Usage"));
}

#[test]
fn kernel_config_file() {
    let dir = std::env::temp_dir().join(format!("sbo-kernel-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let cfg = dir.join("k.json");
    std::fs::write(&cfg, r#"{"quadrature": {"refinement": 2}, "test_function": {"radius": "1/2"}, "y": [0.1]}"#).unwrap();
    let (code, v) = sbo(&["conf", "kernel", "--n", "2", "--lambda", "4", "--nu", "0.5", "--config", cfg.to_str().unwrap()], None);
    assert_eq!(code, 1, "too coarse to meet the default tolerance: {v}");
    assert!(v["hint"].as_str().unwrap().contains("refinement"));
    std::fs::write(&cfg, r#"{"quadrature": {"refinement": 6}, "test_function": {"radius": "1/2"}, "y": [0.1]}"#).unwrap();
    let (code, v) = sbo(&["conf", "kernel", "--n", "2", "--lambda", "4", "--nu", "0.5", "--config", cfg.to_str().unwrap()], None);
    assert_eq!(code, 0, "{v}");
    assert!(v["error_estimate"].as_f64().unwrap() <= 1e-6 * v["value"].as_f64().unwrap().abs());
    std::fs::write(&cfg, r#"{"quadrature": {"refinment": 2}}"#).unwrap();
    let (code, _) = sbo(&["conf", "kernel", "--n", "2", "--lambda", "4", "--nu", "0.5", "--config", cfg.to_str().unwrap()], None);
    assert_eq!(code, 2);
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn table_path_override() {
    let builtin = include_str!("../../core/data/pair_tables.json");
    let mut doc: Value = serde_json::from_str(builtin).unwrap();
    doc["version"] = Value::String("9.9.9".into());
    let dir = std::env::temp_dir().join(format!("sbo-table-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("tables.json");
    std::fs::write(&path, doc.to_string()).unwrap();
    let (code, v) = sbo(&["pairs", "list", "--filter", "bb"], Some(&path));
    assert_eq!(code, 0);
    assert_eq!(v["version"], "9.9.9");
    std::fs::write(&path, "{}").unwrap();
    let (code, v) = sbo(&["pairs", "list"], Some(&path));
    assert_ne!(code, 0);
    assert!(v["error"].is_string());
    std::fs::remove_dir_all(&dir).ok();
}
