//! End-to-end checks of the `emboss` binary: output shapes, exit codes,
//! and file emission.

use std::path::Path;
use std::process::{Command, Output};

fn emboss(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_emboss"))
        .args(args)
        .env_remove("EMBOSS_CONFIG")
        .output()
        .expect("binary runs")
}

fn emboss_in(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_emboss"))
        .args(args)
        .env_remove("EMBOSS_CONFIG")
        .current_dir(dir)
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn stderr(out: &Output) -> String {
    String::from_utf8(out.stderr.clone()).unwrap()
}

#[test]
fn translate_prints_unicode_braille() {
    let out = emboss(&["translate", "ab"]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert_eq!(text.lines().next(), Some("\u{2801}\u{2803}"));
    assert!(text.contains("0: dots 1"));
    assert!(text.contains("1: dots 1,2"));
}

#[test]
fn translate_empty_is_silent_success() {
    let out = emboss(&["translate", ""]);
    assert!(out.status.success());
    assert!(stdout(&out).is_empty());
}

#[test]
fn translate_unsupported_character_exits_2() {
    let out = emboss(&["translate", "¤"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains('¤'));
    assert!(stderr(&out).contains("position 0"));
}

#[test]
fn translate_reads_from_file() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("in.txt"), "c").unwrap();
    let out = emboss_in(dir.path(), &["translate", "--file", "in.txt"]);
    assert!(out.status.success());
    assert!(stdout(&out).starts_with('\u{2809}'));
}

#[test]
fn plan_emits_json_and_a_summary() {
    let out = emboss(&["plan", "a"]);
    assert!(out.status.success());
    let json: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    let actions = json["actions"].as_array().unwrap();
    let columns = actions
        .iter()
        .filter(|a| a["type"] == "column")
        .count();
    let moves: Vec<f64> = actions
        .iter()
        .filter(|a| a["type"] == "move")
        .map(|a| a["mm"].as_f64().unwrap())
        .collect();
    assert_eq!(columns, 2);
    assert_eq!(moves, vec![2.54]);
    // Summary travel matches the JSON field.
    let travel = json["total_travel_deg"].as_f64().unwrap();
    assert!(stderr(&out).contains(&format!("total travel {travel:.4} deg")));
}

#[test]
fn plan_of_empty_text_has_no_actions() {
    let out = emboss(&["plan", ""]);
    assert!(out.status.success());
    let json: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(json["actions"].as_array().unwrap().len(), 0);
    assert_eq!(json["total_travel_deg"].as_f64().unwrap(), 0.0);
}

#[test]
fn plan_layout_overflow_exits_3() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(
        dir.path().join("tiny.json"),
        r#"{"layout":{"paper_width_mm":22.0,"margin_mm":10.0}}"#,
    )
    .unwrap();
    let out = emboss_in(dir.path(), &["plan", "abc", "--config", "tiny.json"]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn simulate_reports_roundtrip_ok() {
    let out = emboss(&["simulate", "hello"]);
    assert!(out.status.success());
    let json: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(json["roundtrip"], "ok");
    assert_eq!(json["spurious_dot_count"], 0);
    assert_eq!(json["char_count"], 5);
    assert_eq!(json["force_ok"], true);
    assert_eq!(json["home_use"], true);
    // industrial_ratio = 800 / cps
    let cps = json["chars_per_second"].as_f64().unwrap();
    let ratio = json["industrial_ratio"].as_f64().unwrap();
    assert!((ratio - 800.0 / cps).abs() < 1e-3);
}

#[test]
fn simulate_empty_takes_no_time() {
    let out = emboss(&["simulate", ""]);
    assert!(out.status.success());
    let json: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(json["total_time_s"].as_f64().unwrap(), 0.0);
}

#[test]
fn simulate_accepts_a_plan_file() {
    let dir = tempfile::tempdir().unwrap();
    let plan = emboss_in(dir.path(), &["plan", "ok", "--out", "plan.json"]);
    assert!(plan.status.success());
    let out = emboss_in(dir.path(), &["simulate", "--plan-file", "plan.json"]);
    assert!(out.status.success(), "{}", stderr(&out));
    let json: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(json["roundtrip"], "ok");
}

#[test]
fn simulate_writes_side_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let out = emboss_in(
        dir.path(),
        &[
            "simulate", "dot", "--out", "r.json", "--csv", "d.csv", "--svg", "p.svg",
        ],
    );
    assert!(out.status.success());
    assert!(stdout(&out).is_empty());
    let csv = std::fs::read_to_string(dir.path().join("d.csv")).unwrap();
    assert!(csv.starts_with("x_mm,y_mm,peak_mm\n"));
    let svg = std::fs::read_to_string(dir.path().join("p.svg")).unwrap();
    assert!(svg.starts_with("<svg"));
    assert!(std::fs::read_to_string(dir.path().join("r.json"))
        .unwrap()
        .contains("\"roundtrip\":\"ok\""));
}

#[test]
fn cam_prints_design_figures_and_exports() {
    let dir = tempfile::tempdir().unwrap();
    let out = emboss_in(
        dir.path(),
        &["cam", "--samples", "360", "--csv", "cam.csv", "--svg", "cam.svg"],
    );
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.contains("max pressure angle: 13.6"), "{text}");
    assert!(text.contains("strike force envelope: 269.5 N"), "{text}");
    let csv = std::fs::read_to_string(dir.path().join("cam.csv")).unwrap();
    assert_eq!(csv.lines().count(), 361);
    assert!(std::fs::read_to_string(dir.path().join("cam.svg"))
        .unwrap()
        .starts_with("<svg"));
}

#[test]
fn dump_config_is_idempotent() {
    let dir = tempfile::tempdir().unwrap();
    let first = emboss_in(dir.path(), &["dump-config", "--out", "cfg.json"]);
    assert!(first.status.success());
    let second = emboss_in(dir.path(), &["dump-config", "--config", "cfg.json"]);
    assert!(second.status.success());
    let dumped = std::fs::read_to_string(dir.path().join("cfg.json")).unwrap();
    assert_eq!(stdout(&second), dumped);
    assert!(dumped.contains("\"sweep_rate_deg_per_s\""));
}

#[test]
fn config_via_environment_variable() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(
        dir.path().join("env.json"),
        r#"{"layout":{"paper_width_mm":22.0,"margin_mm":10.0}}"#,
    )
    .unwrap();
    let out = Command::new(env!("CARGO_BIN_EXE_emboss"))
        .args(["plan", "abc"])
        .env("EMBOSS_CONFIG", dir.path().join("env.json"))
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn invalid_config_exits_1() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("bad.json"), r#"{"servo":{"torque_nm":0}}"#).unwrap();
    let out = emboss_in(dir.path(), &["plan", "a", "--config", "bad.json"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn custom_table_is_honored() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("table.txt"), "!\t2,3,5\n").unwrap();
    let out = emboss_in(dir.path(), &["translate", "a!", "--table", "table.txt"]);
    assert!(out.status.success());
    // dots 2,3,5 -> mask 0b010110 -> U+2816
    assert_eq!(stdout(&out).lines().next(), Some("\u{2801}\u{2816}"));
    let bad = emboss_in(dir.path(), &["translate", "a!", "--table", "missing.txt"]);
    assert_eq!(bad.status.code(), Some(1));
}

#[test]
fn stamp_adds_a_timestamp_field() {
    let out = emboss(&["simulate", "a", "--stamp"]);
    assert!(out.status.success());
    assert!(stdout(&out).contains("\"generated_at\":\"unix:"));
    let out = emboss(&["simulate", "a"]);
    assert!(!stdout(&out).contains("generated_at"));
}
