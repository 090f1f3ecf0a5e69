use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use capband::config::{emit_config, parse_config};
use capband::io::{fmt_num, parse_num, read_csv};
use capband::run::{run_command, Command as Run};
use serde_json::Value;

fn configs() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("configs")
}

fn capband(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_capband")).args(args).output().expect("binary runs")
}

fn error_of(out: &Output) -> Value {
    let text = String::from_utf8_lossy(&out.stderr);
    let line = text.lines().find(|l| l.starts_with('{')).unwrap_or_else(|| panic!("no json error in {text}"));
    serde_json::from_str::<Value>(line).unwrap()["error"].clone()
}

#[test]
fn every_shipped_config_round_trips() {
    for entry in std::fs::read_dir(configs()).unwrap() {
        let path = entry.unwrap().path();
        let cfg = parse_config(&std::fs::read_to_string(&path).unwrap())
            .unwrap_or_else(|e| panic!("{}: {e}", path.display()));
        let text = emit_config(&cfg);
        let again = parse_config(&text).unwrap();
        assert_eq!(emit_config(&again), text, "{}", path.display());
    }
}

#[test]
fn static_bands_to_file_with_report() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("bands.csv");
    let cfg = configs().join("fig-SLb-square-static-folded.toml");
    let run = capband(&[
        "static-bands",
        "--config",
        cfg.to_str().unwrap(),
        "--output",
        out.to_str().unwrap(),
        "--threads",
        "2",
    ]);
    assert!(run.status.success(), "{}", String::from_utf8_lossy(&run.stderr));
    let csv = std::fs::read_to_string(&out).unwrap();
    let (header, rows) = read_csv(&csv);
    assert_eq!(header, ["path_parameter", "alpha_x", "alpha_y", "band_index", "re_omega", "im_omega"]);
    assert!(!rows.is_empty());
    // every number re-parses to the same bits and prints identically
    for row in &rows {
        for (i, f) in row.iter().enumerate() {
            if i == 3 {
                continue;
            }
            assert_eq!(fmt_num(parse_num(f).unwrap()), *f);
        }
    }
    let report: Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("bands.csv.report.json")).unwrap()).unwrap();
    assert_eq!(report["command"], "static-bands");
    assert_eq!(report["config_hash"].as_str().unwrap().len(), 64);
}

#[test]
fn output_is_deterministic() {
    let cfg = configs().join("fig-SLc-square-uniform.toml");
    let run = || capband(&["uniform-bands", "--config", cfg.to_str().unwrap(), "--format", "json"]).stdout;
    let a = run();
    assert!(!a.is_empty());
    assert_eq!(a, run());
    let v: Value = serde_json::from_slice(&a).unwrap();
    assert!(v["diagnostics"]["detections"].as_array().unwrap().iter().any(|d| d["kind"] == "k-gap"));
    assert!(v["diagnostics"].get("wall_time_s").is_none());
}

#[test]
fn modulated_csv_carries_ep_condition() {
    let mut cfg = parse_config(&std::fs::read_to_string(configs().join("fig-SLresb-dimer-modulated.toml")).unwrap())
        .unwrap();
    cfg.sweep.as_mut().unwrap().samples_per_segment = 3;
    let out = run_command(&cfg, Run::ModulatedBands).unwrap();
    let (header, rows) = read_csv(&out.csv);
    assert_eq!(header.last().unwrap(), "ep_condition");
    assert!(rows.iter().all(|r| r.len() == 7));
}

#[test]
fn range_error_names_the_field() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.toml");
    std::fs::write(&cfg, "[lattice]\npreset = \"square\"\n\n[resonators]\npreset = \"single\"\n\n[material]\ndelta = -1.0\n")
        .unwrap();
    let run = capband(&["static-bands", "--config", cfg.to_str().unwrap()]);
    assert_eq!(run.status.code(), Some(2));
    let e = error_of(&run);
    assert_eq!(e["kind"], "range");
    assert!(e["message"].as_str().unwrap().contains("material.delta"));
}

#[test]
fn unknown_key_is_a_schema_error() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.toml");
    std::fs::write(&cfg, "[lattice]\npreset = \"square\"\ncolour = 3\n").unwrap();
    let run = capband(&["capacitance", "--config", cfg.to_str().unwrap()]);
    assert_eq!(run.status.code(), Some(2));
    assert_eq!(error_of(&run)["kind"], "schema");
}

#[test]
fn command_must_match_regime() {
    let cfg = configs().join("fig-SLa-square-static.toml");
    let run = capband(&["modulated-bands", "--config", cfg.to_str().unwrap()]);
    assert_eq!(run.status.code(), Some(2));
    assert_eq!(error_of(&run)["kind"], "range");
}

#[test]
fn mathieu_chart_and_finite_commands() {
    let chart = capband(&["mathieu-chart", "--config", configs().join("mathieu-chart.toml").to_str().unwrap()]);
    assert!(chart.status.success());
    let (header, rows) = read_csv(&String::from_utf8(chart.stdout).unwrap());
    assert_eq!(header, ["a", "q", "re_nu", "im_nu"]);
    assert!(rows.len() > 100);

    let finite = capband(&["finite", "--config", configs().join("finite-sphere.toml").to_str().unwrap()]);
    assert!(finite.status.success());
    let (_, rows) = read_csv(&String::from_utf8(finite.stdout).unwrap());
    assert_eq!(rows.len(), 2);
}
