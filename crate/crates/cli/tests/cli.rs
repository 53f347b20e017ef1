use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::{json, Value};

fn cellkit(args: &[&str], config: &Path, out: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_cellkit"))
        .args(args)
        .arg("--config")
        .arg(config)
        .arg("--out")
        .arg(out)
        .output()
        .expect("binary runs")
}

fn write_config(dir: &Path, name: &str, v: Value) -> PathBuf {
    let p = dir.join(name);
    fs::write(&p, serde_json::to_string_pretty(&v).unwrap()).unwrap();
    p
}

fn read_json(p: &Path) -> Value {
    serde_json::from_str(&fs::read_to_string(p).unwrap()).unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exited normally")
}

fn synth_corpus(dir: &Path, truth: &str) -> PathBuf {
    let cfg = write_config(
        dir,
        "synth.json",
        json!({
            "schema_version": 1,
            "truth": { "reference": truth },
            "plan": { "standard": { "noise_sigma_v": 0.0005, "seed": 3 } }
        }),
    );
    let out = dir.join("corpus");
    let o = cellkit(&["synth"], &cfg, &out);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    out
}

#[test]
fn synth_then_ingest_then_validate() {
    let dir = tempfile::tempdir().unwrap();
    let corpus = synth_corpus(dir.path(), "ecm_truth");
    for f in ["manifest.json", "cell.json", "truth.json", "synth_summary.json"] {
        assert!(corpus.join(f).is_file(), "{f}");
    }

    let cfg = write_config(dir.path(), "ingest.json", json!({ "schema_version": 1, "manifest": "corpus/manifest.json" }));
    let o = cellkit(&["ingest"], &cfg, &dir.path().join("ingest"));
    assert_eq!(code(&o), 0);
    let report = read_json(&dir.path().join("ingest/ingest_report.json"));
    assert_eq!(report["loaded"]["calibration"], 15);
    assert_eq!(report["loaded"]["validation"], 15);

    let cfg = write_config(
        dir.path(),
        "validate.json",
        json!({ "schema_version": 1, "manifest": "corpus/manifest.json", "model": { "file": "corpus/truth.json" } }),
    );
    let out = dir.path().join("validate");
    let o = cellkit(&["validate", "--model", "ecm"], &cfg, &out);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let v = read_json(&out.join("validation.json"));
    assert_eq!(v["per_dataset"].as_array().unwrap().len(), 15);
    // The truth model against its own noisy output sees only the noise.
    let overall = v["overall_rmse_v"].as_f64().unwrap();
    assert!((overall - 0.0005).abs() < 5e-5, "{overall}");
    assert_eq!(fs::read_dir(out.join("diagnostics")).unwrap().count(), 15);
    assert_eq!(fs::read_to_string(out.join("validation.csv")).unwrap().lines().count(), 16);
}

#[test]
fn missing_data_file_is_reported_and_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let corpus = synth_corpus(dir.path(), "ecm_truth");
    fs::remove_file(corpus.join("data/us06_25C.csv")).unwrap();
    let cfg = write_config(dir.path(), "ingest.json", json!({ "schema_version": 1, "manifest": "corpus/manifest.json" }));
    let o = cellkit(&["ingest"], &cfg, &dir.path().join("ingest"));
    assert_eq!(code(&o), 2);
    let report = read_json(&dir.path().join("ingest/ingest_report.json"));
    assert_eq!(report["loaded"]["validation"], 14);
    assert_eq!(report["errors"][0]["id"], "us06_25C");
}

#[test]
fn unknown_config_field_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "bad.json", json!({ "schema_version": 1, "manifest": "m.json", "typo": 1 }));
    let o = cellkit(&["ingest"], &cfg, &dir.path().join("out"));
    assert_eq!(code(&o), 2);
}

#[test]
fn future_schema_version_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "v9.json", json!({ "schema_version": 9, "manifest": "m.json" }));
    let o = cellkit(&["ingest"], &cfg, &dir.path().join("out"));
    assert_eq!(code(&o), 2);
}

#[test]
fn missing_config_file_exits_1() {
    let dir = tempfile::tempdir().unwrap();
    let o = cellkit(&["ingest"], &dir.path().join("absent.json"), &dir.path().join("out"));
    assert_eq!(code(&o), 1);
}

#[test]
fn model_kind_mismatch_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    synth_corpus(dir.path(), "ecm_truth");
    let cfg = write_config(
        dir.path(),
        "validate.json",
        json!({ "schema_version": 1, "manifest": "corpus/manifest.json", "model": { "reference": "pbm_nominal" } }),
    );
    let o = cellkit(&["validate", "--model", "ecm"], &cfg, &dir.path().join("v"));
    assert_eq!(code(&o), 2);
}

#[test]
fn calibrate_writes_result_history_and_model() {
    let dir = tempfile::tempdir().unwrap();
    synth_corpus(dir.path(), "ecm_truth");
    let cfg = write_config(
        dir.path(),
        "calibrate.json",
        json!({
            "schema_version": 1,
            "manifest": "corpus/manifest.json",
            "pso": { "n_particles": 4, "max_iterations": 2, "seed": 1 }
        }),
    );
    let out = dir.path().join("cal");
    let o = cellkit(&["calibrate", "--model", "ecm"], &cfg, &out);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let r = read_json(&out.join("result.json"));
    assert_eq!(r["schema_version"], 1);
    assert_eq!(r["evaluations"], 12);
    assert_eq!(r["per_dataset"].as_array().unwrap().len(), 15);
    let history = fs::read_to_string(out.join("history.csv")).unwrap();
    assert_eq!(history.lines().next(), Some("iteration,best_cost_V"));
    assert_eq!(history.lines().count(), 4);
    for f in ["model.json", "search_space.json", "calibration_fit.json"] {
        assert!(out.join(f).is_file(), "{f}");
    }
}

#[test]
fn fit_hysteresis_writes_map_and_model() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "synth.json",
        json!({
            "schema_version": 1,
            "truth": { "reference": "ecm_truth" },
            "plan": { "characterization": { "temps_c": [25], "noise_sigma_v": 0.0, "seed": 0 } }
        }),
    );
    let o = cellkit(&["synth"], &cfg, &dir.path().join("char"));
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let cfg = write_config(
        dir.path(),
        "fit.json",
        json!({
            "schema_version": 1,
            "manifest": "char/manifest.json",
            "map_datasets": ["pulse_25C"],
            "fit_datasets": ["loops_25C"],
            "plett": { "pso": { "n_particles": 10, "max_iterations": 10 } },
            "model": { "reference": "ecm_nominal" }
        }),
    );
    let out = dir.path().join("hyst");
    let o = cellkit(&["fit-hysteresis"], &cfg, &out);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let map = fs::read_to_string(out.join("hysteresis_map.csv")).unwrap();
    assert_eq!(map.lines().next(), Some("soc,temp_c,half_gap_V,mean_ocv_V,covered"));
    assert_eq!(map.lines().count(), 10);
    for f in ["hysteresis_fit.json", "hysteresis.json", "model.json"] {
        assert!(out.join(f).is_file(), "{f}");
    }
}

#[test]
fn bench_and_compare_report_the_time_ratio() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "bench.json",
        json!({ "schema_version": 1, "models": [{ "reference": "pbm_nominal" }, { "reference": "ecm_nominal" }] }),
    );
    let o = cellkit(&["bench"], &cfg, &dir.path().join("bench"));
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let b = read_json(&dir.path().join("bench/bench.json"));
    assert!(b["pbm_over_ecm"].as_f64().unwrap() > 1.0);
    assert_eq!(b["results"][0]["steps"], 100_000);

    synth_corpus(dir.path(), "ecm_truth");
    let cfg = write_config(
        dir.path(),
        "compare.json",
        json!({
            "schema_version": 1,
            "manifest": "corpus/manifest.json",
            "pbm_model": { "reference": "pbm_truth" },
            "ecm_model": { "file": "corpus/truth.json" }
        }),
    );
    let out = dir.path().join("cmp");
    let o = cellkit(&["compare"], &cfg, &out);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    for f in ["report.json", "summary.csv", "per_dataset.csv", "radar.svg", "bench.json"] {
        assert!(out.join(f).is_file(), "{f}");
    }
    assert_eq!(fs::read_dir(out.join("plots")).unwrap().count(), 15);
    assert_eq!(fs::read_to_string(out.join("per_dataset.csv")).unwrap().lines().count(), 16);
}
