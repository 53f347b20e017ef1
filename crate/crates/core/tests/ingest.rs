use std::fs;
use std::path::Path;

use cellkit::domain::{ProfileKind, Role};
use cellkit::io::{ingest, Manifest, ManifestEntry, MANIFEST_SCHEMA_VERSION};

const HEADER: &str = "time_s,current_a,voltage_v,temperature_c\n";

fn write_csv(dir: &Path, name: &str, times: &[f64]) {
    let mut s = HEADER.to_string();
    for t in times {
        s.push_str(&format!("{t},83.0,3.31,25.0\n"));
    }
    fs::create_dir_all(dir.join("data")).unwrap();
    fs::write(dir.join("data").join(name), s).unwrap();
}

fn entry(id: &str, role: Role) -> ManifestEntry {
    ManifestEntry {
        id: id.into(),
        file: format!("data/{id}.csv").into(),
        role,
        ambient_temp_c: 25.0,
        profile_kind: ProfileKind::DriveCycle,
        initial_soc: Some(0.9),
    }
}

fn save_manifest(dir: &Path, entries: Vec<ManifestEntry>) -> std::path::PathBuf {
    let m = Manifest {
        schema_version: MANIFEST_SCHEMA_VERSION,
        cell_spec: None,
        datasets: entries,
    };
    let path = dir.join("manifest.json");
    m.save(&path).unwrap();
    path
}

#[test]
fn two_file_manifest_loads_both() {
    let dir = tempfile::tempdir().unwrap();
    write_csv(dir.path(), "a.csv", &[0.0, 1.0, 2.0]);
    write_csv(dir.path(), "b.csv", &[0.0, 0.5, 1.0, 1.5]);
    let path = save_manifest(dir.path(), vec![entry("a", Role::Calibration), entry("b", Role::Validation)]);
    let ing = ingest(&path).unwrap();
    assert_eq!(ing.datasets.len(), 2);
    assert!(ing.report.errors.is_empty());
    assert_eq!(ing.datasets[1].series.len(), 4);
    assert_eq!(ing.datasets[0].initial_soc, Some(0.9));
}

#[test]
fn repeated_timestamp_rejects_only_that_file() {
    let dir = tempfile::tempdir().unwrap();
    write_csv(dir.path(), "good.csv", &[0.0, 1.0, 2.0]);
    write_csv(dir.path(), "bad.csv", &[0.0, 1.0, 2.0, 2.0, 3.0]);
    let path = save_manifest(dir.path(), vec![entry("good", Role::Calibration), entry("bad", Role::Calibration)]);
    let ing = ingest(&path).unwrap();
    assert_eq!(ing.datasets.len(), 1);
    assert_eq!(ing.report.errors.len(), 1);
    let e = &ing.report.errors[0];
    assert_eq!(e.id, "bad");
    assert!(e.reason.contains("non-monotone time at row 4"), "{}", e.reason);
}

#[test]
fn non_finite_value_is_reported() {
    let dir = tempfile::tempdir().unwrap();
    fs::create_dir_all(dir.path().join("data")).unwrap();
    fs::write(dir.path().join("data/x.csv"), format!("{HEADER}0,1,3.3,25\n1,NaN,3.3,25\n")).unwrap();
    let path = save_manifest(dir.path(), vec![entry("x", Role::Validation)]);
    let ing = ingest(&path).unwrap();
    assert!(ing.datasets.is_empty());
    assert_eq!(ing.report.declared.validation, 1);
    assert_eq!(ing.report.loaded.validation, 0);
}

#[test]
fn missing_units_header_is_reported() {
    let dir = tempfile::tempdir().unwrap();
    fs::create_dir_all(dir.path().join("data")).unwrap();
    fs::write(dir.path().join("data/x.csv"), "time,current,voltage,temperature\n0,1,3.3,25\n").unwrap();
    let path = save_manifest(dir.path(), vec![entry("x", Role::Validation)]);
    assert_eq!(ingest(&path).unwrap().report.errors.len(), 1);
}

#[test]
fn duplicate_ids_are_fatal() {
    let dir = tempfile::tempdir().unwrap();
    write_csv(dir.path(), "a.csv", &[0.0, 1.0]);
    let path = save_manifest(dir.path(), vec![entry("a", Role::Calibration), entry("a", Role::Validation)]);
    assert!(ingest(&path).is_err());
}

#[test]
fn reference_layout_role_counts_are_echoed() {
    let dir = tempfile::tempdir().unwrap();
    let mut entries = Vec::new();
    for k in 0..55 {
        let id = format!("test_{k:02}");
        write_csv(dir.path(), &format!("{id}.csv"), &[0.0, 1.0, 2.0]);
        entries.push(entry(&id, if k < 39 { Role::Calibration } else { Role::Validation }));
    }
    let path = save_manifest(dir.path(), entries);
    let r = ingest(&path).unwrap().report;
    assert_eq!((r.declared.calibration, r.declared.validation), (39, 16));
    assert_eq!((r.loaded.calibration, r.loaded.validation), (39, 16));
}
