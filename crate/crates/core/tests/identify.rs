//! Calibration, validation and comparison on synthetic corpora.

use cellkit::domain::{Dataset, ProfileKind, Role, TimeSeries};
use cellkit::identify::{
    calibrate, cost, ecm_space, pbm_space, validate, validate_any, BoundWidths, PsoConfig, SearchSpace,
};
use cellkit::io::{compare, generate_synthetic, ComparisonReport, ProfileShape, SynthPlan};
use cellkit::model::{CellModel, Diagnostics};
use cellkit::reference;

fn pbm(params: cellkit::domain::PbmParams) -> CellModel {
    CellModel::pbm(reference::cell_spec(), reference::hysteresis_params(), params)
}

fn ecm(params: cellkit::domain::EcmParams) -> CellModel {
    CellModel::ecm(reference::cell_spec(), reference::hysteresis_params(), params)
}

/// Noiseless drive cycles, one repeat each, from the round-trip plan.
fn corpus(truth: &CellModel, pick: &[usize]) -> Vec<Dataset> {
    let mut plan = SynthPlan::round_trip(0.0, 1);
    plan.profiles = pick.iter().map(|&k| plan.profiles[k].clone()).collect();
    for p in &mut plan.profiles {
        if let ProfileShape::DriveCycle { repeats, .. } = &mut p.shape {
            *repeats = 1;
        }
    }
    generate_synthetic(truth, &plan).unwrap().datasets
}

fn pso(n: usize, iters: usize) -> PsoConfig {
    PsoConfig {
        n_particles: n,
        max_iterations: iters,
        seed: 11,
        ..Default::default()
    }
}

#[test]
fn pbm_round_trip_on_three_profiles() {
    let data = corpus(&pbm(reference::pbm_params()), &[1, 3, 4]);
    let base = pbm(reference::pbm_nominal());
    let space = pbm_space(&reference::pbm_nominal(), BoundWidths::default());
    let (_, r) = calibrate(&base, &data, &space, &pso(60, 100)).unwrap();
    assert!(r.best_cost <= 3.0 * 2e-3, "{}", r.best_cost);
    assert!(r.converged);
}

#[test]
fn ecm_round_trip_on_five_profiles() {
    let data = corpus(&ecm(reference::ecm_params()), &[0, 1, 2, 3, 4]);
    let base = ecm(reference::ecm_nominal());
    let space = ecm_space(&reference::ecm_nominal(), 1.5);
    let (_, r) = calibrate(&base, &data, &space, &pso(60, 100)).unwrap();
    assert!(r.best_cost <= 5.0 * 1e-3, "{}", r.best_cost);
}

#[test]
fn best_cost_matches_resimulation_and_history_is_monotone() {
    let data = corpus(&ecm(reference::ecm_params()), &[3]);
    let base = ecm(reference::ecm_nominal());
    let (fitted, r) = calibrate(&base, &data, &ecm_space(&reference::ecm_nominal(), 1.5), &pso(12, 8)).unwrap();
    let again = cost(&fitted, &data).unwrap().total;
    assert!((again - r.best_cost).abs() <= 1e-12 * r.best_cost.max(1e-12), "{again} vs {}", r.best_cost);
    assert!(r.history.windows(2).all(|w| w[1] <= w[0]));
    assert_eq!(r.history.len(), 9);
}

#[test]
fn single_short_dataset_smoke() {
    let mut data = corpus(&ecm(reference::ecm_params()), &[3]);
    data[0].series = data[0].series.slice(0, 200);
    let base = ecm(reference::ecm_nominal());
    let (_, r) = calibrate(&base, &data, &ecm_space(&reference::ecm_nominal(), 3.0), &pso(6, 3)).unwrap();
    assert_eq!(r.per_dataset.len(), 1);
    assert_eq!(r.evaluations, 24);
}

#[test]
fn fixed_seed_calibration_is_bit_reproducible() {
    let data = corpus(&pbm(reference::pbm_params()), &[3]);
    let base = pbm(reference::pbm_nominal());
    let space = pbm_space(&reference::pbm_nominal(), BoundWidths::default());
    let (ma, a) = calibrate(&base, &data, &space, &pso(10, 5)).unwrap();
    let (mb, b) = calibrate(&base, &data, &space, &pso(10, 5)).unwrap();
    assert_eq!(a.history, b.history);
    assert_eq!(a.best_params, b.best_params);
    assert_eq!(ma, mb);
}

#[test]
fn calibration_rejects_validation_data_and_wrong_space() {
    let mut data = corpus(&ecm(reference::ecm_params()), &[3]);
    let base = ecm(reference::ecm_nominal());
    let pbm_sp = pbm_space(&reference::pbm_nominal(), BoundWidths::default());
    assert!(calibrate(&base, &data, &pbm_sp, &pso(4, 1)).is_err());
    data[0].role = Role::Validation;
    assert!(calibrate(&base, &data, &ecm_space(&reference::ecm_nominal(), 1.5), &pso(4, 1)).is_err());
}

#[test]
fn validation_on_truth_matches_calibration_residuals() {
    let truth = pbm(reference::pbm_params());
    let mut plan = SynthPlan::round_trip(0.002, 5);
    plan.profiles.truncate(3);
    let data = generate_synthetic(&truth, &plan).unwrap().datasets;
    let residuals = cost(&truth, &data).unwrap();
    let (report, _) = validate_any(&truth, &data).unwrap();
    for (c, r) in residuals.per_dataset.iter().zip(&report.per_dataset) {
        assert_eq!(c.id, r.id);
        assert!((c.rmse - r.rmse_v).abs() <= 1e-15, "{} {}", c.rmse, r.rmse_v);
        assert!((r.rmse_v - 0.002).abs() < 2e-4, "{}", r.rmse_v);
    }
}

#[test]
fn low_soc_segment_covers_exactly_the_samples_below_twenty_percent() {
    let model = ecm(reference::ecm_params());
    let q = model.cell.capacity_ah;
    let n = 3060;
    let profile = TimeSeries::uniform(1.0, vec![q; n], 25.0).unwrap();
    let sim = model.simulate(&profile, 1.0, false).unwrap();
    assert!(sim.abort.is_none());
    // One-C discharge from full: SOC at sample k is 1 − k/3600.
    let low: Vec<bool> = (0..n).map(|k| 1.0 - k as f64 / 3600.0 < 0.2).collect();
    let measured = sim
        .voltage
        .iter()
        .zip(&low)
        .map(|(v, &l)| if l { v + 0.010 } else { *v })
        .collect();
    let d = Dataset {
        id: "cc".into(),
        role: Role::Validation,
        ambient_temp_c: 25.0,
        profile_kind: ProfileKind::ConstantRate,
        initial_soc: Some(1.0),
        series: profile.with_voltage(measured),
    };
    let (report, _) = validate(&model, &[d]).unwrap();
    let r = &report.per_dataset[0];
    let expected_samples = low.iter().filter(|&&l| l).count();
    assert_eq!(r.low_soc_samples, expected_samples);
    assert!((r.low_soc_rmse_v.unwrap() - 0.010).abs() < 1e-12);
    let frac = expected_samples as f64 / n as f64;
    assert!((r.rmse_v - 0.010 * frac.sqrt()).abs() < 1e-12);
    assert_eq!(report.low_temp_rmse_v, None);
}

#[test]
fn report_is_recomputable_from_persisted_diagnostics() {
    let dir = tempfile::tempdir().unwrap();
    let truth = ecm(reference::ecm_params());
    let mut data = generate_synthetic(&truth, &SynthPlan::round_trip(0.001, 9)).unwrap().datasets;
    for d in &mut data {
        d.role = Role::Validation;
    }
    let model = ecm(reference::ecm_nominal());
    let (report, diags) = validate(&model, &data).unwrap();
    for ((d, diag), r) in data.iter().zip(&diags).zip(&report.per_dataset) {
        let path = dir.path().join(format!("{}.csv", d.id));
        diag.save(&path).unwrap();
        let back = Diagnostics::load(&path).unwrap();
        let v = back.column("voltage_v").unwrap();
        let m = &d.series.voltage_v[..v.len()];
        let e = (v.iter().zip(m).map(|(a, b)| (a - b).powi(2)).sum::<f64>() / v.len() as f64).sqrt();
        assert!((e - r.rmse_v).abs() <= 1e-15 * r.rmse_v.max(1.0), "{e} vs {}", r.rmse_v);
    }
    let mean = report.per_dataset.iter().map(|r| r.rmse_v).sum::<f64>() / report.per_dataset.len() as f64;
    assert_eq!(mean, report.overall_rmse_v);
}

fn validation_corpus() -> Vec<Dataset> {
    let truth = ecm(reference::ecm_params());
    generate_synthetic(&truth, &SynthPlan::standard(0.0005, 4))
        .unwrap()
        .datasets
        .into_iter()
        .filter(|d| d.role == Role::Validation)
        .collect()
}

#[test]
fn identical_models_compare_with_zero_deltas() {
    let data = validation_corpus();
    let m = ecm(reference::ecm_params());
    let c = compare(&m, &m, &data, [0.01, 0.01]).unwrap();
    assert!(c.report.deltas().iter().flatten().all(|&d| d == 0.0));
    assert!(c.report.per_dataset.iter().all(|r| r.delta_v == 0.0));
}

#[test]
fn comparison_reports_parameter_counts_and_one_row_per_dataset() {
    let data = validation_corpus();
    let c = compare(&pbm(reference::pbm_params()), &ecm(reference::ecm_params()), &data, [0.02, 0.01]).unwrap();
    assert_eq!(c.report.first.parameter_count, 72);
    assert_eq!(c.report.second.parameter_count, 330);
    assert_eq!(c.report.per_dataset.len(), data.len());
    assert_eq!(c.overlays.len(), data.len());
}

#[test]
fn comparison_of_different_dataset_lists_fails() {
    let data = validation_corpus();
    let m = ecm(reference::ecm_params());
    let (a, _) = validate(&m, &data).unwrap();
    let (b, _) = validate(&m, &data[1..]).unwrap();
    assert!(ComparisonReport::from_reports((&m, &a, 0.0), (&m, &b, 0.0)).is_err());
}

#[test]
fn search_space_round_trips_through_json() {
    let dir = tempfile::tempdir().unwrap();
    let s = pbm_space(&reference::pbm_nominal(), BoundWidths::default());
    let path = dir.path().join("space.json");
    s.save(&path).unwrap();
    assert_eq!(SearchSpace::load(&path).unwrap(), s);
}

fn same_space(shipped: &SearchSpace, built: &SearchSpace) {
    assert_eq!(shipped.names, built.names);
    assert_eq!(shipped.scale, built.scale);
    assert_eq!(shipped.free, built.free);
    for (a, b) in [(&shipped.lower, &built.lower), (&shipped.upper, &built.upper), (&shipped.base, &built.base)] {
        for (x, y) in a.iter().zip(b) {
            assert!((x - y).abs() <= 1e-14 * y.abs(), "{x} vs {y}");
        }
    }
}

#[test]
fn shipped_bounds_files_are_the_built_in_defaults() {
    let dir = std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs");
    let pbm_file = SearchSpace::load(&dir.join("bounds_pbm.json")).unwrap();
    same_space(&pbm_file, &pbm_space(&reference::pbm_nominal(), BoundWidths::default()));
    let ecm_file = SearchSpace::load(&dir.join("bounds_ecm.json")).unwrap();
    same_space(&ecm_file, &ecm_space(&reference::ecm_nominal(), cellkit::io::config::ECM_BOUND_FACTOR));
}
