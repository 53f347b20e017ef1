//! Validation reports: per-dataset RMSE plus the low-SOC and low-temperature
//! segments.

use serde::{Deserialize, Serialize};

use crate::domain::{Dataset, Role};
use crate::error::{Error, Result};
use crate::model::{CellModel, Diagnostics};

use super::cost::rmse;

/// Samples below this SOC form the low-SOC segment.
pub const LOW_SOC_THRESHOLD: f64 = 0.2;
/// Datasets at or below this ambient temperature (°C) form the
/// low-temperature segment.
pub const LOW_TEMP_THRESHOLD_C: f64 = 0.0;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DatasetReport {
    pub id: String,
    pub ambient_temp_c: f64,
    pub rmse_v: f64,
    pub samples: usize,
    pub completed: usize,
    pub abort_step: Option<usize>,
    pub abort_reason: Option<String>,
    pub low_soc_rmse_v: Option<f64>,
    pub low_soc_samples: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub schema_version: u32,
    pub per_dataset: Vec<DatasetReport>,
    /// Mean of per-dataset RMSEs (V).
    pub overall_rmse_v: f64,
    /// RMSE pooled over all samples with SOC below 20 % (V).
    pub low_soc_rmse_v: Option<f64>,
    /// RMSE pooled over all samples of datasets at or below 0 °C (V).
    pub low_temp_rmse_v: Option<f64>,
}

impl ValidationReport {
    /// Per-dataset table with header
    /// `id,ambient_temp_c,rmse_V,samples,completed,abort_step,low_soc_rmse_V,low_soc_samples`.
    pub fn write_csv(&self, w: impl std::io::Write) -> Result<()> {
        let mut w = csv::Writer::from_writer(w);
        w.write_record([
            "id",
            "ambient_temp_c",
            "rmse_V",
            "samples",
            "completed",
            "abort_step",
            "low_soc_rmse_V",
            "low_soc_samples",
        ])?;
        let opt = |v: Option<String>| v.unwrap_or_default();
        for r in &self.per_dataset {
            w.write_record([
                r.id.clone(),
                r.ambient_temp_c.to_string(),
                r.rmse_v.to_string(),
                r.samples.to_string(),
                r.completed.to_string(),
                opt(r.abort_step.map(|k| k.to_string())),
                opt(r.low_soc_rmse_v.map(|v| v.to_string())),
                r.low_soc_samples.to_string(),
            ])?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Squared-error sums of the segments of one dataset.
struct Segments {
    low_soc: (f64, usize),
    all: (f64, usize),
}

fn pooled((s, n): (f64, usize)) -> Option<f64> {
    (n > 0).then(|| (s / n as f64).sqrt())
}

/// Reports one dataset given its simulated voltage prefix.
pub fn report_dataset(model: &CellModel, dataset: &Dataset, simulated: &[f64]) -> (DatasetReport, (f64, usize), (f64, usize)) {
    let s = &dataset.series;
    let completed = simulated.len().min(s.len());
    let soc = s.coulomb_soc(model.initial_soc(dataset), model.cell.capacity_ah, charge_efficiency(model));
    let mut seg = Segments {
        low_soc: (0.0, 0),
        all: (0.0, 0),
    };
    for k in 0..completed {
        let e2 = (simulated[k] - s.voltage_v[k]).powi(2);
        seg.all.0 += e2;
        seg.all.1 += 1;
        if soc[k] < LOW_SOC_THRESHOLD {
            seg.low_soc.0 += e2;
            seg.low_soc.1 += 1;
        }
    }
    let report = DatasetReport {
        id: dataset.id.clone(),
        ambient_temp_c: dataset.ambient_temp_c,
        rmse_v: rmse(&simulated[..completed], &s.voltage_v[..completed]),
        samples: s.len(),
        completed,
        abort_step: None,
        abort_reason: None,
        low_soc_rmse_v: pooled(seg.low_soc),
        low_soc_samples: seg.low_soc.1,
    };
    (report, seg.low_soc, seg.all)
}

fn charge_efficiency(model: &CellModel) -> f64 {
    match &model.params {
        crate::model::ModelParams::Ecm(p) => p.charge_efficiency,
        crate::model::ModelParams::Pbm(_) => model.cell.coulombic_efficiency,
    }
}

/// Simulates every dataset and reports the accuracy measures. The per-step
/// diagnostics are returned alongside so they can be persisted.
pub fn validate(model: &CellModel, datasets: &[Dataset]) -> Result<(ValidationReport, Vec<Diagnostics>)> {
    if let Some(d) = datasets.iter().find(|d| d.role != Role::Validation) {
        return Err(Error::InvalidInput(format!("dataset `{}` is not a validation dataset", d.id)));
    }
    validate_any(model, datasets)
}

/// As [`validate`] without the role check; used to report calibration fits.
pub fn validate_any(model: &CellModel, datasets: &[Dataset]) -> Result<(ValidationReport, Vec<Diagnostics>)> {
    if datasets.is_empty() {
        return Err(Error::InvalidInput("no datasets to validate".into()));
    }
    let mut per_dataset = Vec::new();
    let mut diags = Vec::new();
    let mut low_soc = (0.0, 0);
    let mut low_temp = (0.0, 0);
    for d in datasets {
        let sim = model.simulate_dataset(d, true)?;
        let (mut rep, ls, all) = report_dataset(model, d, &sim.voltage);
        if let Some(a) = &sim.abort {
            rep.abort_step = Some(a.step);
            rep.abort_reason = Some(a.violation.to_string());
        }
        low_soc.0 += ls.0;
        low_soc.1 += ls.1;
        if d.ambient_temp_c <= LOW_TEMP_THRESHOLD_C {
            low_temp.0 += all.0;
            low_temp.1 += all.1;
        }
        per_dataset.push(rep);
        diags.push(sim.diagnostics.expect("recorded"));
    }
    let overall = per_dataset.iter().map(|r| r.rmse_v).sum::<f64>() / per_dataset.len() as f64;
    Ok((
        ValidationReport {
            schema_version: super::calibrate::RESULT_SCHEMA_VERSION,
            per_dataset,
            overall_rmse_v: overall,
            low_soc_rmse_v: pooled(low_soc),
            low_temp_rmse_v: pooled(low_temp),
        },
        diags,
    ))
}
