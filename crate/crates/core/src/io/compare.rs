//! Side-by-side comparison of two validated models: accuracy, low-SOC and
//! low-temperature accuracy, per-step compute time and parameter count.

use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::domain::Dataset;
use crate::error::{Error, Result};
use crate::identify::{validate_any, ValidationReport};
use crate::model::{CellModel, ModelKind};

use super::svg::{line_plot, radar, Line, PALETTE};

pub const REPORT_SCHEMA_VERSION: u32 = 1;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModelSummary {
    pub model: ModelKind,
    pub overall_rmse_v: f64,
    pub low_soc_rmse_v: Option<f64>,
    pub low_temp_rmse_v: Option<f64>,
    pub step_time_ms: f64,
    pub parameter_count: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DatasetRow {
    pub id: String,
    pub ambient_temp_c: f64,
    pub first_rmse_v: f64,
    pub second_rmse_v: f64,
    /// `first − second`.
    pub delta_v: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ComparisonReport {
    pub schema_version: u32,
    pub first: ModelSummary,
    pub second: ModelSummary,
    pub per_dataset: Vec<DatasetRow>,
}

fn opt_delta(a: Option<f64>, b: Option<f64>) -> Option<f64> {
    Some(a? - b?)
}

impl ComparisonReport {
    /// Joins two validation reports, which must cover the same datasets in
    /// the same order.
    pub fn from_reports(
        first: (&CellModel, &ValidationReport, f64),
        second: (&CellModel, &ValidationReport, f64),
    ) -> Result<Self> {
        let (ra, rb) = (first.1, second.1);
        let ids_a: Vec<&str> = ra.per_dataset.iter().map(|d| d.id.as_str()).collect();
        let ids_b: Vec<&str> = rb.per_dataset.iter().map(|d| d.id.as_str()).collect();
        if ids_a != ids_b {
            return Err(Error::Mismatch(format!(
                "models were validated on different datasets: {ids_a:?} vs {ids_b:?}"
            )));
        }
        let summary = |(m, r, t): (&CellModel, &ValidationReport, f64)| ModelSummary {
            model: m.kind(),
            overall_rmse_v: r.overall_rmse_v,
            low_soc_rmse_v: r.low_soc_rmse_v,
            low_temp_rmse_v: r.low_temp_rmse_v,
            step_time_ms: t,
            parameter_count: m.parameter_count(),
        };
        let per_dataset = ra
            .per_dataset
            .iter()
            .zip(&rb.per_dataset)
            .map(|(a, b)| DatasetRow {
                id: a.id.clone(),
                ambient_temp_c: a.ambient_temp_c,
                first_rmse_v: a.rmse_v,
                second_rmse_v: b.rmse_v,
                delta_v: a.rmse_v - b.rmse_v,
            })
            .collect();
        Ok(Self {
            schema_version: REPORT_SCHEMA_VERSION,
            first: summary(first),
            second: summary(second),
            per_dataset,
        })
    }

    /// `first − second` for each summary measure, in the order of
    /// [`SUMMARY_MEASURES`].
    pub fn deltas(&self) -> [Option<f64>; 5] {
        let (a, b) = (&self.first, &self.second);
        [
            Some(a.overall_rmse_v - b.overall_rmse_v),
            opt_delta(a.low_soc_rmse_v, b.low_soc_rmse_v),
            opt_delta(a.low_temp_rmse_v, b.low_temp_rmse_v),
            Some(a.step_time_ms - b.step_time_ms),
            Some(a.parameter_count as f64 - b.parameter_count as f64),
        ]
    }

    /// Summary table: one row per measure, columns `measure,first,second,delta`.
    pub fn write_summary_csv(&self, w: impl Write) -> Result<()> {
        let mut w = csv::Writer::from_writer(w);
        w.write_record(["measure", &self.first.model.to_string(), &self.second.model.to_string(), "delta"])?;
        let vals = |m: &ModelSummary| {
            [
                Some(m.overall_rmse_v),
                m.low_soc_rmse_v,
                m.low_temp_rmse_v,
                Some(m.step_time_ms),
                Some(m.parameter_count as f64),
            ]
        };
        let f = |v: Option<f64>| v.map(|x| x.to_string()).unwrap_or_default();
        for (k, name) in SUMMARY_MEASURES.iter().enumerate() {
            w.write_record([name.to_string(), f(vals(&self.first)[k]), f(vals(&self.second)[k]), f(self.deltas()[k])])?;
        }
        w.flush()?;
        Ok(())
    }

    /// Per-dataset table: `id,ambient_temp_c,<first>_rmse_V,<second>_rmse_V,delta_V`.
    pub fn write_per_dataset_csv(&self, w: impl Write) -> Result<()> {
        let mut w = csv::Writer::from_writer(w);
        w.write_record([
            "id".to_string(),
            "ambient_temp_c".to_string(),
            format!("{}_rmse_V", self.first.model),
            format!("{}_rmse_V", self.second.model),
            "delta_V".to_string(),
        ])?;
        for r in &self.per_dataset {
            w.write_record([
                r.id.clone(),
                r.ambient_temp_c.to_string(),
                r.first_rmse_v.to_string(),
                r.second_rmse_v.to_string(),
                r.delta_v.to_string(),
            ])?;
        }
        w.flush()?;
        Ok(())
    }

    /// Radar scores: each measure divided by the larger of the two models,
    /// so the worse model touches the rim.
    pub fn radar_svg(&self) -> String {
        let raw = |m: &ModelSummary| {
            [
                m.overall_rmse_v,
                m.low_soc_rmse_v.unwrap_or(0.0),
                m.low_temp_rmse_v.unwrap_or(0.0),
                m.step_time_ms,
                m.parameter_count as f64,
            ]
        };
        let (a, b) = (raw(&self.first), raw(&self.second));
        let norm = |x: [f64; 5]| -> Vec<f64> {
            (0..5)
                .map(|k| {
                    let m = a[k].max(b[k]);
                    if m > 0.0 {
                        x[k] / m
                    } else {
                        0.0
                    }
                })
                .collect()
        };
        let (la, lb) = (self.first.model.to_string(), self.second.model.to_string());
        radar(
            "Model comparison (smaller is better)",
            &SUMMARY_MEASURES,
            &[(&la, norm(a), PALETTE[1]), (&lb, norm(b), PALETTE[2])],
        )
    }
}

pub const SUMMARY_MEASURES: [&str; 5] = [
    "overall_rmse_V",
    "low_soc_rmse_V",
    "low_temp_rmse_V",
    "step_time_ms",
    "parameter_count",
];

/// Measured and simulated voltage of one dataset.
pub struct Overlay {
    pub id: String,
    pub time_s: Vec<f64>,
    pub measured: Vec<f64>,
    pub first: Vec<f64>,
    pub second: Vec<f64>,
}

impl Overlay {
    pub fn svg(&self, first: ModelKind, second: ModelKind) -> String {
        let (fa, fb) = (first.to_string(), second.to_string());
        let t = &self.time_s;
        line_plot(
            &format!("{}: terminal voltage", self.id),
            "time (s)",
            "voltage (V)",
            &[
                Line { label: "measured", x: t, y: &self.measured, color: PALETTE[0] },
                Line { label: &fa, x: &t[..self.first.len()], y: &self.first, color: PALETTE[1] },
                Line { label: &fb, x: &t[..self.second.len()], y: &self.second, color: PALETTE[2] },
            ],
            1500,
        )
    }
}

pub struct Comparison {
    pub report: ComparisonReport,
    pub overlays: Vec<Overlay>,
}

/// Validates both models on `datasets` and joins the results.
/// `step_time_ms` holds each model's benchmarked time per step.
pub fn compare(first: &CellModel, second: &CellModel, datasets: &[Dataset], step_time_ms: [f64; 2]) -> Result<Comparison> {
    let (ra, _) = validate_any(first, datasets)?;
    let (rb, _) = validate_any(second, datasets)?;
    let report = ComparisonReport::from_reports((first, &ra, step_time_ms[0]), (second, &rb, step_time_ms[1]))?;
    let mut overlays = Vec::with_capacity(datasets.len());
    for d in datasets {
        overlays.push(Overlay {
            id: d.id.clone(),
            time_s: d.series.time_s.clone(),
            measured: d.series.voltage_v.clone(),
            first: first.simulate_dataset(d, false)?.voltage,
            second: second.simulate_dataset(d, false)?.voltage,
        });
    }
    Ok(Comparison { report, overlays })
}

/// Writes `report.json`, `summary.csv`, `per_dataset.csv`, `radar.svg` and
/// `plots/<id>.svg` under `dir`.
pub fn write_comparison(dir: &Path, c: &Comparison) -> Result<()> {
    std::fs::create_dir_all(dir.join("plots"))?;
    serde_json::to_writer_pretty(std::fs::File::create(dir.join("report.json"))?, &c.report)?;
    c.report.write_summary_csv(std::fs::File::create(dir.join("summary.csv"))?)?;
    c.report.write_per_dataset_csv(std::fs::File::create(dir.join("per_dataset.csv"))?)?;
    std::fs::write(dir.join("radar.svg"), c.report.radar_svg())?;
    for o in &c.overlays {
        std::fs::write(
            dir.join("plots").join(format!("{}.svg", o.id)),
            o.svg(c.report.first.model, c.report.second.model),
        )?;
    }
    Ok(())
}
