//! A calibrated cell model of either kind, and simulation results.

use std::io::Write;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::domain::curves::invert_monotone;
use crate::domain::{CellSpec, Dataset, EcmParams, PbmParams, TimeSeries};
use crate::ecm::simulate_ecm;
use crate::error::{Error, Result, Violation};
use crate::hysteresis::HysteresisParams;
use crate::pbm::PbmEngine;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ModelKind {
    Pbm,
    Ecm,
}

impl FromStr for ModelKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "pbm" => Ok(ModelKind::Pbm),
            "ecm" => Ok(ModelKind::Ecm),
            other => Err(Error::InvalidInput(format!("unknown model kind `{other}`"))),
        }
    }
}

impl std::fmt::Display for ModelKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            ModelKind::Pbm => "pbm",
            ModelKind::Ecm => "ecm",
        })
    }
}

/// Where and why a simulation stopped early.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Abort {
    pub step: usize,
    pub violation: Violation,
}

/// Per-step diagnostic table with a fixed column order.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Diagnostics {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl Diagnostics {
    pub fn new(columns: Vec<String>) -> Self {
        Self {
            columns,
            rows: Vec::new(),
        }
    }

    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let j = self.columns.iter().position(|c| c == name)?;
        Some(self.rows.iter().map(|r| r[j]).collect())
    }

    pub fn write_csv(&self, w: impl Write) -> Result<()> {
        let mut wr = csv::Writer::from_writer(w);
        wr.write_record(&self.columns)?;
        for r in &self.rows {
            wr.write_record(r.iter().map(|v| format!("{v:e}")))?;
        }
        wr.flush()?;
        Ok(())
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        self.write_csv(std::fs::File::create(path)?)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let mut rd = csv::Reader::from_path(path)?;
        let columns = rd.headers()?.iter().map(str::to_string).collect();
        let mut rows = Vec::new();
        for rec in rd.records() {
            let rec = rec?;
            let row = rec
                .iter()
                .map(|s| s.parse::<f64>().map_err(|e| Error::InvalidInput(format!("{}: {e}", path.display()))))
                .collect::<Result<Vec<_>>>()?;
            rows.push(row);
        }
        Ok(Self { columns, rows })
    }
}

/// Simulated voltage for the completed prefix of a profile.
#[derive(Clone, Debug, PartialEq)]
pub struct Simulation {
    pub voltage: Vec<f64>,
    pub abort: Option<Abort>,
    pub diagnostics: Option<Diagnostics>,
}

impl Simulation {
    pub fn completed(&self) -> usize {
        self.voltage.len()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "model", content = "params", rename_all = "lowercase")]
pub enum ModelParams {
    Pbm(PbmParams),
    Ecm(EcmParams),
}

/// A complete model document: cell nameplate, hysteresis and the
/// model-specific parameters. This is the persisted JSON form.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CellModel {
    pub cell: CellSpec,
    pub hysteresis: HysteresisParams,
    #[serde(flatten)]
    pub params: ModelParams,
}

impl CellModel {
    pub fn pbm(cell: CellSpec, hysteresis: HysteresisParams, params: PbmParams) -> Self {
        Self {
            cell,
            hysteresis,
            params: ModelParams::Pbm(params),
        }
    }

    pub fn ecm(cell: CellSpec, hysteresis: HysteresisParams, params: EcmParams) -> Self {
        Self {
            cell,
            hysteresis,
            params: ModelParams::Ecm(params),
        }
    }

    pub fn kind(&self) -> ModelKind {
        match self.params {
            ModelParams::Pbm(_) => ModelKind::Pbm,
            ModelParams::Ecm(_) => ModelKind::Ecm,
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.cell.validate()?;
        self.hysteresis.validate()?;
        match &self.params {
            ModelParams::Pbm(p) => p.validate(),
            ModelParams::Ecm(p) => p.validate(),
        }
    }

    pub fn load(path: &Path) -> Result<Self> {
        let m: Self = serde_json::from_reader(std::io::BufReader::new(std::fs::File::open(path)?))?;
        m.validate()?;
        Ok(m)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        serde_json::to_writer_pretty(std::fs::File::create(path)?, self)?;
        Ok(())
    }

    /// Number of tunable entries: 72 for the physics model, 330 for the circuit.
    pub fn parameter_count(&self) -> usize {
        self.identification_vector().len()
    }

    pub fn identification_vector(&self) -> Vec<f64> {
        match &self.params {
            ModelParams::Pbm(p) => p.identification_vector(),
            ModelParams::Ecm(p) => p.identification_vector(),
        }
    }

    pub fn with_identification_vector(&self, v: &[f64]) -> Result<Self> {
        let params = match &self.params {
            ModelParams::Pbm(p) => ModelParams::Pbm(p.with_identification_vector(v)?),
            ModelParams::Ecm(p) => ModelParams::Ecm(p.with_identification_vector(v)?),
        };
        Ok(Self {
            params,
            ..self.clone()
        })
    }

    pub fn parameter_names(&self) -> Vec<String> {
        match self.params {
            ModelParams::Pbm(_) => PbmParams::parameter_names(),
            ModelParams::Ecm(_) => EcmParams::parameter_names(),
        }
    }

    /// Open-circuit voltage without hysteresis.
    pub fn open_circuit_voltage(&self, soc: f64, temp_c: f64) -> f64 {
        match &self.params {
            ModelParams::Pbm(p) => {
                let (tp, tn) = p.stoichiometry_at_soc(soc);
                p.ocp_pos.eval(tp) - p.ocp_neg.eval(tn)
            }
            ModelParams::Ecm(p) => p.ocv.eval(soc, temp_c),
        }
    }

    /// Initial SOC of a dataset: the declared value, else the first voltage
    /// sample inverted through the open-circuit curve.
    pub fn initial_soc(&self, dataset: &Dataset) -> f64 {
        dataset.initial_soc.unwrap_or_else(|| {
            let s = &dataset.series;
            invert_monotone(
                |soc| self.open_circuit_voltage(soc, s.temperature_c[0]),
                s.voltage_v[0],
                0.0,
                1.0,
            )
        })
    }

    pub fn simulate(&self, profile: &TimeSeries, soc0: f64, record: bool) -> Result<Simulation> {
        match &self.params {
            ModelParams::Pbm(p) => PbmEngine::new_unchecked(p.clone(), self.hysteresis.clone(), self.cell.clone())
                .simulate(profile, soc0, record),
            ModelParams::Ecm(p) => simulate_ecm(p, &self.cell, &self.hysteresis, profile, soc0, record),
        }
    }

    pub fn simulate_dataset(&self, dataset: &Dataset, record: bool) -> Result<Simulation> {
        self.simulate(&dataset.series, self.initial_soc(dataset), record)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::reference;

    #[test]
    fn parameter_counts() {
        let spec = reference::cell_spec();
        let h = reference::hysteresis_params();
        assert_eq!(CellModel::pbm(spec.clone(), h.clone(), reference::pbm_params()).parameter_count(), 72);
        assert_eq!(CellModel::ecm(spec, h, reference::ecm_params()).parameter_count(), 330);
    }

    #[test]
    fn document_round_trips_through_json() {
        let m = CellModel::ecm(reference::cell_spec(), reference::hysteresis_params(), reference::ecm_params());
        let s = serde_json::to_string(&m).unwrap();
        assert!(s.contains("\"model\":\"ecm\""));
        let back: CellModel = serde_json::from_str(&s).unwrap();
        assert_eq!(back, m);
    }

    #[test]
    fn model_kind_parses() {
        assert_eq!("PBM".parse::<ModelKind>().unwrap(), ModelKind::Pbm);
        assert!("spm".parse::<ModelKind>().is_err());
    }
}
