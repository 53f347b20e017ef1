//! Calibration: the multi-dataset cost wired into the swarm.

use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::domain::{Dataset, Role};
use crate::error::{Error, Result};
use crate::model::{CellModel, ModelKind};

use super::cost::{cost, max_penalty, DatasetCost};
use super::pso::{run_pso, PsoConfig};
use super::space::SearchSpace;

pub const RESULT_SCHEMA_VERSION: u32 = 1;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IdentificationResult {
    pub schema_version: u32,
    pub model: ModelKind,
    pub names: Vec<String>,
    pub best_params: Vec<f64>,
    /// Sum of per-dataset RMSEs at `best_params` (V).
    pub best_cost: f64,
    pub per_dataset: Vec<DatasetCost>,
    /// Best cost after initialization and after each iteration (V).
    pub history: Vec<f64>,
    pub converged: bool,
    pub evaluations: usize,
    pub wall_time_s: f64,
    pub config: PsoConfig,
}

impl IdentificationResult {
    /// Writes `result.json` and `history.csv` into `dir`.
    pub fn save(&self, dir: &Path) -> Result<()> {
        std::fs::create_dir_all(dir)?;
        serde_json::to_writer_pretty(std::fs::File::create(dir.join("result.json"))?, self)?;
        let mut f = std::io::BufWriter::new(std::fs::File::create(dir.join("history.csv"))?);
        writeln!(f, "iteration,best_cost_V")?;
        for (k, c) in self.history.iter().enumerate() {
            writeln!(f, "{k},{c:e}")?;
        }
        f.flush()?;
        Ok(())
    }
}

/// Identifies the free parameters of `base` against `datasets`. Candidates
/// that fail validation or abort on every dataset score the maximum penalty.
/// Returns the calibrated model together with the run record.
pub fn calibrate(
    base: &CellModel,
    datasets: &[Dataset],
    space: &SearchSpace,
    config: &PsoConfig,
) -> Result<(CellModel, IdentificationResult)> {
    if datasets.is_empty() {
        return Err(Error::InvalidInput("calibration needs at least one dataset".into()));
    }
    if let Some(d) = datasets.iter().find(|d| d.role != Role::Calibration) {
        return Err(Error::InvalidInput(format!("dataset `{}` is not a calibration dataset", d.id)));
    }
    if space.dim() != base.parameter_count() {
        return Err(Error::Mismatch(format!(
            "search space has {} dimensions, model has {} parameters",
            space.dim(),
            base.parameter_count()
        )));
    }
    let worst = max_penalty(datasets);
    let objective = |v: &[f64]| -> f64 {
        let Ok(m) = base.with_identification_vector(v) else {
            return worst;
        };
        if m.validate().is_err() {
            return worst;
        }
        cost(&m, datasets).map(|c| c.total).unwrap_or(worst)
    };
    let out = run_pso(space, config, objective)?;
    let model = base.with_identification_vector(&out.best_params)?;
    let breakdown = cost(&model, datasets)?;
    let result = IdentificationResult {
        schema_version: RESULT_SCHEMA_VERSION,
        model: base.kind(),
        names: space.names.clone(),
        best_params: out.best_params,
        best_cost: breakdown.total,
        per_dataset: breakdown.per_dataset,
        history: out.history,
        converged: out.converged,
        evaluations: out.evaluations,
        wall_time_s: out.wall_time_s,
        config: config.clone(),
    };
    Ok((model, result))
}
