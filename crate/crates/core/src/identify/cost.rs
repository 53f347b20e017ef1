//! Multi-dataset voltage cost: the sum of per-dataset RMSEs.

use serde::{Deserialize, Serialize};

use crate::domain::Dataset;
use crate::error::{Error, Result};
use crate::model::{CellModel, Simulation};

/// Added per sample a simulation failed to reach (V).
pub const MISSING_SAMPLE_PENALTY_V: f64 = 1e-3;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DatasetCost {
    pub id: String,
    /// RMSE over completed samples plus the missing-sample penalty (V).
    pub cost: f64,
    pub rmse: f64,
    pub samples: usize,
    pub completed: usize,
    pub abort_step: Option<usize>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CostBreakdown {
    pub total: f64,
    pub per_dataset: Vec<DatasetCost>,
}

pub fn rmse(a: &[f64], b: &[f64]) -> f64 {
    let n = a.len().min(b.len());
    if n == 0 {
        return 0.0;
    }
    (a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>() / n as f64).sqrt()
}

/// Scores one simulation against the measured voltage.
pub fn dataset_cost(id: &str, measured: &[f64], sim: &Simulation) -> DatasetCost {
    let completed = sim.completed().min(measured.len());
    let r = rmse(&sim.voltage[..completed], &measured[..completed]);
    let missing = measured.len() - completed;
    DatasetCost {
        id: id.to_string(),
        cost: r + MISSING_SAMPLE_PENALTY_V * missing as f64,
        rmse: r,
        samples: measured.len(),
        completed,
        abort_step: sim.abort.as_ref().map(|a| a.step),
    }
}

/// `Σ_i RMSE_i` over `datasets`. Fails when every simulation aborts early.
pub fn cost(model: &CellModel, datasets: &[Dataset]) -> Result<CostBreakdown> {
    if datasets.is_empty() {
        return Err(Error::InvalidInput("cost needs at least one dataset".into()));
    }
    let mut per_dataset = Vec::with_capacity(datasets.len());
    for d in datasets {
        let sim = model.simulate_dataset(d, false)?;
        per_dataset.push(dataset_cost(&d.id, &d.series.voltage_v, &sim));
    }
    if per_dataset.iter().all(|c| c.abort_step.is_some()) {
        return Err(Error::AllDatasetsAborted);
    }
    let total = per_dataset.iter().map(|c| c.cost).sum();
    Ok(CostBreakdown { total, per_dataset })
}

/// Worst possible score: every sample of every dataset missing, plus one volt.
pub fn max_penalty(datasets: &[Dataset]) -> f64 {
    1.0 + datasets
        .iter()
        .map(|d| MISSING_SAMPLE_PENALTY_V * d.series.len() as f64)
        .sum::<f64>()
}
