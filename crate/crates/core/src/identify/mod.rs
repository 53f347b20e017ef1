//! Parameter identification: bounded search spaces, the particle swarm, the
//! multi-dataset RMSE cost, calibration and validation reports.

pub mod calibrate;
pub mod cost;
pub mod pso;
pub mod space;
pub mod validate;

pub use calibrate::{calibrate, IdentificationResult};
pub use cost::{cost, rmse, CostBreakdown, DatasetCost};
pub use pso::{run_pso, PsoConfig, PsoOutcome};
pub use space::{ecm_space, pbm_space, BoundWidths, Scale, SearchSpace};
pub use validate::{validate, validate_any, DatasetReport, ValidationReport};
