//! Run configurations of the command-line workflows. Each is a JSON object
//! with a `schema_version`; relative paths resolve against the directory of
//! the configuration file.

use std::path::{Path, PathBuf};

use serde::{de::DeserializeOwned, Deserialize, Serialize};

use crate::characterization::PlettFitConfig;
use crate::domain::Role;
use crate::error::{Error, Result};
use crate::identify::{ecm_space, pbm_space, BoundWidths, PsoConfig, SearchSpace};
use crate::model::{CellModel, ModelKind, ModelParams};
use crate::reference;

use super::synth::SynthPlan;

pub const RUN_CONFIG_SCHEMA_VERSION: u32 = 1;

/// Default multiplicative half-width of circuit-model bounds.
pub const ECM_BOUND_FACTOR: f64 = 1.5;

/// Built-in models of the reference cell.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ReferenceModel {
    PbmTruth,
    PbmNominal,
    EcmTruth,
    EcmNominal,
}

impl ReferenceModel {
    pub fn build(self) -> CellModel {
        let (spec, h) = (reference::cell_spec(), reference::hysteresis_params());
        match self {
            ReferenceModel::PbmTruth => CellModel::pbm(spec, h, reference::pbm_params()),
            ReferenceModel::PbmNominal => CellModel::pbm(spec, h, reference::pbm_nominal()),
            ReferenceModel::EcmTruth => CellModel::ecm(spec, h, reference::ecm_params()),
            ReferenceModel::EcmNominal => CellModel::ecm(spec, h, reference::ecm_nominal()),
        }
    }

    pub fn nominal(kind: ModelKind) -> Self {
        match kind {
            ModelKind::Pbm => ReferenceModel::PbmNominal,
            ModelKind::Ecm => ReferenceModel::EcmNominal,
        }
    }
}

/// `{"file": "model.json"}` or `{"reference": "pbm_truth"}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModelSource {
    File(PathBuf),
    Reference(ReferenceModel),
}

impl ModelSource {
    pub fn load(&self, base: &Path) -> Result<CellModel> {
        match self {
            ModelSource::File(p) => CellModel::load(&base.join(p)),
            ModelSource::Reference(r) => Ok(r.build()),
        }
    }
}

/// Synthetic plan: one of the built-in plans or an explicit one.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PlanSource {
    Standard { noise_sigma_v: f64, seed: u64 },
    RoundTrip { noise_sigma_v: f64, seed: u64 },
    Characterization { temps_c: Vec<f64>, noise_sigma_v: f64, seed: u64 },
    Custom(SynthPlan),
}

impl PlanSource {
    pub fn plan(&self) -> SynthPlan {
        match self {
            PlanSource::Standard { noise_sigma_v, seed } => SynthPlan::standard(*noise_sigma_v, *seed),
            PlanSource::RoundTrip { noise_sigma_v, seed } => SynthPlan::round_trip(*noise_sigma_v, *seed),
            PlanSource::Characterization {
                temps_c,
                noise_sigma_v,
                seed,
            } => SynthPlan::characterization(temps_c, *noise_sigma_v, *seed),
            PlanSource::Custom(p) => p.clone(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IngestConfig {
    pub schema_version: u32,
    pub manifest: PathBuf,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SynthConfig {
    pub schema_version: u32,
    pub truth: ModelSource,
    pub plan: PlanSource,
}

fn default_soc_grid() -> Vec<f64> {
    (1..=9).map(|k| k as f64 / 10.0).collect()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FitHysteresisConfig {
    pub schema_version: u32,
    pub manifest: PathBuf,
    /// Pulse tests the map is built from.
    pub map_datasets: Vec<String>,
    /// Tests the hysteresis parameters are fitted to; the map tests when
    /// empty.
    #[serde(default)]
    pub fit_datasets: Vec<String>,
    #[serde(default = "default_soc_grid")]
    pub soc_grid: Vec<f64>,
    #[serde(default)]
    pub plett: PlettFitConfig,
    /// Model that receives the fitted hysteresis, if any.
    #[serde(default)]
    pub model: Option<ModelSource>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CalibrateConfig {
    pub schema_version: u32,
    pub manifest: PathBuf,
    /// Starting point and fixed structure; the nominal reference model of
    /// the requested kind when absent.
    #[serde(default)]
    pub base_model: Option<ModelSource>,
    /// Search-space JSON; default bounds around the base model when absent.
    #[serde(default)]
    pub bounds: Option<PathBuf>,
    #[serde(default)]
    pub pbm_widths: BoundWidths,
    #[serde(default = "default_ecm_factor")]
    pub ecm_factor: f64,
    #[serde(default)]
    pub pso: PsoConfig,
}

fn default_ecm_factor() -> f64 {
    ECM_BOUND_FACTOR
}

impl CalibrateConfig {
    pub fn base_model(&self, base: &Path, kind: ModelKind) -> Result<CellModel> {
        let m = match &self.base_model {
            Some(src) => src.load(base)?,
            None => ReferenceModel::nominal(kind).build(),
        };
        if m.kind() != kind {
            return Err(Error::Mismatch(format!("base model is {}, {kind} was requested", m.kind())));
        }
        Ok(m)
    }

    pub fn search_space(&self, base: &Path, model: &CellModel) -> Result<SearchSpace> {
        let space = match (&self.bounds, &model.params) {
            (Some(p), _) => SearchSpace::load(&base.join(p))?,
            (None, ModelParams::Pbm(p)) => pbm_space(p, self.pbm_widths),
            (None, ModelParams::Ecm(p)) => ecm_space(p, self.ecm_factor),
        };
        if space.names != model.parameter_names() {
            return Err(Error::Mismatch("search-space names do not match the model's parameters".into()));
        }
        Ok(space)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ValidateConfig {
    pub schema_version: u32,
    pub manifest: PathBuf,
    pub model: ModelSource,
}

fn default_bench_steps() -> usize {
    super::bench::MIN_BENCH_STEPS
}

fn default_compare_role() -> Role {
    Role::Validation
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CompareConfig {
    pub schema_version: u32,
    pub manifest: PathBuf,
    pub pbm_model: ModelSource,
    pub ecm_model: ModelSource,
    /// Datasets of this role are compared.
    #[serde(default = "default_compare_role")]
    pub role: Role,
    #[serde(default = "default_bench_steps")]
    pub bench_steps: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BenchConfig {
    pub schema_version: u32,
    pub models: Vec<ModelSource>,
    #[serde(default = "default_bench_steps")]
    pub steps: usize,
}

/// Reads a run configuration and checks its schema version. Returns it with
/// the directory its relative paths resolve against.
pub fn load_config<T: DeserializeOwned>(path: &Path) -> Result<(T, PathBuf)> {
    let text = std::fs::read_to_string(path)?;
    let v: serde_json::Value = serde_json::from_str(&text)?;
    match v.get("schema_version").and_then(|x| x.as_u64()) {
        Some(n) if n == RUN_CONFIG_SCHEMA_VERSION as u64 => {}
        other => {
            return Err(Error::InvalidInput(format!(
                "run configuration schema_version {other:?} unsupported (supported: {RUN_CONFIG_SCHEMA_VERSION})"
            )))
        }
    }
    let cfg = serde_json::from_value(v)?;
    let base = path.parent().map(Path::to_path_buf).unwrap_or_default();
    Ok((cfg, base))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_minimal_and_rejects_unknown_fields() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("c.json");
        std::fs::write(&p, r#"{"schema_version": 1, "manifest": "m.json", "model": {"reference": "ecm_truth"}}"#).unwrap();
        let (c, base): (ValidateConfig, _) = load_config(&p).unwrap();
        assert_eq!(base, dir.path());
        assert_eq!(c.model.load(&base).unwrap().kind(), ModelKind::Ecm);
        std::fs::write(&p, r#"{"schema_version": 1, "manifest": "m.json", "model": {"reference": "ecm_truth"}, "x": 1}"#).unwrap();
        assert!(load_config::<ValidateConfig>(&p).is_err());
        std::fs::write(&p, r#"{"schema_version": 2, "manifest": "m.json", "model": {"reference": "ecm_truth"}}"#).unwrap();
        assert!(load_config::<ValidateConfig>(&p).unwrap_err().is_validation());
    }

    #[test]
    fn calibrate_defaults_follow_the_requested_kind() {
        let c: CalibrateConfig = serde_json::from_str(r#"{"schema_version": 1, "manifest": "m.json"}"#).unwrap();
        let m = c.base_model(Path::new("."), ModelKind::Pbm).unwrap();
        assert_eq!(c.search_space(Path::new("."), &m).unwrap().dim(), 72);
        let m = c.base_model(Path::new("."), ModelKind::Ecm).unwrap();
        assert_eq!(c.search_space(Path::new("."), &m).unwrap().dim(), 330);
        assert_eq!(c.pso, PsoConfig::default());
    }
}
