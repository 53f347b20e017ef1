//! Dataset manifest and ingestion.
//!
//! ```json
//! {
//!   "schema_version": 1,
//!   "cell_spec": "cell.json",
//!   "datasets": [
//!     {"id": "udds_25C", "file": "data/udds_25C.csv", "role": "calibration",
//!      "ambient_temp_c": 25.0, "profile_kind": "drive_cycle", "initial_soc": 0.9}
//!   ]
//! }
//! ```
//!
//! Paths are relative to the manifest's directory.

use std::collections::HashSet;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::domain::{CellSpec, Dataset, ProfileKind, Role};
use crate::error::{Error, Result};

use super::data::load_series;

pub const MANIFEST_SCHEMA_VERSION: u32 = 1;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ManifestEntry {
    pub id: String,
    pub file: PathBuf,
    pub role: Role,
    pub ambient_temp_c: f64,
    pub profile_kind: ProfileKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub initial_soc: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub schema_version: u32,
    /// Cell specification JSON, if the data come with one.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cell_spec: Option<PathBuf>,
    pub datasets: Vec<ManifestEntry>,
}

impl Manifest {
    pub fn validate(&self) -> Result<()> {
        if self.schema_version != MANIFEST_SCHEMA_VERSION {
            return Err(Error::InvalidInput(format!(
                "unsupported manifest schema version {} (supported: {MANIFEST_SCHEMA_VERSION})",
                self.schema_version
            )));
        }
        let mut seen = HashSet::new();
        for e in &self.datasets {
            if !seen.insert(e.id.as_str()) {
                return Err(Error::InvalidInput(format!("duplicate dataset id `{}`", e.id)));
            }
            if let Some(s) = e.initial_soc {
                if !(0.0..=1.0).contains(&s) {
                    return Err(Error::InvalidInput(format!("dataset `{}`: initial_soc {s} outside [0, 1]", e.id)));
                }
            }
        }
        Ok(())
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

    pub fn role_counts(&self) -> RoleCounts {
        RoleCounts::of(self.datasets.iter().map(|e| e.role))
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct RoleCounts {
    pub calibration: usize,
    pub validation: usize,
}

impl RoleCounts {
    pub fn of(roles: impl Iterator<Item = Role>) -> Self {
        let mut c = Self::default();
        for r in roles {
            match r {
                Role::Calibration => c.calibration += 1,
                Role::Validation => c.validation += 1,
            }
        }
        c
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FileError {
    pub id: String,
    pub file: PathBuf,
    pub reason: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IngestReport {
    /// Role counts as declared by the manifest.
    pub declared: RoleCounts,
    /// Role counts of the files that loaded.
    pub loaded: RoleCounts,
    pub errors: Vec<FileError>,
}

pub struct Ingested {
    pub datasets: Vec<Dataset>,
    pub cell_spec: Option<CellSpec>,
    pub report: IngestReport,
}

/// Loads every dataset of the manifest at `path`. A malformed manifest or
/// cell spec is fatal; a malformed data file is skipped and reported.
/// Nothing is written.
pub fn ingest(path: &Path) -> Result<Ingested> {
    let manifest = Manifest::load(path)?;
    let dir = path.parent().unwrap_or(Path::new("."));
    let cell_spec = match &manifest.cell_spec {
        Some(p) => {
            let spec: CellSpec = serde_json::from_reader(std::io::BufReader::new(std::fs::File::open(dir.join(p))?))?;
            spec.validate()?;
            Some(spec)
        }
        None => None,
    };
    let mut datasets = Vec::new();
    let mut errors = Vec::new();
    for e in &manifest.datasets {
        match load_series(&dir.join(&e.file)) {
            Ok(series) => datasets.push(Dataset {
                id: e.id.clone(),
                role: e.role,
                ambient_temp_c: e.ambient_temp_c,
                profile_kind: e.profile_kind,
                initial_soc: e.initial_soc,
                series,
            }),
            Err(err) => errors.push(FileError {
                id: e.id.clone(),
                file: e.file.clone(),
                reason: err.to_string(),
            }),
        }
    }
    let report = IngestReport {
        declared: manifest.role_counts(),
        loaded: RoleCounts::of(datasets.iter().map(|d| d.role)),
        errors,
    };
    Ok(Ingested {
        datasets,
        cell_spec,
        report,
    })
}
