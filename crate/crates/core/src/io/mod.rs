//! File formats and the user-facing workflows built on them: ingestion,
//! synthetic corpora, benchmarks and model comparison.

pub mod bench;
pub mod compare;
pub mod config;
pub mod data;
pub mod manifest;
pub mod svg;
pub mod synth;

pub use bench::{benchmark_step_time, BenchResult};
pub use compare::{compare, write_comparison, Comparison, ComparisonReport, ModelSummary};
pub use data::{load_series, read_series, save_series, write_series, DATA_COLUMNS};
pub use manifest::{ingest, FileError, IngestReport, Ingested, Manifest, ManifestEntry, RoleCounts, MANIFEST_SCHEMA_VERSION};
pub use synth::{generate_synthetic, write_corpus, DriveCycle, ProfileShape, ProfileSpec, SynthOutput, SynthPlan};
