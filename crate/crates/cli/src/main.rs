//! `cellkit`: characterization, calibration, validation and comparison of
//! the physics-based and equivalent-circuit cell models.
//!
//! Every subcommand reads a JSON run configuration (`--config`) and writes
//! its outputs under `--out`. Exit status is 0 on success, 2 when the input
//! is invalid and 1 on any other failure.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use cellkit::characterization::{build_hysteresis_map, fit_plett};
use cellkit::domain::{CellSpec, Dataset, Role};
use cellkit::identify::{calibrate, validate, validate_any};
use cellkit::io::config::{
    load_config, BenchConfig, CalibrateConfig, CompareConfig, FitHysteresisConfig, IngestConfig, SynthConfig, ValidateConfig,
};
use cellkit::io::{benchmark_step_time, compare, generate_synthetic, ingest, write_comparison, write_corpus, BenchResult, Ingested};
use cellkit::model::{CellModel, ModelKind};
use cellkit::{reference, Error};

#[derive(Parser)]
#[command(name = "cellkit", version, about = "Battery model characterization, calibration and comparison")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Io {
    /// Run configuration (JSON).
    #[arg(long)]
    config: PathBuf,
    /// Output directory; created if missing.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Subcommand)]
enum Command {
    /// Load and check the datasets of a manifest.
    Ingest(Io),
    /// Generate a synthetic corpus from a truth model.
    Synth(Io),
    /// Build the OCV/hysteresis map from pulse tests and fit the hysteresis model.
    FitHysteresis(Io),
    /// Identify model parameters on the calibration datasets.
    Calibrate {
        #[arg(long)]
        model: ModelKind,
        #[command(flatten)]
        io: Io,
    },
    /// Report a model's accuracy on the validation datasets.
    Validate {
        #[arg(long)]
        model: ModelKind,
        #[command(flatten)]
        io: Io,
    },
    /// Compare a physics-based and a circuit model side by side.
    Compare(Io),
    /// Time single model steps.
    Bench(Io),
}

/// Outcome of a command that ran to completion but found invalid input.
struct Rejected;

fn write_json(path: &Path, value: &impl Serialize) -> Result<()> {
    let f = std::fs::File::create(path).with_context(|| format!("creating {}", path.display()))?;
    serde_json::to_writer_pretty(std::io::BufWriter::new(f), value)?;
    Ok(())
}

fn load_manifest(base: &Path, manifest: &Path) -> Result<Ingested> {
    let path = base.join(manifest);
    let ing = ingest(&path).with_context(|| format!("ingesting {}", path.display()))?;
    for e in &ing.report.errors {
        eprintln!("warning: skipped `{}` ({}): {}", e.id, e.file.display(), e.reason);
    }
    Ok(ing)
}

fn with_role(datasets: Vec<Dataset>, role: Role) -> Result<Vec<Dataset>> {
    let v: Vec<Dataset> = datasets.into_iter().filter(|d| d.role == role).collect();
    if v.is_empty() {
        return Err(Error::InvalidInput(format!("manifest has no loadable {role:?} datasets")).into());
    }
    Ok(v)
}

fn pick(datasets: &[Dataset], ids: &[String]) -> Result<Vec<Dataset>> {
    ids.iter()
        .map(|id| {
            datasets
                .iter()
                .find(|d| &d.id == id)
                .cloned()
                .ok_or_else(|| Error::InvalidInput(format!("dataset `{id}` not found in manifest")).into())
        })
        .collect()
}

fn check_kind(model: &CellModel, kind: ModelKind) -> Result<()> {
    if model.kind() != kind {
        return Err(Error::Mismatch(format!("model file holds a {} model, --model {kind} was given", model.kind())).into());
    }
    Ok(())
}

fn run_ingest(io: &Io) -> Result<Option<Rejected>> {
    let (cfg, base): (IngestConfig, _) = load_config(&io.config)?;
    let ing = load_manifest(&base, &cfg.manifest)?;
    write_json(&io.out.join("ingest_report.json"), &ing.report)?;
    let r = &ing.report;
    println!(
        "declared {} calibration + {} validation; loaded {} + {}; {} rejected",
        r.declared.calibration,
        r.declared.validation,
        r.loaded.calibration,
        r.loaded.validation,
        r.errors.len()
    );
    Ok((!r.errors.is_empty()).then_some(Rejected))
}

#[derive(Serialize)]
struct SynthSummary {
    datasets: Vec<SynthEntry>,
}

#[derive(Serialize)]
struct SynthEntry {
    id: String,
    samples: usize,
    cutoff_sample: Option<usize>,
}

fn run_synth(io: &Io) -> Result<Option<Rejected>> {
    let (cfg, base): (SynthConfig, _) = load_config(&io.config)?;
    let truth = cfg.truth.load(&base)?;
    let out = generate_synthetic(&truth, &cfg.plan.plan())?;
    write_corpus(&io.out, &out.datasets, &truth)?;
    let summary = SynthSummary {
        datasets: out
            .datasets
            .iter()
            .zip(&out.cutoffs)
            .map(|(d, c)| SynthEntry {
                id: d.id.clone(),
                samples: d.series.len(),
                cutoff_sample: *c,
            })
            .collect(),
    };
    write_json(&io.out.join("synth_summary.json"), &summary)?;
    println!("wrote {} datasets from a {} truth model", out.datasets.len(), truth.kind());
    Ok(None)
}

fn run_fit_hysteresis(io: &Io) -> Result<Option<Rejected>> {
    let (cfg, base): (FitHysteresisConfig, _) = load_config(&io.config)?;
    let ing = load_manifest(&base, &cfg.manifest)?;
    let model = cfg.model.as_ref().map(|m| m.load(&base)).transpose()?;
    let spec: CellSpec = ing
        .cell_spec
        .clone()
        .or_else(|| model.as_ref().map(|m| m.cell.clone()))
        .unwrap_or_else(reference::cell_spec);
    let map_tests = pick(&ing.datasets, &cfg.map_datasets)?;
    let fit_tests = if cfg.fit_datasets.is_empty() {
        map_tests.clone()
    } else {
        pick(&ing.datasets, &cfg.fit_datasets)?
    };
    let map = build_hysteresis_map(&map_tests, &spec, &cfg.soc_grid)?;
    for m in &map.missing {
        eprintln!("warning: map node soc={} T={} °C lacks a rest; filled from its neighbour", m.soc, m.temp_c);
    }
    map.save_csv(&io.out.join("hysteresis_map.csv"))?;
    let fit = fit_plett(&fit_tests, &map, &spec, &cfg.plett)?;
    write_json(&io.out.join("hysteresis_fit.json"), &fit)?;
    write_json(&io.out.join("hysteresis.json"), &fit.params)?;
    if let Some(mut m) = model {
        m.hysteresis = fit.params.clone();
        m.save(&io.out.join("model.json"))?;
    }
    println!(
        "{} rests, RMSE {:.3} mV, gamma {:.3}{}",
        fit.rest_points,
        fit.rmse_v * 1e3,
        fit.params.gamma,
        if fit.gamma_identifiable { "" } else { " (unidentifiable)" }
    );
    Ok(None)
}

fn run_calibrate(kind: ModelKind, io: &Io) -> Result<Option<Rejected>> {
    let (cfg, base): (CalibrateConfig, _) = load_config(&io.config)?;
    let ing = load_manifest(&base, &cfg.manifest)?;
    let datasets = with_role(ing.datasets, Role::Calibration)?;
    let model = cfg.base_model(&base, kind)?;
    let space = cfg.search_space(&base, &model)?;
    write_json(&io.out.join("search_space.json"), &space)?;
    let (fitted, result) = calibrate(&model, &datasets, &space, &cfg.pso)?;
    result.save(&io.out)?;
    fitted.save(&io.out.join("model.json"))?;
    let (fit_report, _) = validate_any(&fitted, &datasets)?;
    write_json(&io.out.join("calibration_fit.json"), &fit_report)?;
    println!(
        "{kind}: cost {:.3} mV over {} datasets, {} evaluations in {:.1} s{}",
        result.best_cost * 1e3,
        datasets.len(),
        result.evaluations,
        result.wall_time_s,
        if result.converged { "" } else { " (no improvement on the initial swarm)" }
    );
    Ok(None)
}

fn run_validate(kind: ModelKind, io: &Io) -> Result<Option<Rejected>> {
    let (cfg, base): (ValidateConfig, _) = load_config(&io.config)?;
    let ing = load_manifest(&base, &cfg.manifest)?;
    let datasets = with_role(ing.datasets, Role::Validation)?;
    let model = cfg.model.load(&base)?;
    check_kind(&model, kind)?;
    let (report, diagnostics) = validate(&model, &datasets)?;
    write_json(&io.out.join("validation.json"), &report)?;
    report.write_csv(std::fs::File::create(io.out.join("validation.csv"))?)?;
    let dir = io.out.join("diagnostics");
    std::fs::create_dir_all(&dir)?;
    for (d, diag) in datasets.iter().zip(&diagnostics) {
        diag.save(&dir.join(format!("{}.csv", d.id)))?;
    }
    let mv = |v: Option<f64>| v.map_or("n/a".to_string(), |x| format!("{:.3} mV", x * 1e3));
    println!(
        "{kind}: overall {:.3} mV, SOC<20% {}, T<=0 °C {}",
        report.overall_rmse_v * 1e3,
        mv(report.low_soc_rmse_v),
        mv(report.low_temp_rmse_v)
    );
    for r in report.per_dataset.iter().filter(|r| r.abort_step.is_some()) {
        eprintln!(
            "warning: `{}` aborted at sample {}: {}",
            r.id,
            r.abort_step.unwrap(),
            r.abort_reason.as_deref().unwrap_or("")
        );
    }
    Ok(None)
}

#[derive(Serialize)]
struct BenchReport {
    results: Vec<BenchResult>,
    /// Median PBM time over median ECM time, when both were run.
    pbm_over_ecm: Option<f64>,
}

impl BenchReport {
    fn new(results: Vec<BenchResult>) -> Self {
        let med = |k| results.iter().find(|r| r.model == k).map(|r| r.median_ms_per_step);
        let pbm_over_ecm = med(ModelKind::Pbm).zip(med(ModelKind::Ecm)).map(|(p, e)| p / e);
        Self { results, pbm_over_ecm }
    }
}

fn run_compare(io: &Io) -> Result<Option<Rejected>> {
    let (cfg, base): (CompareConfig, _) = load_config(&io.config)?;
    let ing = load_manifest(&base, &cfg.manifest)?;
    let datasets = with_role(ing.datasets, cfg.role)?;
    let pbm = cfg.pbm_model.load(&base)?;
    let ecm = cfg.ecm_model.load(&base)?;
    check_kind(&pbm, ModelKind::Pbm)?;
    check_kind(&ecm, ModelKind::Ecm)?;
    let bp = benchmark_step_time(&pbm, cfg.bench_steps)?;
    let be = benchmark_step_time(&ecm, cfg.bench_steps)?;
    let c = compare(&pbm, &ecm, &datasets, [bp.median_ms_per_step, be.median_ms_per_step])?;
    write_comparison(&io.out, &c)?;
    write_json(&io.out.join("bench.json"), &BenchReport::new(vec![bp, be]))?;
    for m in [&c.report.first, &c.report.second] {
        println!(
            "{}: overall {:.3} mV, {:.4} ms/step, {} parameters",
            m.model,
            m.overall_rmse_v * 1e3,
            m.step_time_ms,
            m.parameter_count
        );
    }
    Ok(None)
}

fn run_bench(io: &Io) -> Result<Option<Rejected>> {
    let (cfg, base): (BenchConfig, _) = load_config(&io.config)?;
    let mut results = Vec::new();
    for src in &cfg.models {
        let m = src.load(&base)?;
        let r = benchmark_step_time(&m, cfg.steps)?;
        println!("{}: median {:.5} ms/step over {} steps", r.model, r.median_ms_per_step, r.steps);
        results.push(r);
    }
    let report = BenchReport::new(results);
    if let Some(x) = report.pbm_over_ecm {
        println!("pbm/ecm time ratio {x:.2}");
    }
    write_json(&io.out.join("bench.json"), &report)?;
    Ok(None)
}

fn run(cli: &Cli) -> Result<Option<Rejected>> {
    let io = match &cli.command {
        Command::Ingest(io) | Command::Synth(io) | Command::FitHysteresis(io) | Command::Compare(io) | Command::Bench(io) => io,
        Command::Calibrate { io, .. } | Command::Validate { io, .. } => io,
    };
    std::fs::create_dir_all(&io.out).with_context(|| format!("creating {}", io.out.display()))?;
    match &cli.command {
        Command::Ingest(io) => run_ingest(io),
        Command::Synth(io) => run_synth(io),
        Command::FitHysteresis(io) => run_fit_hysteresis(io),
        Command::Calibrate { model, io } => run_calibrate(*model, io),
        Command::Validate { model, io } => run_validate(*model, io),
        Command::Compare(io) => run_compare(io),
        Command::Bench(io) => run_bench(io),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(None) => ExitCode::SUCCESS,
        Ok(Some(Rejected)) => ExitCode::from(2),
        Err(e) => {
            eprintln!("error: {e:#}");
            let validation = e
                .chain()
                .find_map(|c| c.downcast_ref::<Error>())
                .is_some_and(Error::is_validation);
            ExitCode::from(if validation { 2 } else { 1 })
        }
    }
}
