//! Per-step compute time of the two models.

use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::ecm::{ecm_step, EcmState};
use crate::error::{Error, Result};
use crate::model::{CellModel, ModelKind, ModelParams};
use crate::pbm::PbmEngine;

/// Fewest steps a benchmark may time.
pub const MIN_BENCH_STEPS: usize = 100_000;
/// Steps per timed block; the median is taken over blocks.
pub const BLOCK_STEPS: usize = 1000;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BenchResult {
    pub model: ModelKind,
    pub steps: usize,
    pub median_ms_per_step: f64,
    pub mean_ms_per_step: f64,
}

/// Zero-mean ±0.5 C square wave with a 200 s period, so arbitrarily long
/// runs stay near the starting SOC.
fn bench_current(k: usize, one_c: f64) -> f64 {
    if (k / 100) % 2 == 0 {
        0.5 * one_c
    } else {
        -0.5 * one_c
    }
}

/// Times `n_steps` single steps at 25 °C and 1 s from SOC 0.5, after one
/// untimed warm-up block.
pub fn benchmark_step_time(model: &CellModel, n_steps: usize) -> Result<BenchResult> {
    if n_steps < MIN_BENCH_STEPS {
        return Err(Error::param("n_steps", format!("must be at least {MIN_BENCH_STEPS}")));
    }
    model.validate()?;
    let blocks = n_steps.div_ceil(BLOCK_STEPS);
    let (dt, temp, one_c) = (1.0, 25.0, model.cell.one_c());
    let mut per_step = Vec::with_capacity(blocks);
    match &model.params {
        ModelParams::Pbm(p) => {
            let mut eng = PbmEngine::new(p.clone(), model.hysteresis.clone(), model.cell.clone())?;
            let mut state = eng.init_state(0.5)?;
            let mut k = 0;
            for b in 0..=blocks {
                let t0 = Instant::now();
                for _ in 0..BLOCK_STEPS {
                    let (s, out) = eng.step(&state, bench_current(k, one_c), dt, temp)?;
                    std::hint::black_box(out.voltage);
                    state = s;
                    k += 1;
                }
                if b > 0 {
                    per_step.push(t0.elapsed().as_secs_f64() * 1e3 / BLOCK_STEPS as f64);
                }
            }
        }
        ModelParams::Ecm(p) => {
            let mut state = EcmState::at_rest(0.5)?;
            let mut k = 0;
            for b in 0..=blocks {
                let t0 = Instant::now();
                for _ in 0..BLOCK_STEPS {
                    let (s, v) = ecm_step(&state, bench_current(k, one_c), dt, temp, p, &model.hysteresis, &model.cell);
                    std::hint::black_box(v);
                    state = s;
                    k += 1;
                }
                if b > 0 {
                    per_step.push(t0.elapsed().as_secs_f64() * 1e3 / BLOCK_STEPS as f64);
                }
            }
        }
    }
    let mean = per_step.iter().sum::<f64>() / per_step.len() as f64;
    per_step.sort_by(f64::total_cmp);
    let m = per_step.len();
    let median = if m % 2 == 1 {
        per_step[m / 2]
    } else {
        0.5 * (per_step[m / 2 - 1] + per_step[m / 2])
    };
    Ok(BenchResult {
        model: model.kind(),
        steps: blocks * BLOCK_STEPS,
        median_ms_per_step: median,
        mean_ms_per_step: mean,
    })
}
