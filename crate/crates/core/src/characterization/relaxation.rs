//! Power-law extrapolation of rest voltage, `V(t) = k1·t^k2 + k3`.
//!
//! For fixed `k2` the model is linear in `(k1, k3)`, so the fit is a
//! one-dimensional search over the exponent (variable projection): a grid of
//! starts over the admissible range, then golden-section refinement inside
//! the bracket around the best start.

use serde::{Deserialize, Serialize};

use crate::domain::TimeSeries;
use crate::error::{Error, Result};

/// Samples closer than this to rest onset are skipped (s).
pub const BLANKING_S: f64 = 10.0;
/// Extrapolation horizon measured from rest onset (s).
pub const HORIZON_S: f64 = 8.0 * 3600.0;
/// Shortest rest accepted for a fit (s).
pub const MIN_REST_S: f64 = 1800.0;
/// Admissible exponent range.
pub const K2_RANGE: (f64, f64) = (-2.0, -0.05);
pub const MULTI_STARTS: usize = 20;
/// Current magnitude below which a sample counts as rest (A).
pub const REST_CURRENT_A: f64 = 1e-9;

const GOLDEN_ITERATIONS: usize = 200;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RelaxationFit {
    pub k1: f64,
    pub k2: f64,
    pub k3: f64,
    pub rms_residual: f64,
    /// Best residual among the grid starts; never below `rms_residual`.
    pub best_start_residual: f64,
    pub v_at_8h: f64,
}

impl RelaxationFit {
    /// Model voltage `t` seconds after rest onset.
    pub fn predict(&self, t: f64) -> f64 {
        self.k1 * t.powf(self.k2) + self.k3
    }
}

/// Least-squares `(k1, k3, rms)` for a fixed exponent.
fn project(t: &[f64], v: &[f64], k2: f64) -> (f64, f64, f64) {
    let n = t.len() as f64;
    let f: Vec<f64> = t.iter().map(|&x| x.powf(k2)).collect();
    let fm = f.iter().sum::<f64>() / n;
    let vm = v.iter().sum::<f64>() / n;
    let (mut sff, mut sfv) = (0.0, 0.0);
    for (fi, vi) in f.iter().zip(v) {
        sff += (fi - fm) * (fi - fm);
        sfv += (fi - fm) * (vi - vm);
    }
    let k1 = if sff > 0.0 { sfv / sff } else { 0.0 };
    let k3 = vm - k1 * fm;
    let ss: f64 = f.iter().zip(v).map(|(fi, vi)| (k1 * fi + k3 - vi).powi(2)).sum();
    (k1, k3, (ss / n).sqrt())
}

/// Fits the rest segment. Time is measured from the first sample, which
/// must be the rest onset.
pub fn fit_relaxation(segment: &TimeSeries) -> Result<RelaxationFit> {
    segment.validate()?;
    if let Some(k) = segment.current_a.iter().position(|i| i.abs() > REST_CURRENT_A) {
        return Err(Error::InvalidInput(format!(
            "not a rest segment: current {} A at row {k}",
            segment.current_a[k]
        )));
    }
    if segment.duration() < MIN_REST_S {
        return Err(Error::InvalidInput(format!(
            "rest of {:.0} s is shorter than {MIN_REST_S} s",
            segment.duration()
        )));
    }
    let t0 = segment.time_s[0];
    let (t, v): (Vec<f64>, Vec<f64>) = segment
        .time_s
        .iter()
        .zip(&segment.voltage_v)
        .filter(|(&ti, _)| ti - t0 >= BLANKING_S)
        .map(|(&ti, &vi)| (ti - t0, vi))
        .unzip();
    if t.len() < 3 {
        return Err(Error::FitNonConvergence {
            reason: "fewer than three samples after blanking".into(),
            best_residual: f64::INFINITY,
        });
    }

    if v.iter().all(|&x| x == v[0]) {
        return Ok(RelaxationFit {
            k1: 0.0,
            k2: -0.5,
            k3: v[0],
            rms_residual: 0.0,
            best_start_residual: 0.0,
            v_at_8h: v[0],
        });
    }

    let (lo, hi) = K2_RANGE;
    let step = (hi - lo) / (MULTI_STARTS - 1) as f64;
    let starts: Vec<f64> = (0..MULTI_STARTS).map(|k| lo + step * k as f64).collect();
    let residuals: Vec<f64> = starts.iter().map(|&k2| project(&t, &v, k2).2).collect();
    let (ib, &best_start_residual) = residuals
        .iter()
        .enumerate()
        .filter(|(_, r)| r.is_finite())
        .min_by(|a, b| a.1.total_cmp(b.1))
        .ok_or_else(|| Error::FitNonConvergence {
            reason: "no finite residual at any start".into(),
            best_residual: f64::INFINITY,
        })?;

    let mut a = starts[ib.saturating_sub(1)];
    let mut b = starts[(ib + 1).min(MULTI_STARTS - 1)];
    let phi = 0.5 * (5f64.sqrt() - 1.0);
    let mut c = b - phi * (b - a);
    let mut d = a + phi * (b - a);
    let mut fc = project(&t, &v, c).2;
    let mut fd = project(&t, &v, d).2;
    for _ in 0..GOLDEN_ITERATIONS {
        if (b - a).abs() < 1e-14 {
            break;
        }
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - phi * (b - a);
            fc = project(&t, &v, c).2;
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + phi * (b - a);
            fd = project(&t, &v, d).2;
        }
    }
    let refined = 0.5 * (a + b);
    let (k2, (k1, k3, rms)) = {
        let r = project(&t, &v, refined);
        if r.2 <= best_start_residual {
            (refined, r)
        } else {
            (starts[ib], project(&t, &v, starts[ib]))
        }
    };
    if !(rms.is_finite() && k1.is_finite() && k3.is_finite()) {
        return Err(Error::FitNonConvergence {
            reason: "refinement produced non-finite coefficients".into(),
            best_residual: best_start_residual,
        });
    }
    Ok(RelaxationFit {
        k1,
        k2,
        k3,
        rms_residual: rms,
        best_start_residual,
        v_at_8h: k1 * HORIZON_S.powf(k2) + k3,
    })
}
