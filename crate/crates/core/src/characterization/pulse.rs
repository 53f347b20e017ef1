//! Pulse-test protocol and rest detection.
//!
//! A characterization test starts full, walks down the SOC grid with
//! constant-current discharge pulses and back up with charge pulses, holding
//! a long rest after every pulse.

use serde::{Deserialize, Serialize};

use crate::domain::{max_c_rate, CellSpec, TimeSeries};
use crate::error::{Error, Result};
use crate::units::SECONDS_PER_HOUR;

use super::relaxation::REST_CURRENT_A;

/// Direction of the pulse that preceded a rest.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Side {
    Charge,
    Discharge,
}

impl Side {
    /// The sign state `s` left behind by a pulse on this side.
    pub fn sign_state(self) -> f64 {
        match self {
            Side::Charge => 1.0,
            Side::Discharge => -1.0,
        }
    }
}

/// A maximal run of zero-current samples, `start..end`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Rest {
    pub start: usize,
    pub end: usize,
    /// `None` for a rest that opens the test.
    pub side: Option<Side>,
}

/// Rests lasting at least `min_duration_s`, in time order.
pub fn find_rests(series: &TimeSeries, min_duration_s: f64) -> Vec<Rest> {
    let n = series.len();
    let mut out = Vec::new();
    let mut k = 0;
    while k < n {
        if series.current_a[k].abs() > REST_CURRENT_A {
            k += 1;
            continue;
        }
        let start = k;
        while k < n && series.current_a[k].abs() <= REST_CURRENT_A {
            k += 1;
        }
        let side = (start > 0).then(|| {
            if series.current_a[start - 1] < 0.0 {
                Side::Charge
            } else {
                Side::Discharge
            }
        });
        if series.time_s[k - 1] - series.time_s[start] >= min_duration_s {
            out.push(Rest { start, end: k, side });
        }
    }
    out
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PulsePlan {
    /// Requested pulse rate; capped by the temperature rule.
    pub c_rate: f64,
    /// SOC nodes visited, ascending, inside (0, 1).
    pub soc_nodes: Vec<f64>,
    /// Turning point below the lowest node.
    pub soc_floor: f64,
    pub rest_s: f64,
    pub initial_rest_s: f64,
    pub dt_s: f64,
}

impl Default for PulsePlan {
    fn default() -> Self {
        Self {
            c_rate: 1.0,
            soc_nodes: (1..=9).map(|k| k as f64 / 10.0).collect(),
            soc_floor: 0.05,
            rest_s: 2.5 * SECONDS_PER_HOUR,
            initial_rest_s: 600.0,
            dt_s: 10.0,
        }
    }
}

impl PulsePlan {
    /// SOC after each pulse: down through the nodes to the floor, then back
    /// up through the nodes to full.
    pub fn targets(&self) -> Vec<f64> {
        let mut t: Vec<f64> = self.soc_nodes.iter().rev().copied().collect();
        t.push(self.soc_floor);
        t.extend(self.soc_nodes.iter().copied());
        t.push(1.0);
        t
    }

    pub fn validate(&self) -> Result<()> {
        if self.soc_nodes.is_empty() || self.soc_nodes.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::param("soc_nodes", "must be non-empty and strictly ascending"));
        }
        if !(self.soc_floor >= 0.0 && self.soc_floor < self.soc_nodes[0] && *self.soc_nodes.last().unwrap() < 1.0) {
            return Err(Error::param("soc_floor", "must lie below the nodes, which must lie below 1"));
        }
        if !(self.c_rate > 0.0 && self.dt_s > 0.0 && self.rest_s > 0.0 && self.initial_rest_s >= 0.0) {
            return Err(Error::param("c_rate", "rate, step and rests must be positive"));
        }
        Ok(())
    }
}

/// Partial cycles around mid SOC. Short reversals leave the dynamic
/// hysteresis state unsaturated, which is what makes its rate observable.
pub fn minor_loop_targets() -> Vec<f64> {
    vec![0.5, 0.3, 0.4, 0.2, 0.6, 0.5, 0.8, 0.7, 0.9, 0.4, 0.5, 0.1, 0.3, 0.2, 0.7, 0.6, 0.5]
}

/// Current profile of a pulse test at `temp_c`, starting full (SOC 1).
pub fn pulse_protocol(spec: &CellSpec, temp_c: f64, plan: &PulsePlan) -> Result<TimeSeries> {
    plan.validate()?;
    pulse_sequence(spec, temp_c, plan, 1.0, &plan.targets())
}

/// Pulses from `soc0` through each SOC in `targets`, with a rest after
/// every pulse. Pulse lengths are whole samples and the current is trimmed
/// so that each pulse lands exactly on its target. The rate is capped by
/// the temperature rule.
pub fn pulse_sequence(spec: &CellSpec, temp_c: f64, plan: &PulsePlan, soc0: f64, targets: &[f64]) -> Result<TimeSeries> {
    plan.validate()?;
    if let Some(t) = targets.iter().find(|t| !(0.0..=1.0).contains(*t)) {
        return Err(Error::InvalidInput(format!("pulse target SOC {t} outside [0, 1]")));
    }
    let rate = plan.c_rate.min(max_c_rate(temp_c)) * spec.one_c();
    let rest_steps = (plan.rest_s / plan.dt_s).round() as usize;
    let mut current = vec![0.0; 1 + (plan.initial_rest_s / plan.dt_s).round() as usize];
    let mut soc = soc0;
    for &to in targets {
        if to == soc {
            continue;
        }
        let discharge = to < soc;
        let eff = if discharge { 1.0 } else { spec.coulombic_efficiency };
        let charge_as = (soc - to).abs() * spec.capacity_ah * SECONDS_PER_HOUR / eff;
        let steps = ((charge_as / rate) / plan.dt_s).round().max(1.0) as usize;
        let i = charge_as / (steps as f64 * plan.dt_s);
        current.extend(std::iter::repeat(if discharge { i } else { -i }).take(steps));
        current.extend(std::iter::repeat(0.0).take(rest_steps));
        soc = to;
    }
    TimeSeries::uniform(plan.dt_s, current, temp_c)
}
