//! Second-order RC equivalent circuit with coulomb counting and hysteresis.
//!
//! ```text
//! V_j[k+1] = exp(−Δt/R_jC_j)·V_j[k] + R_j·(1 − exp(−Δt/R_jC_j))·I[k]
//! SOC[k+1] = SOC[k] − η·Δt·I[k] / (3600·Q)
//! V[k]     = V_OCV(SOC[k], T) − I[k]·R0 − V_1[k] − V_2[k] + V_h[k]
//! ```
//!
//! R and C are looked up at the SOC and temperature of the start of the step.

use serde::{Deserialize, Serialize};

use crate::domain::{CellSpec, EcmParams, TimeSeries};
use crate::error::{Error, Result};
use crate::hysteresis::{HysteresisParams, HysteresisState};
use crate::model::{Diagnostics, Simulation};
use crate::units::SECONDS_PER_HOUR;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EcmState {
    pub v1: f64,
    pub v2: f64,
    pub soc: f64,
    pub hysteresis: HysteresisState,
    /// Set once coulomb counting has been clamped to `[0, 1]`.
    pub soc_out_of_range: bool,
}

impl EcmState {
    pub fn at_rest(soc0: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&soc0) {
            return Err(Error::InvalidInput(format!("initial SOC {soc0} outside [0, 1]")));
        }
        Ok(Self {
            v1: 0.0,
            v2: 0.0,
            soc: soc0,
            hysteresis: HysteresisState::neutral(),
            soc_out_of_range: false,
        })
    }
}

/// Exact update of one RC branch over `dt` at constant current.
#[inline]
pub fn rc_update(v: f64, current: f64, r: f64, c: f64, dt: f64) -> f64 {
    let a = (-dt / (r * c)).exp();
    a * v + r * (1.0 - a) * current
}

/// Terminal voltage of a state carrying `current`.
#[inline]
pub fn ecm_output(state: &EcmState, current: f64, r0: f64, temp_c: f64, params: &EcmParams, hyst: &HysteresisParams) -> f64 {
    params.ocv.eval(state.soc, temp_c) - current * r0 - state.v1 - state.v2
        + state.hysteresis.voltage(state.soc, temp_c, hyst)
}

pub fn ecm_step(
    state: &EcmState,
    current: f64,
    dt: f64,
    temp_c: f64,
    params: &EcmParams,
    hyst: &HysteresisParams,
    spec: &CellSpec,
) -> (EcmState, f64) {
    let rc = params.lookup(state.soc, temp_c);
    let eta = params.efficiency_for(current);
    let raw = state.soc - eta * dt * current / (spec.capacity_ah * SECONDS_PER_HOUR);
    let soc = raw.clamp(0.0, 1.0);
    let next = EcmState {
        v1: rc_update(state.v1, current, rc.r1, rc.c1, dt),
        v2: rc_update(state.v2, current, rc.r2, rc.c2, dt),
        soc,
        hysteresis: state
            .hysteresis
            .update_sign(current)
            .update_h(current, eta, hyst.gamma, dt, spec.capacity_ah),
        soc_out_of_range: state.soc_out_of_range || soc != raw,
    };
    let v = ecm_output(&next, current, rc.r0, temp_c, params, hyst);
    (next, v)
}

pub fn diagnostic_columns() -> Vec<String> {
    [
        "time_s",
        "current_a",
        "temperature_c",
        "voltage_v",
        "soc",
        "v1_V",
        "v2_V",
        "ocv_V",
        "r0_drop_V",
        "h",
        "s",
        "hysteresis_V",
        "soc_out_of_range",
    ]
    .iter()
    .map(|s| s.to_string())
    .collect()
}

/// Drives the circuit over `profile` from `soc0`, with the time alignment of
/// the physics-based model.
pub fn simulate_ecm(
    params: &EcmParams,
    spec: &CellSpec,
    hyst: &HysteresisParams,
    profile: &TimeSeries,
    soc0: f64,
    record: bool,
) -> Result<Simulation> {
    profile.validate()?;
    let mut state = EcmState::at_rest(soc0)?;
    let n = profile.len();
    let mut voltage = Vec::with_capacity(n);
    let mut diag = record.then(|| Diagnostics::new(diagnostic_columns()));
    let mut r0 = 0.0;
    for k in 0..n {
        let i = profile.current_a[k];
        let t = profile.temperature_c[k];
        let v = if k == 0 {
            state.hysteresis = state.hysteresis.update_sign(i);
            r0 = params.r0.interp(state.soc, t);
            ecm_output(&state, i, r0, t, params, hyst)
        } else {
            if record {
                r0 = params.r0.interp(state.soc, t);
            }
            let (s, v) = ecm_step(&state, i, profile.time_s[k] - profile.time_s[k - 1], t, params, hyst, spec);
            state = s;
            v
        };
        voltage.push(v);
        if let Some(d) = diag.as_mut() {
            d.rows.push(vec![
                profile.time_s[k],
                i,
                t,
                v,
                state.soc,
                state.v1,
                state.v2,
                params.ocv.eval(state.soc, t),
                i * r0,
                state.hysteresis.h,
                state.hysteresis.s,
                state.hysteresis.voltage(state.soc, t, hyst),
                f64::from(u8::from(state.soc_out_of_range)),
            ]);
        }
    }
    Ok(Simulation {
        voltage,
        abort: None,
        diagnostics: diag,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::{OcvSurface, Table2d, ECM_SOC_GRID, ECM_TEMP_GRID_C};
    use crate::reference;
    use proptest::prelude::*;

    fn flat_params(r1: f64, c1: f64) -> EcmParams {
        let ocv = OcvSurface::new(Table2d::from_fn(&ECM_SOC_GRID, &ECM_TEMP_GRID_C, |s, _| 3.0 + 0.5 * s)).unwrap();
        EcmParams::from_fns(|_, _| 1e-3, move |_, _| r1, |_, _| 2e-3, move |_, _| c1, |_, _| 1e5, ocv)
    }

    fn spec() -> CellSpec {
        CellSpec::new(166.0, 2.5, 3.65, 1.0, 1.0).unwrap()
    }

    #[test]
    fn rest_voltage_is_ocv() {
        let p = reference::ecm_params();
        let h = reference::hysteresis_params();
        let s = EcmState::at_rest(0.4).unwrap();
        let (_, v) = ecm_step(&s, 0.0, 1.0, 25.0, &p, &h, &spec());
        assert!((v - p.ocv.eval(0.4, 25.0)).abs() < 1e-15);
    }

    #[test]
    fn branch_decays_by_one_over_e_when_tau_equals_dt() {
        let p = flat_params(1e-3, 1e3);
        let mut s = EcmState::at_rest(0.5).unwrap();
        s.v1 = 0.02;
        let (n, _) = ecm_step(&s, 0.0, 1.0, 25.0, &p, &HysteresisParams::none(), &spec());
        assert!((n.v1 - 0.02 * (-1.0f64).exp()).abs() < 1e-17);
    }

    #[test]
    fn one_c_for_an_hour_empties_the_cell() {
        let p = flat_params(1e-3, 1e4);
        let mut s = EcmState::at_rest(1.0).unwrap();
        s = ecm_step(&s, 166.0, 3600.0, 25.0, &p, &HysteresisParams::none(), &spec()).0;
        assert_eq!(s.soc, 0.0);
        assert!(!s.soc_out_of_range);
    }

    #[test]
    fn constant_current_branch_settles_at_ir() {
        let p = flat_params(1e-3, 1e4);
        let profile = TimeSeries::uniform(1.0, vec![50.0; 200], 25.0).unwrap();
        let mut s = EcmState::at_rest(0.9).unwrap();
        for _ in 1..profile.len() {
            s = ecm_step(&s, 50.0, 1.0, 25.0, &p, &HysteresisParams::none(), &spec()).0;
        }
        assert!((s.v1 - 50.0 * 1e-3).abs() < 1e-9);
    }

    #[test]
    fn flagged_when_counting_leaves_the_unit_interval() {
        let p = flat_params(1e-3, 1e4);
        let s = EcmState::at_rest(0.01).unwrap();
        let (n, _) = ecm_step(&s, 166.0, 600.0, 25.0, &p, &HysteresisParams::none(), &spec());
        assert_eq!(n.soc, 0.0);
        assert!(n.soc_out_of_range);
    }

    proptest! {
        #[test]
        fn two_half_steps_equal_one(v in -0.05f64..0.05, i in -300.0f64..300.0, r in 1e-4f64..1e-2, c in 1e2f64..1e6, dt in 0.01f64..10.0) {
            let one = rc_update(v, i, r, c, dt);
            let two = rc_update(rc_update(v, i, r, c, dt / 2.0), i, r, c, dt / 2.0);
            prop_assert!((one - two).abs() <= 1e-12 * one.abs().max(1e-3));
        }

        #[test]
        fn soc_depends_only_on_charge(i in prop::collection::vec(-100.0f64..100.0, 2..50)) {
            let p = reference::ecm_params();
            let h = reference::hysteresis_params();
            let mut s = EcmState::at_rest(0.5).unwrap();
            let mut expected = 0.5;
            for &x in &i {
                s = ecm_step(&s, x, 1.0, 10.0, &p, &h, &spec()).0;
                let eta = if x < 0.0 { p.charge_efficiency } else { 1.0 };
                expected -= eta * x / (166.0 * 3600.0);
            }
            prop_assert!((s.soc - expected).abs() < 1e-12);
        }
    }
}
