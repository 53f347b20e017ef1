//! One-state hysteresis with an instantaneous sign term.
//!
//! The hysteresis voltage is `V_h = M0·s + M·h`. The sign state `s` follows
//! `−sgn(i)` whenever current flows and holds otherwise. The dynamic state `h`
//! relaxes toward `−sgn(i)` at a rate proportional to the charge passed:
//!
//! ```text
//! e  = exp(−|η·i·γ·Δt / (3600·Q)|)
//! h' = e·h − (1 − e)·sgn(i)
//! ```
//!
//! Both the physics-based and the circuit model use this module unchanged.

use serde::{Deserialize, Serialize};

use crate::domain::{Table1d, Table2d};
use crate::error::{Error, Result};
use crate::units::SECONDS_PER_HOUR;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HysteresisParams {
    /// Instantaneous magnitude over temperature (V).
    #[serde(rename = "M0_V")]
    pub m0: Table1d,
    /// Maximum dynamic polarization over SOC × temperature (V).
    #[serde(rename = "M_V")]
    pub m_map: Table2d,
    pub gamma: f64,
}

impl HysteresisParams {
    pub fn validate(&self) -> Result<()> {
        self.m0.validate("M0_V")?;
        self.m_map.validate("M_V")?;
        if self.m0.values.iter().any(|&v| !(v >= 0.0)) {
            return Err(Error::param("M0_V", "must be non-negative"));
        }
        if self.m_map.values.iter().any(|&v| !(v >= 0.0)) {
            return Err(Error::param("M_V", "must be non-negative"));
        }
        if !(self.gamma > 0.0 && self.gamma.is_finite()) {
            return Err(Error::param("gamma", "must be positive"));
        }
        Ok(())
    }

    /// No hysteresis at all.
    pub fn none() -> Self {
        Self {
            m0: Table1d::constant(0.0),
            m_map: Table2d {
                soc_grid: vec![0.0],
                temp_grid_c: vec![25.0],
                values: vec![0.0],
            },
            gamma: 1.0,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct HysteresisState {
    pub h: f64,
    pub s: f64,
}

impl Default for HysteresisState {
    fn default() -> Self {
        Self::neutral()
    }
}

#[inline]
fn sgn(x: f64) -> f64 {
    if x > 0.0 {
        1.0
    } else if x < 0.0 {
        -1.0
    } else {
        0.0
    }
}

impl HysteresisState {
    /// State after a long rest: no instantaneous or dynamic hysteresis.
    pub fn neutral() -> Self {
        Self { h: 0.0, s: 0.0 }
    }

    /// Sign-state update: `−sgn(i)` while current flows, unchanged at rest.
    #[inline]
    pub fn update_sign(self, current_a: f64) -> Self {
        if current_a != 0.0 {
            Self {
                s: -sgn(current_a),
                ..self
            }
        } else {
            self
        }
    }

    /// Decay factor `e` of the dynamic state over one step.
    #[inline]
    pub fn decay(current_a: f64, efficiency: f64, gamma: f64, dt: f64, capacity_ah: f64) -> f64 {
        (-(efficiency * current_a * gamma * dt / (capacity_ah * SECONDS_PER_HOUR)).abs()).exp()
    }

    /// Dynamic-state update over one step at constant current.
    #[inline]
    pub fn update_h(self, current_a: f64, efficiency: f64, gamma: f64, dt: f64, capacity_ah: f64) -> Self {
        let e = Self::decay(current_a, efficiency, gamma, dt, capacity_ah);
        let h = (e * self.h - (1.0 - e) * sgn(current_a)).clamp(-1.0, 1.0);
        Self { h, ..self }
    }

    /// `V_h = M0(T)·s + M(soc, T)·h`.
    #[inline]
    pub fn voltage(&self, soc: f64, temp_c: f64, params: &HysteresisParams) -> f64 {
        params.m0.interp(temp_c) * self.s + params.m_map.interp(soc, temp_c) * self.h
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    const Q: f64 = 166.0;

    fn params(m0: f64, m: f64) -> HysteresisParams {
        HysteresisParams {
            m0: Table1d::constant(m0),
            m_map: Table2d::new(vec![0.0, 1.0], vec![25.0], vec![m, m]).unwrap(),
            gamma: 10.0,
        }
    }

    #[test]
    fn sign_holds_on_zero_current() {
        let st = HysteresisState { h: 0.0, s: 1.0 };
        assert_eq!(st.update_sign(0.0).s, 1.0);
    }

    #[test]
    fn sign_flips_with_current_direction() {
        let st = HysteresisState { h: 0.0, s: -1.0 };
        assert_eq!(st.update_sign(-50.0).s, 1.0);
        assert_eq!(HysteresisState::neutral().update_sign(83.0).s, -1.0);
    }

    #[test]
    fn h_unchanged_at_rest() {
        let st = HysteresisState { h: 0.37, s: 1.0 };
        assert_eq!(st.update_h(0.0, 1.0, 10.0, 1.0, Q).h, 0.37);
    }

    #[test]
    fn h_fixed_point_is_minus_sign_of_current() {
        for i in [-120.0, 5.0, 300.0] {
            let st = HysteresisState { h: -sgn(i), s: 0.0 };
            assert_eq!(st.update_h(i, 1.0, 25.0, 1.0, Q).h, -sgn(i));
        }
    }

    #[test]
    fn h_half_decay_closed_form() {
        // e = 0.5 when |η i γ dt| / (3600 Q) = ln 2.
        let gamma = 2f64.ln() * Q * SECONDS_PER_HOUR / (100.0 * 1.0);
        let st = HysteresisState::neutral().update_h(100.0, 1.0, gamma, 1.0, Q);
        assert!((st.h + 0.5).abs() < 1e-15);
    }

    #[test]
    fn voltage_examples() {
        let p = params(0.005, 0.020);
        assert_eq!(HysteresisState::neutral().voltage(0.5, 25.0, &p), 0.0);
        let sat = HysteresisState { h: -1.0, s: -1.0 };
        assert!((sat.voltage(0.5, 25.0, &p) + 0.025).abs() < 1e-15);
        let st = HysteresisState { h: 0.5, s: 1.0 };
        assert!((st.voltage(0.5, 25.0, &p) - 0.015).abs() < 1e-15);
    }

    proptest! {
        #[test]
        fn h_stays_bounded(h in -1.0f64..=1.0, i in -500.0f64..500.0, gamma in 0.01f64..500.0, dt in 0.01f64..100.0) {
            let st = HysteresisState { h, s: 0.0 }.update_h(i, 1.0, gamma, dt, Q);
            prop_assert!(st.h.abs() <= 1.0);
        }

        #[test]
        fn convergence_is_geometric(h in -1.0f64..=1.0, i in 1.0f64..400.0, gamma in 0.5f64..50.0) {
            let e = HysteresisState::decay(i, 1.0, gamma, 1.0, Q);
            let mut st = HysteresisState { h, s: 0.0 };
            let mut err = (st.h + 1.0).abs();
            for _ in 0..20 {
                st = st.update_h(i, 1.0, gamma, 1.0, Q);
                let next = (st.h + 1.0).abs();
                prop_assert!(next <= err + 1e-15);
                prop_assert!((next - e * err).abs() <= 1e-12);
                err = next;
            }
        }

        #[test]
        fn double_step_equals_two_steps(h in -1.0f64..=1.0, i in -400.0f64..400.0, gamma in 0.5f64..50.0, dt in 0.1f64..10.0) {
            let st = HysteresisState { h, s: 0.0 };
            let once = st.update_h(i, 1.0, gamma, 2.0 * dt, Q).h;
            let twice = st.update_h(i, 1.0, gamma, dt, Q).update_h(i, 1.0, gamma, dt, Q).h;
            prop_assert!((once - twice).abs() < 1e-12);
        }

        #[test]
        fn voltage_is_odd(h in -1.0f64..=1.0, s in prop::sample::select(vec![-1.0, 0.0, 1.0]), soc in 0.0f64..1.0) {
            let p = params(0.004, 0.018);
            let a = HysteresisState { h, s }.voltage(soc, 25.0, &p);
            let b = HysteresisState { h: -h, s: -s }.voltage(soc, 25.0, &p);
            prop_assert_eq!(a, -b);
            prop_assert!(a.abs() <= 0.004 + 0.018 + 1e-15);
        }
    }
}
