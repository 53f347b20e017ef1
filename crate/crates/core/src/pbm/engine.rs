//! The reduced-order physics-based cell model.

use serde::{Deserialize, Serialize};

use crate::domain::{CellSpec, PbmParams, PbmProperties, TimeSeries};
use crate::error::{Error, Result, Violation};
use crate::hysteresis::{HysteresisParams, HysteresisState};
use crate::model::{Abort, Diagnostics, Simulation};

use super::electrolyte::{ElectrolyteRom, ElectrolyteRomState};
use super::kinetics::effective_diffusivity;
use super::solid::{solid_step, Particle, SolidRomState};
use super::voltage::{assemble, interfacial_current, CellSnapshot, VoltageTerms, TERM_NAMES};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PbmState {
    pub solid_pos: SolidRomState,
    pub solid_neg: SolidRomState,
    pub electrolyte: ElectrolyteRomState,
    pub hysteresis: HysteresisState,
    pub last_voltage: f64,
}

/// Uniform solid concentrations at `soc0`, uniform electrolyte and neutral
/// hysteresis. The voltage is the open-circuit value `U_p − U_n`.
pub fn init_pbm_state(soc0: f64, params: &PbmParams) -> Result<PbmState> {
    if !(0.0..=1.0).contains(&soc0) {
        return Err(Error::InvalidInput(format!("initial SOC {soc0} outside [0, 1]")));
    }
    let (tp, tn) = params.stoichiometry_at_soc(soc0);
    Ok(PbmState {
        solid_pos: SolidRomState::uniform(tp * params.constants.c_max_pos),
        solid_neg: SolidRomState::uniform(tn * params.constants.c_max_neg),
        electrolyte: ElectrolyteRomState::default(),
        hysteresis: HysteresisState::neutral(),
        last_voltage: params.ocp_pos.eval(tp) - params.ocp_neg.eval(tn),
    })
}

/// Everything logged for one step besides time, current and temperature.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PbmStepOutput {
    pub voltage: f64,
    pub terms: VoltageTerms,
    pub c_e_x0: f64,
    pub c_e_xl: f64,
}

/// A model instance that owns its parameters and step caches. Stepping is
/// sequential; separate instances are independent.
#[derive(Clone, Debug)]
pub struct PbmEngine {
    params: PbmParams,
    hyst: HysteresisParams,
    spec: CellSpec,
    rom: ElectrolyteRom,
    pos: Particle,
    neg: Particle,
    props: Option<PbmProperties>,
}

impl PbmEngine {
    pub fn new(params: PbmParams, hyst: HysteresisParams, spec: CellSpec) -> Result<Self> {
        params.validate()?;
        hyst.validate()?;
        spec.validate()?;
        Ok(Self::new_unchecked(params, hyst, spec))
    }

    /// Skips validation; used inside identification where the caller has
    /// already bounded the parameters.
    pub(crate) fn new_unchecked(params: PbmParams, hyst: HysteresisParams, spec: CellSpec) -> Self {
        let rom = ElectrolyteRom::new(&params);
        let pos = Particle {
            radius: params.radius_pos,
            c_max: params.constants.c_max_pos,
        };
        let neg = Particle {
            radius: params.radius_neg,
            c_max: params.constants.c_max_neg,
        };
        Self {
            params,
            hyst,
            spec,
            rom,
            pos,
            neg,
            props: None,
        }
    }

    pub fn params(&self) -> &PbmParams {
        &self.params
    }

    pub fn electrolyte(&self) -> &ElectrolyteRom {
        &self.rom
    }

    pub fn init_state(&self, soc0: f64) -> Result<PbmState> {
        init_pbm_state(soc0, &self.params)
    }

    #[inline]
    fn properties(&mut self, temp_c: f64) -> PbmProperties {
        match self.props {
            Some(p) if p.temp_c == temp_c => p,
            _ => {
                let p = self.params.properties_at(temp_c);
                self.props = Some(p);
                p
            }
        }
    }

    /// Voltage of `state` carrying `current` without advancing any dynamics.
    pub fn output(&mut self, state: &PbmState, current: f64, temp_c: f64) -> Result<PbmStepOutput, Violation> {
        let props = self.properties(temp_c);
        let avg = self.rom.region_averages(&state.electrolyte);
        let (c_e_x0, c_e_xl) = self.rom.boundary(&state.electrolyte);
        let snap = CellSnapshot {
            current,
            c_surf_pos: state.solid_pos.c_surf(),
            c_surf_neg: state.solid_neg.c_surf(),
            c_bulk_neg: state.solid_neg.c_bulk,
            c_e_pos: avg[0],
            c_e_neg: avg[2],
            c_e_x0,
            c_e_xl,
            hysteresis: state.hysteresis,
        };
        let terms = assemble(&self.params, &props, &self.hyst, &snap)?;
        Ok(PbmStepOutput {
            voltage: terms.total(),
            terms,
            c_e_x0,
            c_e_xl,
        })
    }

    /// Advances all states over `dt` with `current` held, then evaluates the
    /// voltage at the end of the step with the same current.
    pub fn step(
        &mut self,
        state: &PbmState,
        current: f64,
        dt: f64,
        temp_c: f64,
    ) -> Result<(PbmState, PbmStepOutput), Violation> {
        let props = self.properties(temp_c);
        let c = &self.params.constants;
        let d_pos = effective_diffusivity(
            state.solid_pos.c_surf(),
            state.solid_pos.c_bulk,
            c.mu_pos,
            props.diffusivity_pos,
        );
        let d_neg = effective_diffusivity(
            state.solid_neg.c_surf(),
            state.solid_neg.c_bulk,
            c.mu_neg,
            props.diffusivity_neg,
        );
        let (j_pos, j_neg) = interfacial_current(&self.params, current);
        let solid_pos = solid_step(&state.solid_pos, -j_pos, dt, d_pos, self.pos, "positive")?;
        let solid_neg = solid_step(&state.solid_neg, -j_neg, dt, d_neg, self.neg, "negative")?;
        let electrolyte = self
            .rom
            .step(&state.electrolyte, current, dt, props.electrolyte_diffusivity)?;
        let hysteresis = state.hysteresis.update_sign(current).update_h(
            current,
            self.spec.efficiency_for(current),
            self.hyst.gamma,
            dt,
            self.spec.capacity_ah,
        );
        let mut next = PbmState {
            solid_pos,
            solid_neg,
            electrolyte,
            hysteresis,
            last_voltage: state.last_voltage,
        };
        let out = self.output(&next, current, temp_c)?;
        next.last_voltage = out.voltage;
        Ok((next, out))
    }

    /// Drives the model over `profile` from `soc0`. Sample `k > 0` carries the
    /// current held over `(t_{k−1}, t_k]`; the first sample is the voltage of
    /// the initial state under the first current.
    pub fn simulate(&mut self, profile: &TimeSeries, soc0: f64, record: bool) -> Result<Simulation> {
        profile.validate()?;
        let mut state = self.init_state(soc0)?;
        let n = profile.len();
        let mut voltage = Vec::with_capacity(n);
        let mut diag = record.then(|| Diagnostics::new(diagnostic_columns()));
        let mut abort = None;
        for k in 0..n {
            let i = profile.current_a[k];
            let t = profile.temperature_c[k];
            let res = if k == 0 {
                state.hysteresis = state.hysteresis.update_sign(i);
                self.output(&state, i, t).map(|o| {
                    state.last_voltage = o.voltage;
                    o
                })
            } else {
                let dt = profile.time_s[k] - profile.time_s[k - 1];
                self.step(&state, i, dt, t).map(|(s, o)| {
                    state = s;
                    o
                })
            };
            match res {
                Ok(out) => {
                    voltage.push(out.voltage);
                    if let Some(d) = diag.as_mut() {
                        d.rows.push(diagnostic_row(profile, k, &state, &out));
                    }
                }
                Err(violation) => {
                    abort = Some(Abort { step: k, violation });
                    break;
                }
            }
        }
        Ok(Simulation {
            voltage,
            abort,
            diagnostics: diag,
        })
    }
}

/// Simulates `profile` with a fresh engine.
pub fn simulate_pbm(
    params: &PbmParams,
    hyst: &HysteresisParams,
    spec: &CellSpec,
    profile: &TimeSeries,
    soc0: f64,
) -> Result<Simulation> {
    PbmEngine::new(params.clone(), hyst.clone(), spec.clone())?.simulate(profile, soc0, true)
}

pub fn diagnostic_columns() -> Vec<String> {
    let mut c: Vec<String> = [
        "time_s",
        "current_a",
        "temperature_c",
        "voltage_v",
        "soc",
        "c_surf_pos",
        "c_surf_neg",
        "c_bulk_pos",
        "c_bulk_neg",
        "c_e_x0",
        "c_e_xl",
        "eta_ct_pos_V",
        "eta_in_pos_V",
        "eta_ct_neg_V",
        "eta_in_neg_V",
        "h",
        "s",
    ]
    .iter()
    .map(|s| s.to_string())
    .collect();
    c.extend(TERM_NAMES.iter().map(|s| s.to_string()));
    c
}

fn diagnostic_row(profile: &TimeSeries, k: usize, s: &PbmState, o: &PbmStepOutput) -> Vec<f64> {
    let mut r = vec![
        profile.time_s[k],
        profile.current_a[k],
        profile.temperature_c[k],
        o.voltage,
        o.terms.soc,
        s.solid_pos.c_surf(),
        s.solid_neg.c_surf(),
        s.solid_pos.c_bulk,
        s.solid_neg.c_bulk,
        o.c_e_x0,
        o.c_e_xl,
        o.terms.eta_pos.charge_transfer,
        o.terms.eta_pos.intercalation,
        o.terms.eta_neg.charge_transfer,
        o.terms.eta_neg.intercalation,
        s.hysteresis.h,
        s.hysteresis.s,
    ];
    r.extend_from_slice(&o.terms.terms);
    r
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::reference;

    fn engine() -> PbmEngine {
        PbmEngine::new(
            reference::pbm_params(),
            reference::hysteresis_params(),
            reference::cell_spec(),
        )
        .unwrap()
    }

    #[test]
    fn init_at_full_charge_sits_on_window_edge() {
        let p = reference::pbm_params();
        let s = init_pbm_state(1.0, &p).unwrap();
        assert_eq!(s.solid_neg.c_bulk / p.constants.c_max_neg, p.theta_neg_full);
        assert!(init_pbm_state(1.2, &p).is_err());
    }

    #[test]
    fn init_voltage_is_open_circuit_at_midpoint() {
        let p = reference::pbm_params();
        let s = init_pbm_state(0.5, &p).unwrap();
        let (tp, tn) = p.stoichiometry_at_soc(0.5);
        assert_eq!(s.last_voltage, p.ocp_pos.eval(tp) - p.ocp_neg.eval(tn));
    }

    #[test]
    fn rest_at_equilibrium_is_a_fixed_point() {
        let mut e = engine();
        let s0 = e.init_state(0.6).unwrap();
        let (s1, out) = e.step(&s0, 0.0, 1.0, 25.0).unwrap();
        assert_eq!(s1.solid_pos, s0.solid_pos);
        assert_eq!(s1.solid_neg, s0.solid_neg);
        assert_eq!(s1.electrolyte, s0.electrolyte);
        assert!((out.voltage - s0.last_voltage).abs() < 1e-12);
    }

    #[test]
    fn overpotential_signs_order_the_voltage() {
        let mut e = engine();
        let s0 = e.init_state(0.5).unwrap();
        let v_dis = e.step(&s0, 166.0, 1.0, 25.0).unwrap().1.voltage;
        let v_rest = e.step(&s0, 0.0, 1.0, 25.0).unwrap().1.voltage;
        let v_chg = e.step(&s0, -166.0, 1.0, 25.0).unwrap().1.voltage;
        assert!(v_dis < v_rest && v_rest < v_chg);
    }

    #[test]
    fn voltage_is_the_sum_of_logged_terms() {
        let mut e = engine();
        let profile = TimeSeries::uniform(1.0, vec![166.0; 300], 25.0).unwrap();
        let sim = e.simulate(&profile, 0.9, true).unwrap();
        let d = sim.diagnostics.unwrap();
        let first_term = d.columns.iter().position(|c| c == TERM_NAMES[0]).unwrap();
        for row in &d.rows {
            let sum = row[first_term..].iter().fold(0.0, |a, t| a + t);
            assert_eq!(sum, row[3]);
        }
    }
}
