//! Full-cell reference: finite-volume particles and electrolyte with the
//! shared kinetics, voltage assembly and hysteresis.

use crate::domain::{CellSpec, PbmParams, TimeSeries};
use crate::error::{Result, Violation};
use crate::hysteresis::{HysteresisParams, HysteresisState};
use crate::model::{Abort, Simulation};
use crate::pbm::kinetics::effective_diffusivity;
use crate::pbm::voltage::{assemble, interfacial_current, CellSnapshot};
use crate::pbm::Particle;

use super::electrolyte::ElectrolyteFdm;
use super::solid::SolidFdm;
use super::FdmGridConfig;

pub struct FdmCell {
    params: PbmParams,
    hyst: HysteresisParams,
    spec: CellSpec,
    grid: FdmGridConfig,
}

struct Fields {
    pos: SolidFdm,
    neg: SolidFdm,
    elec: ElectrolyteFdm,
    surf_pos: f64,
    surf_neg: f64,
    hysteresis: HysteresisState,
}

impl FdmCell {
    pub fn new(params: PbmParams, hyst: HysteresisParams, spec: CellSpec, grid: FdmGridConfig) -> Result<Self> {
        params.validate()?;
        hyst.validate()?;
        spec.validate()?;
        grid.validate(spec.sampling_dt_s)?;
        Ok(Self {
            params,
            hyst,
            spec,
            grid,
        })
    }

    fn voltage(&self, f: &Fields, current: f64, temp_c: f64) -> Result<f64, Violation> {
        let props = self.params.properties_at(temp_c);
        let avg = f.elec.region_averages();
        let snap = CellSnapshot {
            current,
            c_surf_pos: f.surf_pos,
            c_surf_neg: f.surf_neg,
            c_bulk_neg: f.neg.c_bulk(),
            c_e_pos: avg[0],
            c_e_neg: avg[2],
            c_e_x0: f.elec.c_x0(),
            c_e_xl: f.elec.c_xl(),
            hysteresis: f.hysteresis,
        };
        Ok(assemble(&self.params, &props, &self.hyst, &snap)?.total())
    }

    fn advance(&self, f: &mut Fields, current: f64, dt: f64, temp_c: f64) -> Result<(), Violation> {
        let props = self.params.properties_at(temp_c);
        let c = &self.params.constants;
        let (j_pos, j_neg) = interfacial_current(&self.params, current);
        let m = self.grid.substeps(dt);
        let h = dt / m as f64;
        for _ in 0..m {
            let d_pos = effective_diffusivity(f.surf_pos, f.pos.c_bulk(), c.mu_pos, props.diffusivity_pos);
            let d_neg = effective_diffusivity(f.surf_neg, f.neg.c_bulk(), c.mu_neg, props.diffusivity_neg);
            f.pos.step(-j_pos, d_pos, h);
            f.neg.step(-j_neg, d_neg, h);
            f.surf_pos = f.pos.c_surf_with(-j_pos, d_pos);
            f.surf_neg = f.neg.c_surf_with(-j_neg, d_neg);
            f.elec.step(current, props.electrolyte_diffusivity, h);
        }
        for (name, v, cmax) in [
            ("positive surface concentration (mol/m3)", f.surf_pos, c.c_max_pos),
            ("negative surface concentration (mol/m3)", f.surf_neg, c.c_max_neg),
        ] {
            if !(v > 0.0 && v < cmax) {
                return Err(Violation::new(name, v));
            }
        }
        f.elec.check()?;
        f.hysteresis = f.hysteresis.update_sign(current).update_h(
            current,
            self.spec.efficiency_for(current),
            self.hyst.gamma,
            dt,
            self.spec.capacity_ah,
        );
        Ok(())
    }

    /// Same time alignment as the reduced model.
    pub fn simulate(&self, profile: &TimeSeries, soc0: f64) -> Result<Simulation> {
        profile.validate()?;
        let p = &self.params;
        let (tp, tn) = p.stoichiometry_at_soc(soc0);
        let cp = tp * p.constants.c_max_pos;
        let cn = tn * p.constants.c_max_neg;
        let mut f = Fields {
            pos: SolidFdm::uniform(
                Particle {
                    radius: p.radius_pos,
                    c_max: p.constants.c_max_pos,
                },
                self.grid.radial_nodes,
                cp,
            ),
            neg: SolidFdm::uniform(
                Particle {
                    radius: p.radius_neg,
                    c_max: p.constants.c_max_neg,
                },
                self.grid.radial_nodes,
                cn,
            ),
            elec: ElectrolyteFdm::uniform(p, self.grid.nodes_per_region),
            surf_pos: cp,
            surf_neg: cn,
            hysteresis: HysteresisState::neutral(),
        };
        let mut voltage = Vec::with_capacity(profile.len());
        let mut abort = None;
        for k in 0..profile.len() {
            let i = profile.current_a[k];
            let t = profile.temperature_c[k];
            let res = if k == 0 {
                f.hysteresis = f.hysteresis.update_sign(i);
                self.voltage(&f, i, t)
            } else {
                self.advance(&mut f, i, profile.time_s[k] - profile.time_s[k - 1], t)
                    .and_then(|_| self.voltage(&f, i, t))
            };
            match res {
                Ok(v) => voltage.push(v),
                Err(violation) => {
                    abort = Some(Abort { step: k, violation });
                    break;
                }
            }
        }
        Ok(Simulation {
            voltage,
            abort,
            diagnostics: None,
        })
    }
}

pub fn fdm_full_cell(
    profile: &TimeSeries,
    params: &PbmParams,
    hyst: &HysteresisParams,
    spec: &CellSpec,
    soc0: f64,
    grid: FdmGridConfig,
) -> Result<Simulation> {
    FdmCell::new(params.clone(), hyst.clone(), spec.clone(), grid)?.simulate(profile, soc0)
}
