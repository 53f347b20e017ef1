//! Terminal-voltage assembly shared by the reduced model and the
//! finite-volume reference.
//!
//! ```text
//! V = U_p − U_n − (η_p − η_n)
//!     − I/(2A)·(L_p + 2L_s + L_n)/κ_eff
//!     + (κ_D/κ)·(ln c_e(0) − ln c_e(L))
//!     − I·R_c + M0·s + M·h
//! ```
//!
//! with `κ_D/κ = 2R̄T(1 − t⁺)(1 + β)/F` and `κ_eff = κ·ε^b`. The voltage is
//! returned as its signed contributions so that the logged terms sum to the
//! reported voltage exactly.

use crate::domain::{soc_from_bulk_concentration, PbmParams, PbmProperties};
use crate::error::Violation;
use crate::hysteresis::{HysteresisParams, HysteresisState};
use crate::units::{celsius_to_kelvin, FARADAY, GAS_CONSTANT};

use super::kinetics::{exchange_current, kinetic_overpotential, KineticConstants, Overpotential};

/// Internal concentrations needed to evaluate the voltage.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CellSnapshot {
    pub current: f64,
    pub c_surf_pos: f64,
    pub c_surf_neg: f64,
    pub c_bulk_neg: f64,
    /// Region-average electrolyte concentration in each electrode.
    pub c_e_pos: f64,
    pub c_e_neg: f64,
    /// Electrolyte concentration at the two current collectors.
    pub c_e_x0: f64,
    pub c_e_xl: f64,
    pub hysteresis: HysteresisState,
}

pub const TERM_NAMES: [&str; 8] = [
    "ocp_pos_V",
    "neg_ocp_neg_V",
    "neg_eta_pos_V",
    "eta_neg_V",
    "electrolyte_ohmic_V",
    "electrolyte_diffusion_V",
    "contact_V",
    "hysteresis_V",
];

/// Signed voltage contributions, in [`TERM_NAMES`] order.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct VoltageTerms {
    pub terms: [f64; 8],
    pub eta_pos: Overpotential,
    pub eta_neg: Overpotential,
    pub soc: f64,
}

impl VoltageTerms {
    /// Sum of the contributions in fixed order.
    #[inline]
    pub fn total(&self) -> f64 {
        self.terms.iter().fold(0.0, |acc, t| acc + t)
    }
}

/// Intercalation current densities `(J_p, J_n)` (A/m², positive into the
/// particle) for cell current `current`.
#[inline]
pub fn interfacial_current(params: &PbmParams, current: f64) -> (f64, f64) {
    let area = params.electrode_area;
    (
        current / (params.specific_area_pos() * area * params.thickness_pos),
        -current / (params.specific_area_neg() * area * params.thickness_neg),
    )
}

pub fn assemble(
    params: &PbmParams,
    props: &PbmProperties,
    hyst: &HysteresisParams,
    snap: &CellSnapshot,
) -> Result<VoltageTerms, Violation> {
    let c = &params.constants;
    let temp_k = celsius_to_kelvin(props.temp_c);
    let kc = KineticConstants {
        alpha: c.alpha,
        rho: c.rho,
        theta_c: c.theta_c,
    };
    let (j_pos, j_neg) = interfacial_current(params, snap.current);

    let i0_pos = exchange_current(snap.c_surf_pos, c.c_max_pos, snap.c_e_pos, props.rate_constant_pos)
        .map_err(|v| Violation::new(format!("positive {}", v.quantity), v.value))?;
    let i0_neg = exchange_current(snap.c_surf_neg, c.c_max_neg, snap.c_e_neg, props.rate_constant_neg)
        .map_err(|v| Violation::new(format!("negative {}", v.quantity), v.value))?;
    if !(snap.c_e_x0 > 0.0 && snap.c_e_xl > 0.0) {
        return Err(Violation::new(
            "electrolyte boundary concentration (mol/m3)",
            snap.c_e_x0.min(snap.c_e_xl),
        ));
    }
    let eta_pos = kinetic_overpotential(j_pos, i0_pos, snap.c_surf_pos, c.c_max_pos, kc, temp_k);
    let eta_neg = kinetic_overpotential(j_neg, i0_neg, snap.c_surf_neg, c.c_max_neg, kc, temp_k);

    let kappa_eff = props.conductivity * params.porosity.powf(c.bruggeman);
    let ohmic = -snap.current / (2.0 * params.electrode_area)
        * (params.thickness_pos + 2.0 * params.thickness_sep + params.thickness_neg)
        / kappa_eff;
    let kd_ratio = 2.0 * GAS_CONSTANT * temp_k * (1.0 - params.transference) * (1.0 + c.beta) / FARADAY;
    let diffusion = kd_ratio * (snap.c_e_x0.ln() - snap.c_e_xl.ln());

    let soc = soc_from_bulk_concentration(snap.c_bulk_neg, params);
    let terms = [
        params.ocp_pos.eval(snap.c_surf_pos / c.c_max_pos),
        -params.ocp_neg.eval(snap.c_surf_neg / c.c_max_neg),
        -eta_pos.total(),
        eta_neg.total(),
        ohmic,
        diffusion,
        -snap.current * params.contact_resistance,
        snap.hysteresis.voltage(soc, props.temp_c, hyst),
    ];
    Ok(VoltageTerms {
        terms,
        eta_pos,
        eta_neg,
        soc,
    })
}
