//! Physics parameters of the reduced-order electrochemical model.
//!
//! Twelve temperature-independent scalars and six segmented-Arrhenius
//! properties form the identification vector (12 + 6·5·2 = 72 entries). The
//! remaining material constants and the electrode OCP curves are fixed.

use serde::{Deserialize, Serialize};

use super::arrhenius::{SegmentedArrhenius, SEGMENT_COUNT};
use super::curves::OcpCurve;
use crate::error::{Error, Result};
use crate::units::{FARADAY, SECONDS_PER_HOUR};

pub const PBM_SCALAR_COUNT: usize = 12;
pub const PBM_ARRHENIUS_COUNT: usize = 6;
pub const PBM_IDENTIFICATION_LEN: usize = PBM_SCALAR_COUNT + PBM_ARRHENIUS_COUNT * SEGMENT_COUNT * 2;

/// Material constants that stay fixed during identification.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PbmConstants {
    #[serde(rename = "c_s_max_p_mol_m3")]
    pub c_max_pos: f64,
    #[serde(rename = "c_s_max_n_mol_m3")]
    pub c_max_neg: f64,
    /// Initial (and volume-averaged) electrolyte concentration.
    #[serde(rename = "c_e0_mol_m3")]
    pub c_e0: f64,
    /// Charge-transfer symmetry factor.
    pub alpha: f64,
    /// Activity factor in the diffusional conductivity.
    pub beta: f64,
    /// Intercalation overpotential coefficient.
    #[serde(rename = "rho_V_m2_A")]
    pub rho: f64,
    /// Stoichiometry at which the intercalation term switches branch.
    pub theta_c: f64,
    #[serde(rename = "mu_p_m3_mol")]
    pub mu_pos: f64,
    #[serde(rename = "mu_n_m3_mol")]
    pub mu_neg: f64,
    pub bruggeman: f64,
}

/// The six temperature-dependent properties.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PbmTransport {
    #[serde(rename = "D_s_p_m2_s")]
    pub diffusivity_pos: SegmentedArrhenius,
    #[serde(rename = "D_s_n_m2_s")]
    pub diffusivity_neg: SegmentedArrhenius,
    #[serde(rename = "D_e_m2_s")]
    pub electrolyte_diffusivity: SegmentedArrhenius,
    #[serde(rename = "k0_p")]
    pub rate_constant_pos: SegmentedArrhenius,
    #[serde(rename = "k0_n")]
    pub rate_constant_neg: SegmentedArrhenius,
    #[serde(rename = "kappa_S_m")]
    pub conductivity: SegmentedArrhenius,
}

impl PbmTransport {
    fn as_array(&self) -> [&SegmentedArrhenius; PBM_ARRHENIUS_COUNT] {
        [
            &self.diffusivity_pos,
            &self.diffusivity_neg,
            &self.electrolyte_diffusivity,
            &self.rate_constant_pos,
            &self.rate_constant_neg,
            &self.conductivity,
        ]
    }

    fn as_array_mut(&mut self) -> [&mut SegmentedArrhenius; PBM_ARRHENIUS_COUNT] {
        [
            &mut self.diffusivity_pos,
            &mut self.diffusivity_neg,
            &mut self.electrolyte_diffusivity,
            &mut self.rate_constant_pos,
            &mut self.rate_constant_neg,
            &mut self.conductivity,
        ]
    }
}

const TRANSPORT_KEYS: [(&str, &str); PBM_ARRHENIUS_COUNT] = [
    ("D_s_p", "m2_s"),
    ("D_s_n", "m2_s"),
    ("D_e", "m2_s"),
    ("k0_p", "m2.5_mol0.5_s"),
    ("k0_n", "m2.5_mol0.5_s"),
    ("kappa", "S_m"),
];

const SCALAR_KEYS: [&str; PBM_SCALAR_COUNT] = [
    "A_m2",
    "L_p_m",
    "L_s_m",
    "L_n_m",
    "R_p_m",
    "R_n_m",
    "eps_e",
    "theta_n_0pct",
    "theta_n_100pct",
    "theta_p_0pct",
    "R_c_ohm",
    "t0_plus",
];

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PbmParams {
    #[serde(rename = "A_m2")]
    pub electrode_area: f64,
    #[serde(rename = "L_p_m")]
    pub thickness_pos: f64,
    #[serde(rename = "L_s_m")]
    pub thickness_sep: f64,
    #[serde(rename = "L_n_m")]
    pub thickness_neg: f64,
    #[serde(rename = "R_p_m")]
    pub radius_pos: f64,
    #[serde(rename = "R_n_m")]
    pub radius_neg: f64,
    /// Electrolyte volume fraction, shared by all three regions.
    #[serde(rename = "eps_e")]
    pub porosity: f64,
    #[serde(rename = "theta_n_0pct")]
    pub theta_neg_empty: f64,
    #[serde(rename = "theta_n_100pct")]
    pub theta_neg_full: f64,
    #[serde(rename = "theta_p_0pct")]
    pub theta_pos_empty: f64,
    #[serde(rename = "R_c_ohm")]
    pub contact_resistance: f64,
    #[serde(rename = "t0_plus")]
    pub transference: f64,
    pub constants: PbmConstants,
    pub transport: PbmTransport,
    pub ocp_pos: OcpCurve,
    pub ocp_neg: OcpCurve,
}

/// Temperature-dependent properties evaluated at one temperature.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PbmProperties {
    pub temp_c: f64,
    pub diffusivity_pos: f64,
    pub diffusivity_neg: f64,
    pub electrolyte_diffusivity: f64,
    pub rate_constant_pos: f64,
    pub rate_constant_neg: f64,
    pub conductivity: f64,
}

impl PbmParams {
    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("A_m2", self.electrode_area),
            ("L_p_m", self.thickness_pos),
            ("L_s_m", self.thickness_sep),
            ("L_n_m", self.thickness_neg),
            ("R_p_m", self.radius_pos),
            ("R_n_m", self.radius_neg),
            ("c_s_max_p_mol_m3", self.constants.c_max_pos),
            ("c_s_max_n_mol_m3", self.constants.c_max_neg),
            ("c_e0_mol_m3", self.constants.c_e0),
            ("alpha", self.constants.alpha),
        ];
        for (name, v) in positive {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::param(name, "must be positive and finite"));
            }
        }
        let unit = [
            ("eps_e", self.porosity),
            ("theta_n_0pct", self.theta_neg_empty),
            ("theta_n_100pct", self.theta_neg_full),
            ("theta_p_0pct", self.theta_pos_empty),
            ("t0_plus", self.transference),
            ("theta_c", self.constants.theta_c),
        ];
        for (name, v) in unit {
            if !(v > 0.0 && v < 1.0) {
                return Err(Error::param(name, "must lie strictly inside (0, 1)"));
            }
        }
        if self.theta_neg_empty >= self.theta_neg_full {
            return Err(Error::param("theta_n_0pct", "must be below theta_n_100pct"));
        }
        let tp = self.theta_pos_full();
        if !(tp > 0.0 && tp < 1.0) {
            return Err(Error::param(
                "theta_p_100pct",
                format!("derived value {tp} leaves (0, 1); capacity balance infeasible"),
            ));
        }
        if !(self.contact_resistance >= 0.0) {
            return Err(Error::param("R_c_ohm", "must be non-negative"));
        }
        for (a, (key, _)) in self.transport.as_array().iter().zip(TRANSPORT_KEYS) {
            a.validate(key)?;
        }
        self.ocp_pos.validate("ocp_pos")?;
        self.ocp_neg.validate("ocp_neg")?;
        Ok(())
    }

    /// Solid volume fraction, identical in both electrodes.
    pub fn solid_fraction(&self) -> f64 {
        1.0 - self.porosity
    }

    pub fn specific_area_pos(&self) -> f64 {
        3.0 * self.solid_fraction() / self.radius_pos
    }

    pub fn specific_area_neg(&self) -> f64 {
        3.0 * self.solid_fraction() / self.radius_neg
    }

    /// Positive-electrode stoichiometry at 100 % SOC, from the capacity balance
    /// between the two electrode windows.
    pub fn theta_pos_full(&self) -> f64 {
        let window_neg = self.theta_neg_full - self.theta_neg_empty;
        self.theta_pos_empty
            - self.thickness_neg * self.constants.c_max_neg * window_neg
                / (self.thickness_pos * self.constants.c_max_pos)
    }

    /// Usable capacity implied by the negative-electrode window (Ah).
    pub fn capacity_ah(&self) -> f64 {
        FARADAY
            * self.electrode_area
            * self.thickness_neg
            * self.solid_fraction()
            * self.constants.c_max_neg
            * (self.theta_neg_full - self.theta_neg_empty)
            / SECONDS_PER_HOUR
    }

    pub fn total_thickness(&self) -> f64 {
        self.thickness_pos + self.thickness_sep + self.thickness_neg
    }

    /// Stoichiometries (positive, negative) at a given SOC.
    pub fn stoichiometry_at_soc(&self, soc: f64) -> (f64, f64) {
        let tn = self.theta_neg_empty + soc * (self.theta_neg_full - self.theta_neg_empty);
        let tp = self.theta_pos_empty + soc * (self.theta_pos_full() - self.theta_pos_empty);
        (tp, tn)
    }

    pub fn properties_at(&self, temp_c: f64) -> PbmProperties {
        let t = &self.transport;
        PbmProperties {
            temp_c,
            diffusivity_pos: t.diffusivity_pos.eval(temp_c),
            diffusivity_neg: t.diffusivity_neg.eval(temp_c),
            electrolyte_diffusivity: t.electrolyte_diffusivity.eval(temp_c),
            rate_constant_pos: t.rate_constant_pos.eval(temp_c),
            rate_constant_neg: t.rate_constant_neg.eval(temp_c),
            conductivity: t.conductivity.eval(temp_c),
        }
    }

    fn scalars(&self) -> [f64; PBM_SCALAR_COUNT] {
        [
            self.electrode_area,
            self.thickness_pos,
            self.thickness_sep,
            self.thickness_neg,
            self.radius_pos,
            self.radius_neg,
            self.porosity,
            self.theta_neg_empty,
            self.theta_neg_full,
            self.theta_pos_empty,
            self.contact_resistance,
            self.transference,
        ]
    }

    fn scalars_mut(&mut self) -> [&mut f64; PBM_SCALAR_COUNT] {
        [
            &mut self.electrode_area,
            &mut self.thickness_pos,
            &mut self.thickness_sep,
            &mut self.thickness_neg,
            &mut self.radius_pos,
            &mut self.radius_neg,
            &mut self.porosity,
            &mut self.theta_neg_empty,
            &mut self.theta_neg_full,
            &mut self.theta_pos_empty,
            &mut self.contact_resistance,
            &mut self.transference,
        ]
    }

    /// Flattens the identified parameters: the twelve scalars, then for each
    /// property its five reference values followed by its five activation
    /// energies.
    pub fn identification_vector(&self) -> Vec<f64> {
        let mut v = Vec::with_capacity(PBM_IDENTIFICATION_LEN);
        v.extend_from_slice(&self.scalars());
        for a in self.transport.as_array() {
            v.extend_from_slice(&a.ref_values);
            v.extend_from_slice(&a.activation_energies);
        }
        v
    }

    /// Inverse of [`identification_vector`](Self::identification_vector); fixed
    /// constants and OCP curves are taken from `self`. The result is not
    /// validated.
    pub fn with_identification_vector(&self, v: &[f64]) -> Result<Self> {
        if v.len() != PBM_IDENTIFICATION_LEN {
            return Err(Error::InvalidInput(format!(
                "PBM identification vector has {} entries, expected {PBM_IDENTIFICATION_LEN}",
                v.len()
            )));
        }
        let mut p = self.clone();
        for (dst, &src) in p.scalars_mut().into_iter().zip(&v[..PBM_SCALAR_COUNT]) {
            *dst = src;
        }
        let mut offset = PBM_SCALAR_COUNT;
        for a in p.transport.as_array_mut() {
            a.ref_values.copy_from_slice(&v[offset..offset + SEGMENT_COUNT]);
            a.activation_energies
                .copy_from_slice(&v[offset + SEGMENT_COUNT..offset + 2 * SEGMENT_COUNT]);
            offset += 2 * SEGMENT_COUNT;
        }
        Ok(p)
    }

    pub fn parameter_names() -> Vec<String> {
        let mut names: Vec<String> = SCALAR_KEYS.iter().map(|s| s.to_string()).collect();
        for (key, unit) in TRANSPORT_KEYS {
            for k in 0..SEGMENT_COUNT {
                names.push(format!("{key}_ref_{unit}[{k}]"));
            }
            for k in 0..SEGMENT_COUNT {
                names.push(format!("{key}_Ea_J_mol[{k}]"));
            }
        }
        names
    }
}

/// Maps the negative-electrode bulk concentration to SOC through the
/// stoichiometry window, clamped to `[0, 1]`.
pub fn soc_from_bulk_concentration(c_bulk_neg: f64, params: &PbmParams) -> f64 {
    let theta = c_bulk_neg / params.constants.c_max_neg;
    let soc = (theta - params.theta_neg_empty) / (params.theta_neg_full - params.theta_neg_empty);
    soc.clamp(0.0, 1.0)
}
