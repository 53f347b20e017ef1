use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Nameplate data of the cell under test.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CellSpec {
    #[serde(rename = "capacity_Ah")]
    pub capacity_ah: f64,
    #[serde(rename = "v_min_V")]
    pub v_min: f64,
    #[serde(rename = "v_max_V")]
    pub v_max: f64,
    /// Coulombic efficiency applied to charging current.
    pub coulombic_efficiency: f64,
    pub sampling_dt_s: f64,
}

impl CellSpec {
    pub fn new(capacity_ah: f64, v_min: f64, v_max: f64, coulombic_efficiency: f64, sampling_dt_s: f64) -> Result<Self> {
        let s = Self {
            capacity_ah,
            v_min,
            v_max,
            coulombic_efficiency,
            sampling_dt_s,
        };
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.capacity_ah > 0.0 && self.capacity_ah.is_finite()) {
            return Err(Error::param("capacity_Ah", "must be positive"));
        }
        if !(self.v_min < self.v_max) {
            return Err(Error::param("v_min_V", "must be below v_max_V"));
        }
        if !(self.coulombic_efficiency > 0.0 && self.coulombic_efficiency <= 1.0) {
            return Err(Error::param("coulombic_efficiency", "must lie in (0, 1]"));
        }
        if !(self.sampling_dt_s > 0.0) {
            return Err(Error::param("sampling_dt_s", "must be positive"));
        }
        Ok(())
    }

    /// Efficiency applied to a current sample: unity on discharge (`i > 0`),
    /// the coulombic efficiency on charge.
    #[inline]
    pub fn efficiency_for(&self, current_a: f64) -> f64 {
        if current_a < 0.0 {
            self.coulombic_efficiency
        } else {
            1.0
        }
    }

    /// Current of one C at this capacity (A).
    pub fn one_c(&self) -> f64 {
        self.capacity_ah
    }
}

/// Highest C-rate applied in dynamic and pulse profiles at an ambient
/// temperature. Rates are reduced in the cold; linear between the nodes and
/// held beyond them.
pub fn max_c_rate(temp_c: f64) -> f64 {
    const NODES: [(f64, f64); 4] = [(-20.0, 0.5), (0.0, 1.0), (10.0, 1.5), (25.0, 3.0)];
    if temp_c <= NODES[0].0 {
        return NODES[0].1;
    }
    for w in NODES.windows(2) {
        let ((t0, c0), (t1, c1)) = (w[0], w[1]);
        if temp_c <= t1 {
            return c0 + (c1 - c0) * (temp_c - t0) / (t1 - t0);
        }
    }
    NODES[3].1
}
