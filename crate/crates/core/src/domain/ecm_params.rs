//! Lookup tables of the second-order RC equivalent circuit.

use serde::{Deserialize, Serialize};

use super::curves::{OcvSurface, Table2d};
use crate::error::{Error, Result};

/// SOC breakpoints of the ECM tables: 0 % to 100 % in 10 % steps.
pub const ECM_SOC_GRID: [f64; 11] = [0.0, 0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 1.0];

/// Temperature breakpoints of the ECM tables: −20 °C to 55 °C in 15 °C steps.
pub const ECM_TEMP_GRID_C: [f64; 6] = [-20.0, -5.0, 10.0, 25.0, 40.0, 55.0];

pub const ECM_TABLE_COUNT: usize = 5;
pub const ECM_IDENTIFICATION_LEN: usize = ECM_TABLE_COUNT * ECM_SOC_GRID.len() * ECM_TEMP_GRID_C.len();

const TABLE_KEYS: [&str; ECM_TABLE_COUNT] = ["R0_ohm", "R1_ohm", "R2_ohm", "C1_F", "C2_F"];

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EcmParams {
    #[serde(rename = "R0_ohm")]
    pub r0: Table2d,
    #[serde(rename = "R1_ohm")]
    pub r1: Table2d,
    #[serde(rename = "R2_ohm")]
    pub r2: Table2d,
    #[serde(rename = "C1_F")]
    pub c1: Table2d,
    #[serde(rename = "C2_F")]
    pub c2: Table2d,
    #[serde(rename = "ocv_V")]
    pub ocv: OcvSurface,
    /// Coulombic efficiency on charge; discharge is taken as lossless.
    pub charge_efficiency: f64,
}

/// R and C values looked up at one (SOC, temperature) point.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RcLookup {
    pub r0: f64,
    pub r1: f64,
    pub r2: f64,
    pub c1: f64,
    pub c2: f64,
}

impl EcmParams {
    /// Tables on the standard grid filled from closures of (SOC, °C).
    pub fn from_fns(
        r0: impl Fn(f64, f64) -> f64,
        r1: impl Fn(f64, f64) -> f64,
        r2: impl Fn(f64, f64) -> f64,
        c1: impl Fn(f64, f64) -> f64,
        c2: impl Fn(f64, f64) -> f64,
        ocv: OcvSurface,
    ) -> Self {
        let t = |f: &dyn Fn(f64, f64) -> f64| Table2d::from_fn(&ECM_SOC_GRID, &ECM_TEMP_GRID_C, f);
        Self {
            r0: t(&r0),
            r1: t(&r1),
            r2: t(&r2),
            c1: t(&c1),
            c2: t(&c2),
            ocv,
            charge_efficiency: 1.0,
        }
    }

    fn tables(&self) -> [&Table2d; ECM_TABLE_COUNT] {
        [&self.r0, &self.r1, &self.r2, &self.c1, &self.c2]
    }

    fn tables_mut(&mut self) -> [&mut Table2d; ECM_TABLE_COUNT] {
        [&mut self.r0, &mut self.r1, &mut self.r2, &mut self.c1, &mut self.c2]
    }

    pub fn validate(&self) -> Result<()> {
        for (t, key) in self.tables().into_iter().zip(TABLE_KEYS) {
            t.validate(key)?;
            if t.soc_grid != ECM_SOC_GRID || t.temp_grid_c != ECM_TEMP_GRID_C {
                return Err(Error::param(key, "table must use the standard 11 x 6 grid"));
            }
            if t.values.iter().any(|&v| !(v > 0.0)) {
                return Err(Error::param(key, "entries must be positive"));
            }
        }
        self.ocv.validate()?;
        if !(self.charge_efficiency > 0.0 && self.charge_efficiency <= 1.0) {
            return Err(Error::param("charge_efficiency", "must lie in (0, 1]"));
        }
        Ok(())
    }

    #[inline]
    pub fn lookup(&self, soc: f64, temp_c: f64) -> RcLookup {
        RcLookup {
            r0: self.r0.interp(soc, temp_c),
            r1: self.r1.interp(soc, temp_c),
            r2: self.r2.interp(soc, temp_c),
            c1: self.c1.interp(soc, temp_c),
            c2: self.c2.interp(soc, temp_c),
        }
    }

    #[inline]
    pub fn efficiency_for(&self, current_a: f64) -> f64 {
        if current_a < 0.0 {
            self.charge_efficiency
        } else {
            1.0
        }
    }

    /// All 330 tunable table entries, table by table (R0, R1, R2, C1, C2),
    /// SOC-major within each table.
    pub fn identification_vector(&self) -> Vec<f64> {
        self.tables()
            .into_iter()
            .flat_map(|t| t.values.iter().copied())
            .collect()
    }

    pub fn with_identification_vector(&self, v: &[f64]) -> Result<Self> {
        if v.len() != ECM_IDENTIFICATION_LEN {
            return Err(Error::InvalidInput(format!(
                "ECM identification vector has {} entries, expected {ECM_IDENTIFICATION_LEN}",
                v.len()
            )));
        }
        let mut p = self.clone();
        let per = ECM_SOC_GRID.len() * ECM_TEMP_GRID_C.len();
        for (k, t) in p.tables_mut().into_iter().enumerate() {
            t.values.copy_from_slice(&v[k * per..(k + 1) * per]);
        }
        Ok(p)
    }

    pub fn parameter_names() -> Vec<String> {
        let mut names = Vec::with_capacity(ECM_IDENTIFICATION_LEN);
        for key in TABLE_KEYS {
            for s in ECM_SOC_GRID {
                for t in ECM_TEMP_GRID_C {
                    names.push(format!("{key}[soc={s:.1},T={t}]"));
                }
            }
        }
        names
    }
}
