//! Finite-volume reference solvers for the unreduced equations.
//!
//! Both solvers use backward Euler in time on a fixed substep. They share the
//! kinetics, voltage assembly and hysteresis code with the reduced model, so
//! any difference between the two isolates the model-order reduction.

pub mod cell;
pub mod electrolyte;
pub mod solid;

pub use cell::{fdm_full_cell, FdmCell};
pub use electrolyte::{fdm_electrolyte, ElectrolyteFdm, ElectrolyteTrajectory};
pub use solid::{fdm_solid, DiffusivityRule, SolidFdm, SolidTrajectory};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FdmGridConfig {
    /// Radial shells per particle.
    pub radial_nodes: usize,
    /// Cells in each electrolyte region.
    pub nodes_per_region: usize,
    /// Time substep (s).
    pub substep_s: f64,
}

impl Default for FdmGridConfig {
    fn default() -> Self {
        Self {
            radial_nodes: 100,
            nodes_per_region: 50,
            substep_s: 0.1,
        }
    }
}

impl FdmGridConfig {
    pub fn validate(&self, sampling_dt: f64) -> Result<()> {
        if self.radial_nodes < 10 || self.nodes_per_region < 10 {
            return Err(Error::param("fdm grid", "node counts must be at least 10"));
        }
        if !(self.substep_s > 0.0 && self.substep_s <= sampling_dt) {
            return Err(Error::param("substep_s", "must be positive and no longer than the sample period"));
        }
        Ok(())
    }

    /// Number of equal substeps covering `dt`.
    pub(crate) fn substeps(&self, dt: f64) -> usize {
        ((dt / self.substep_s) - 1e-9).ceil().max(1.0) as usize
    }
}

/// Thomas algorithm for `sub[i]·x[i−1] + diag[i]·x[i] + sup[i]·x[i+1] = rhs[i]`.
/// `sub[0]` and `sup[n−1]` are ignored. Overwrites `rhs` with the solution.
pub(crate) fn solve_tridiagonal(sub: &[f64], diag: &[f64], sup: &[f64], rhs: &mut [f64], scratch: &mut Vec<f64>) {
    let n = diag.len();
    scratch.clear();
    scratch.resize(n, 0.0);
    let mut beta = diag[0];
    rhs[0] /= beta;
    for i in 1..n {
        scratch[i] = sup[i - 1] / beta;
        beta = diag[i] - sub[i] * scratch[i];
        rhs[i] = (rhs[i] - sub[i] * rhs[i - 1]) / beta;
    }
    for i in (0..n - 1).rev() {
        rhs[i] -= scratch[i + 1] * rhs[i + 1];
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tridiagonal_matches_dense_product() {
        let sub = [0.0, -1.0, -1.0, -1.0];
        let diag = [4.0, 4.0, 4.0, 4.0];
        let sup = [-1.0, -1.0, -1.0, 0.0];
        let x = [1.0, 2.0, -1.0, 0.5];
        let mut rhs: Vec<f64> = (0..4)
            .map(|i| {
                diag[i] * x[i] + if i > 0 { sub[i] * x[i - 1] } else { 0.0 } + if i < 3 { sup[i] * x[i + 1] } else { 0.0 }
            })
            .collect();
        solve_tridiagonal(&sub, &diag, &sup, &mut rhs, &mut Vec::new());
        for i in 0..4 {
            assert!((rhs[i] - x[i]).abs() < 1e-14);
        }
    }

    #[test]
    fn substeps_cover_the_interval() {
        let g = FdmGridConfig::default();
        assert_eq!(g.substeps(1.0), 10);
        assert_eq!(g.substeps(0.05), 1);
        assert!(g.validate(1.0).is_ok());
        assert!(FdmGridConfig { substep_s: 2.0, ..g }.validate(1.0).is_err());
    }
}
