//! One-dimensional electrolyte transport across the three cell regions.

use crate::domain::PbmParams;
use crate::error::Violation;
use crate::units::FARADAY;

use super::{solve_tridiagonal, FdmGridConfig};

#[derive(Clone, Debug)]
pub struct ElectrolyteFdm {
    /// Cell widths, positive electrode first.
    dx: Vec<f64>,
    /// Source per unit volume per ampere in each cell.
    source_per_amp: Vec<f64>,
    /// Cells per region.
    n: usize,
    porosity: f64,
    effective_factor: f64,
    pub c: Vec<f64>,
    sub: Vec<f64>,
    diag: Vec<f64>,
    sup: Vec<f64>,
    scratch: Vec<f64>,
}

impl ElectrolyteFdm {
    pub fn uniform(params: &PbmParams, nodes_per_region: usize) -> Self {
        let n = nodes_per_region;
        let lengths = [params.thickness_pos, params.thickness_sep, params.thickness_neg];
        let flux_per_amp = (1.0 - params.transference) / (FARADAY * params.electrode_area);
        let region_source = [
            -flux_per_amp / params.thickness_pos,
            0.0,
            flux_per_amp / params.thickness_neg,
        ];
        let mut dx = Vec::with_capacity(3 * n);
        let mut source_per_amp = Vec::with_capacity(3 * n);
        for r in 0..3 {
            for _ in 0..n {
                dx.push(lengths[r] / n as f64);
                source_per_amp.push(region_source[r]);
            }
        }
        let total = 3 * n;
        Self {
            dx,
            source_per_amp,
            n,
            porosity: params.porosity,
            effective_factor: params.porosity.powf(params.constants.bruggeman),
            c: vec![params.constants.c_e0; total],
            sub: vec![0.0; total],
            diag: vec![0.0; total],
            sup: vec![0.0; total],
            scratch: Vec::with_capacity(total),
        }
    }

    /// Backward-Euler step of `h` at constant current with bulk diffusivity `d_e`.
    pub fn step(&mut self, current: f64, d_e: f64, h: f64) {
        let d = d_e * self.effective_factor;
        let m = self.c.len();
        for i in 0..m {
            let w = if i > 0 { 2.0 * d / (self.dx[i - 1] + self.dx[i]) } else { 0.0 };
            let e = if i + 1 < m { 2.0 * d / (self.dx[i] + self.dx[i + 1]) } else { 0.0 };
            let cap = self.porosity * self.dx[i] / h;
            self.sub[i] = -w;
            self.sup[i] = -e;
            self.diag[i] = cap + w + e;
            self.c[i] = cap * self.c[i] + self.source_per_amp[i] * current * self.dx[i];
        }
        solve_tridiagonal(&self.sub, &self.diag, &self.sup, &mut self.c, &mut self.scratch);
    }

    /// Concentration at `x = 0` from the zero-gradient quadratic through the
    /// first two cell centres.
    pub fn c_x0(&self) -> f64 {
        self.c[0] - (self.c[1] - self.c[0]) / 8.0
    }

    pub fn c_xl(&self) -> f64 {
        let m = self.c.len();
        self.c[m - 1] - (self.c[m - 2] - self.c[m - 1]) / 8.0
    }

    /// Region averages (positive, separator, negative).
    pub fn region_averages(&self) -> [f64; 3] {
        let mut avg = [0.0; 3];
        for (r, a) in avg.iter_mut().enumerate() {
            let cells = r * self.n..(r + 1) * self.n;
            *a = self.c[cells].iter().sum::<f64>() / self.n as f64;
        }
        avg
    }

    /// Electrolyte lithium per unit area (mol/m²).
    pub fn total_lithium(&self) -> f64 {
        self.porosity * self.c.iter().zip(&self.dx).map(|(c, w)| c * w).sum::<f64>()
    }

    pub fn check(&self) -> Result<(), Violation> {
        let min = self.c.iter().cloned().fold(f64::INFINITY, f64::min).min(self.c_x0()).min(self.c_xl());
        if !(min > 0.0) {
            return Err(Violation::new("electrolyte concentration (mol/m3)", min));
        }
        Ok(())
    }

    pub fn cells(&self) -> &[f64] {
        &self.c
    }
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct ElectrolyteTrajectory {
    pub c_x0: Vec<f64>,
    pub c_xl: Vec<f64>,
    pub total_lithium: Vec<f64>,
    /// Final cell-centred profile.
    pub profile: Vec<f64>,
}

/// Solves the electrolyte under a piecewise-constant current, one value per
/// sample interval of length `dt`, at fixed bulk diffusivity `d_e`.
pub fn fdm_electrolyte(
    current: &[f64],
    params: &PbmParams,
    d_e: f64,
    dt: f64,
    grid: &FdmGridConfig,
) -> Result<ElectrolyteTrajectory, (usize, Violation)> {
    let mut fdm = ElectrolyteFdm::uniform(params, grid.nodes_per_region);
    let mut out = ElectrolyteTrajectory {
        c_x0: vec![fdm.c_x0()],
        c_xl: vec![fdm.c_xl()],
        total_lithium: vec![fdm.total_lithium()],
        profile: Vec::new(),
    };
    let m = grid.substeps(dt);
    let h = dt / m as f64;
    for (k, &i) in current.iter().enumerate() {
        for _ in 0..m {
            fdm.step(i, d_e, h);
        }
        fdm.check().map_err(|v| (k + 1, v))?;
        out.c_x0.push(fdm.c_x0());
        out.c_xl.push(fdm.c_xl());
        out.total_lithium.push(fdm.total_lithium());
    }
    out.profile = fdm.c.clone();
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::reference;

    #[test]
    fn zero_current_stays_uniform() {
        let p = reference::pbm_params();
        let t = fdm_electrolyte(&[0.0; 30], &p, 4e-10, 1.0, &FdmGridConfig::default()).unwrap();
        let worst = t.profile.iter().map(|c| (c - 1200.0).abs()).fold(0.0, f64::max);
        assert!(worst < 1e-7, "{worst}");
    }

    #[test]
    fn symmetric_cell_gives_antisymmetric_steady_profile() {
        let mut p = reference::pbm_params();
        p.thickness_pos = 70e-6;
        p.thickness_neg = 70e-6;
        let grid = FdmGridConfig {
            substep_s: 5.0,
            ..Default::default()
        };
        let t = fdm_electrolyte(&vec![166.0; 400], &p, 4e-10, 5.0, &grid).unwrap();
        let m = t.profile.len();
        for i in 0..m / 2 {
            let a = t.profile[i] - 1200.0;
            let b = t.profile[m - 1 - i] - 1200.0;
            assert!((a + b).abs() < 1e-6, "{a} {b}");
        }
    }
}
