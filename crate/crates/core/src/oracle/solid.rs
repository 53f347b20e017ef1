//! Spherical diffusion on equal-width finite-volume shells.

use crate::error::Violation;
use crate::pbm::kinetics::effective_diffusivity;
use crate::pbm::Particle;
use crate::units::FARADAY;

use super::{solve_tridiagonal, FdmGridConfig};

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum DiffusivityRule {
    Constant(f64),
    /// `D_ref·exp(μ·|c_surf − c_bulk|)`, lagged by one substep.
    SurfaceGradient { d_ref: f64, mu: f64 },
}

impl DiffusivityRule {
    fn eval(&self, c_surf: f64, c_bulk: f64) -> f64 {
        match *self {
            DiffusivityRule::Constant(d) => d,
            DiffusivityRule::SurfaceGradient { d_ref, mu } => effective_diffusivity(c_surf, c_bulk, mu, d_ref),
        }
    }
}

/// Concentration field of one particle.
#[derive(Clone, Debug)]
pub struct SolidFdm {
    particle: Particle,
    dr: f64,
    /// Shell volumes over 4π.
    vol: Vec<f64>,
    /// Inner-face areas over 4π (index `i` is the face between `i−1` and `i`).
    face: Vec<f64>,
    total_vol: f64,
    pub c: Vec<f64>,
    sub: Vec<f64>,
    diag: Vec<f64>,
    sup: Vec<f64>,
    scratch: Vec<f64>,
}

impl SolidFdm {
    pub fn uniform(particle: Particle, nodes: usize, c0: f64) -> Self {
        let dr = particle.radius / nodes as f64;
        let vol: Vec<f64> = (0..nodes)
            .map(|i| {
                let (a, b) = (i as f64 * dr, (i + 1) as f64 * dr);
                (b * b * b - a * a * a) / 3.0
            })
            .collect();
        let face = (0..=nodes).map(|i| (i as f64 * dr).powi(2)).collect();
        let total_vol = particle.radius.powi(3) / 3.0;
        Self {
            particle,
            dr,
            vol,
            face,
            total_vol,
            c: vec![c0; nodes],
            sub: vec![0.0; nodes],
            diag: vec![0.0; nodes],
            sup: vec![0.0; nodes],
            scratch: Vec::with_capacity(nodes),
        }
    }

    pub fn c_bulk(&self) -> f64 {
        self.c.iter().zip(&self.vol).map(|(c, v)| c * v).sum::<f64>() / self.total_vol
    }

    /// Surface value from the quadratic through the two outer cell centres
    /// that honours the boundary gradient `−j/D`.
    pub fn c_surf_with(&self, flux: f64, d: f64) -> f64 {
        let n = self.c.len();
        let (ca, cb) = (self.c[n - 1], self.c[n - 2]);
        let g = -flux / FARADAY / d;
        ca + g * self.dr / 2.0 - (cb - ca + g * self.dr) / 8.0
    }

    /// Backward-Euler step of `h` under pore-wall current density `flux`
    /// (A/m², positive out of the particle) and diffusivity `d`.
    pub fn step(&mut self, flux: f64, d: f64, h: f64) {
        let n = self.c.len();
        let k = d / self.dr;
        for i in 0..n {
            let w = if i > 0 { k * self.face[i] } else { 0.0 };
            let e = if i + 1 < n { k * self.face[i + 1] } else { 0.0 };
            let m = self.vol[i] / h;
            self.sub[i] = -w;
            self.sup[i] = -e;
            self.diag[i] = m + w + e;
            self.c[i] *= m;
        }
        self.c[n - 1] -= self.face[n] * flux / FARADAY;
        solve_tridiagonal(&self.sub, &self.diag, &self.sup, &mut self.c, &mut self.scratch);
    }

    pub fn particle(&self) -> Particle {
        self.particle
    }
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct SolidTrajectory {
    pub c_surf: Vec<f64>,
    pub c_bulk: Vec<f64>,
}

/// Solves one particle under a piecewise-constant flux, one value per sample
/// interval of length `dt`. Entry 0 of the output is the initial state; entry
/// `k` is the state after interval `k`.
pub fn fdm_solid(
    flux: &[f64],
    rule: DiffusivityRule,
    particle: Particle,
    c0: f64,
    dt: f64,
    grid: &FdmGridConfig,
) -> Result<SolidTrajectory, (usize, Violation)> {
    let mut fdm = SolidFdm::uniform(particle, grid.radial_nodes, c0);
    let mut out = SolidTrajectory {
        c_surf: vec![c0],
        c_bulk: vec![c0],
    };
    let m = grid.substeps(dt);
    let h = dt / m as f64;
    let mut surf = c0;
    for (k, &j) in flux.iter().enumerate() {
        for _ in 0..m {
            let d = rule.eval(surf, fdm.c_bulk());
            fdm.step(j, d, h);
            surf = fdm.c_surf_with(j, d);
        }
        if !(surf > 0.0 && surf < particle.c_max) {
            return Err((k + 1, Violation::new("surface concentration (mol/m3)", surf)));
        }
        out.c_surf.push(surf);
        out.c_bulk.push(fdm.c_bulk());
    }
    Ok(out)
}
