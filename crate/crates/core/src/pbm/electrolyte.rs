//! Two-state electrolyte model built on a piecewise-quadratic profile.
//!
//! The concentration is quadratic in each of the three regions: even in `x`
//! in the positive electrode (zero flux at the current collector), even in
//! `L − x` in the negative electrode and a full quadratic in the separator.
//! Continuity of concentration and flux at both interfaces plus the three
//! region averages fix the seven coefficients. The steady profile under
//! constant current belongs to this family, so the model is exact at steady
//! state.
//!
//! The states are the deviations of the electrode-region averages from the
//! initial concentration. The separator average follows from lithium
//! conservation, which therefore holds identically.

use serde::{Deserialize, Serialize};

use crate::domain::PbmParams;
use crate::error::Violation;
use crate::units::FARADAY;

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct ElectrolyteRomState {
    /// Deviation of the positive- and negative-region averages (mol/m³).
    pub u: [f64; 2],
}

/// Geometry-dependent linear maps of the profile realization.
#[derive(Clone, Debug)]
pub struct ElectrolyteRom {
    c_e0: f64,
    lengths: [f64; 3],
    porosity: f64,
    /// Interface gradients `[g(L_p), g(L_p + L_s)]` per unit state.
    grad: [[f64; 2]; 2],
    /// Boundary values `[c(0), c(L)]` minus `c_e0`, per unit state.
    edge: [[f64; 2]; 2],
    /// Interface values minus `c_e0`, per unit state.
    iface: [[f64; 2]; 2],
    /// State matrix divided by the effective diffusivity.
    a_unit: [[f64; 2]; 2],
    /// Input vector per ampere.
    b: [f64; 2],
    effective_factor: f64,
    cache: Option<Zoh>,
}

#[derive(Clone, Copy, Debug)]
struct Zoh {
    d_eff: f64,
    dt: f64,
    phi: [[f64; 2]; 2],
    gamma: [f64; 2],
}

/// Gaussian elimination with partial pivoting on a small dense system.
fn solve<const N: usize>(mut a: [[f64; N]; N], mut b: [f64; N]) -> [f64; N] {
    for col in 0..N {
        let piv = (col..N)
            .max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))
            .unwrap();
        a.swap(col, piv);
        b.swap(col, piv);
        for row in col + 1..N {
            let f = a[row][col] / a[col][col];
            for k in col..N {
                a[row][k] -= f * a[col][k];
            }
            b[row] -= f * b[col];
        }
    }
    let mut x = [0.0; N];
    for row in (0..N).rev() {
        let s: f64 = (row + 1..N).map(|k| a[row][k] * x[k]).sum();
        x[row] = (b[row] - s) / a[row][row];
    }
    x
}

/// Profile coefficients `[a_p, b_p, a_s, b_s, d_s, a_n, b_n]` for region
/// averages `avg` (deviations).
fn profile(lengths: [f64; 3], avg: [f64; 3]) -> [f64; 7] {
    let [lp, ls, ln] = lengths;
    let m = [
        [1.0, lp * lp / 3.0, 0.0, 0.0, 0.0, 0.0, 0.0],
        [0.0, 0.0, 1.0, ls / 2.0, ls * ls / 3.0, 0.0, 0.0],
        [0.0, 0.0, 0.0, 0.0, 0.0, 1.0, ln * ln / 3.0],
        [1.0, lp * lp, -1.0, 0.0, 0.0, 0.0, 0.0],
        [0.0, 2.0 * lp, 0.0, -1.0, 0.0, 0.0, 0.0],
        [0.0, 0.0, 1.0, ls, ls * ls, -1.0, -ln * ln],
        [0.0, 0.0, 0.0, 1.0, 2.0 * ls, 0.0, 2.0 * ln],
    ];
    solve(m, [avg[0], avg[1], avg[2], 0.0, 0.0, 0.0, 0.0])
}

fn mat_vec(m: &[[f64; 2]; 2], v: [f64; 2]) -> [f64; 2] {
    [m[0][0] * v[0] + m[0][1] * v[1], m[1][0] * v[0] + m[1][1] * v[1]]
}

/// `exp(A·t)` and `A⁻¹(exp(A·t) − I)·b` for a 2 × 2 matrix.
fn zoh_2x2(a: [[f64; 2]; 2], b: [f64; 2], t: f64) -> ([[f64; 2]; 2], [f64; 2]) {
    let s = 0.5 * (a[0][0] + a[1][1]);
    let det = a[0][0] * a[1][1] - a[0][1] * a[1][0];
    let q2 = s * s - det;
    let (c, sc) = if q2 >= 0.0 {
        let q = q2.sqrt();
        let qt = q * t;
        let sinhc = if qt.abs() < 1e-8 { t } else { qt.sinh() / q };
        (qt.cosh(), sinhc)
    } else {
        let q = (-q2).sqrt();
        ((q * t).cos(), (q * t).sin() / q)
    };
    let e = (s * t).exp();
    let phi = [
        [e * (c + sc * (a[0][0] - s)), e * sc * a[0][1]],
        [e * sc * a[1][0], e * (c + sc * (a[1][1] - s))],
    ];
    let rhs = mat_vec(&[[phi[0][0] - 1.0, phi[0][1]], [phi[1][0], phi[1][1] - 1.0]], b);
    let gamma = solve(a, rhs);
    (phi, gamma)
}

impl ElectrolyteRom {
    pub fn new(params: &PbmParams) -> Self {
        let lengths = [params.thickness_pos, params.thickness_sep, params.thickness_neg];
        let [lp, ls, ln] = lengths;
        // Unit perturbations of (u_p, u_n) with the separator carrying the
        // conserving balance.
        let basis = [[1.0, -lp / ls, 0.0], [0.0, -ln / ls, 1.0]];
        let mut grad = [[0.0; 2]; 2];
        let mut edge = [[0.0; 2]; 2];
        let mut iface = [[0.0; 2]; 2];
        for (k, avg) in basis.iter().enumerate() {
            let [a_p, b_p, a_s, b_s, d_s, a_n, b_n] = profile(lengths, *avg);
            grad[0][k] = 2.0 * b_p * lp;
            grad[1][k] = -2.0 * b_n * ln;
            edge[0][k] = a_p;
            edge[1][k] = a_n;
            iface[0][k] = a_s;
            iface[1][k] = a_s + b_s * ls + d_s * ls * ls;
        }
        let eps = params.porosity;
        let a_unit = [
            [grad[0][0] / (eps * lp), grad[0][1] / (eps * lp)],
            [-grad[1][0] / (eps * ln), -grad[1][1] / (eps * ln)],
        ];
        let flux_per_amp = (1.0 - params.transference) / (FARADAY * params.electrode_area);
        let b = [-flux_per_amp / (eps * lp), flux_per_amp / (eps * ln)];
        Self {
            c_e0: params.constants.c_e0,
            lengths,
            porosity: eps,
            grad,
            edge,
            iface,
            a_unit,
            b,
            effective_factor: eps.powf(params.constants.bruggeman),
            cache: None,
        }
    }

    /// Effective diffusivity `D_e·ε^b` for a bulk value `d_e`.
    #[inline]
    pub fn effective_diffusivity(&self, d_e: f64) -> f64 {
        d_e * self.effective_factor
    }

    /// Concentrations at the positive and negative current collectors.
    #[inline]
    pub fn boundary(&self, s: &ElectrolyteRomState) -> (f64, f64) {
        let e = mat_vec(&self.edge, s.u);
        (self.c_e0 + e[0], self.c_e0 + e[1])
    }

    /// Concentrations at the two separator interfaces.
    pub fn interfaces(&self, s: &ElectrolyteRomState) -> (f64, f64) {
        let e = mat_vec(&self.iface, s.u);
        (self.c_e0 + e[0], self.c_e0 + e[1])
    }

    /// Region averages (positive, separator, negative).
    #[inline]
    pub fn region_averages(&self, s: &ElectrolyteRomState) -> [f64; 3] {
        let [lp, ls, ln] = self.lengths;
        let us = -(lp * s.u[0] + ln * s.u[1]) / ls;
        [self.c_e0 + s.u[0], self.c_e0 + us, self.c_e0 + s.u[1]]
    }

    /// Electrolyte lithium per unit electrode area (mol/m²).
    pub fn total_lithium(&self, s: &ElectrolyteRomState) -> f64 {
        let avg = self.region_averages(s);
        self.porosity * (self.lengths[0] * avg[0] + self.lengths[1] * avg[1] + self.lengths[2] * avg[2])
    }

    /// Interface gradients `dc/dx` at `L_p` and `L_p + L_s`.
    pub fn interface_gradients(&self, s: &ElectrolyteRomState) -> [f64; 2] {
        mat_vec(&self.grad, s.u)
    }

    /// Advances the state by `dt` under constant current, with exact
    /// zero-order-hold discretization. `d_e` is the bulk diffusivity.
    pub fn step(
        &mut self,
        s: &ElectrolyteRomState,
        current: f64,
        dt: f64,
        d_e: f64,
    ) -> Result<ElectrolyteRomState, Violation> {
        let d_eff = self.effective_diffusivity(d_e);
        let zoh = match self.cache {
            Some(z) if z.d_eff == d_eff && z.dt == dt => z,
            _ => {
                let a = [
                    [self.a_unit[0][0] * d_eff, self.a_unit[0][1] * d_eff],
                    [self.a_unit[1][0] * d_eff, self.a_unit[1][1] * d_eff],
                ];
                let (phi, gamma) = zoh_2x2(a, self.b, dt);
                let z = Zoh { d_eff, dt, phi, gamma };
                self.cache = Some(z);
                z
            }
        };
        let free = mat_vec(&zoh.phi, s.u);
        let next = ElectrolyteRomState {
            u: [free[0] + zoh.gamma[0] * current, free[1] + zoh.gamma[1] * current],
        };
        self.check(&next)?;
        Ok(next)
    }

    fn check(&self, s: &ElectrolyteRomState) -> Result<(), Violation> {
        let (c0, cl) = self.boundary(s);
        let (ci, cj) = self.interfaces(s);
        for (name, v) in [
            ("electrolyte concentration at x=0 (mol/m3)", c0),
            ("electrolyte concentration at x=L (mol/m3)", cl),
            ("electrolyte concentration at x=L_p (mol/m3)", ci),
            ("electrolyte concentration at x=L_p+L_s (mol/m3)", cj),
        ] {
            if !(v > 0.0) {
                return Err(Violation::new(name, v));
            }
        }
        Ok(())
    }

    /// Closed-form steady state under constant current `current` with
    /// effective diffusivity `d_eff`: `(c(0) − c_e0, c(L) − c_e0)`.
    pub fn steady_boundary(&self, current: f64, d_e: f64) -> (f64, f64) {
        let d_eff = self.effective_diffusivity(d_e);
        let a = [
            [self.a_unit[0][0] * d_eff, self.a_unit[0][1] * d_eff],
            [self.a_unit[1][0] * d_eff, self.a_unit[1][1] * d_eff],
        ];
        let u = solve(a, [-self.b[0] * current, -self.b[1] * current]);
        let e = mat_vec(&self.edge, u);
        (e[0], e[1])
    }
}
