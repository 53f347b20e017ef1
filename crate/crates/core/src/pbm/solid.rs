//! Padé-reduced spherical diffusion in one electrode particle.
//!
//! With `x = s·R²/D` the surface-minus-bulk response of a sphere to a
//! pore-wall molar flux `j` (positive out of the particle) is
//! `−(R/D)·j·P(x)`. The [2/2] Padé approximant at `x = 0`,
//!
//! ```text
//! P(x) = (1/5 + 2x/385) / (1 + 3x/55 + x²/3465),
//! ```
//!
//! splits into two real modes. Together with the bulk integrator
//! `dc̄/dt = −3j/R` this gives three states per electrode. Every mode is
//! advanced with its exact zero-order-hold update, so the bulk balance holds
//! to rounding for any step size.

use serde::{Deserialize, Serialize};

use crate::error::Violation;
use crate::units::FARADAY;

/// Poles of `P` in the scaled variable `x` (roots of `x² + 189x + 3465`).
pub const PADE_POLES: [f64; 2] = [20.572670817890355, 168.42732918210964];

/// Residues of `P` at its poles: `P(x) = Σ r_i / (x + p_i)`.
pub const PADE_RESIDUES: [f64; 2] = [2.1824941388256245, 15.817505861174375];

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SolidRomState {
    /// Volume-averaged concentration (mol/m³).
    pub c_bulk: f64,
    /// Modal deviations of the surface from the bulk (mol/m³).
    pub modes: [f64; 2],
}

impl SolidRomState {
    pub fn uniform(c: f64) -> Self {
        Self {
            c_bulk: c,
            modes: [0.0; 2],
        }
    }

    #[inline]
    pub fn c_surf(&self) -> f64 {
        self.c_bulk + self.modes[0] + self.modes[1]
    }
}

/// Particle radius and saturation concentration of one electrode.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Particle {
    pub radius: f64,
    pub c_max: f64,
}

/// Advances the particle by `dt` under a constant pore-wall current density
/// `flux` (A/m², positive when lithium leaves the particle). `d_s` is the
/// diffusivity held over the step.
///
/// Fails with the offending surface concentration when it leaves `(0, c_max)`.
pub fn solid_step(
    state: &SolidRomState,
    flux: f64,
    dt: f64,
    d_s: f64,
    particle: Particle,
    label: &'static str,
) -> Result<SolidRomState, Violation> {
    let r = particle.radius;
    let j = flux / FARADAY;
    let mut next = SolidRomState {
        c_bulk: state.c_bulk - 3.0 * j * dt / r,
        modes: state.modes,
    };
    if j != 0.0 || state.modes != [0.0; 2] {
        let scale = d_s / (r * r);
        for i in 0..2 {
            let lambda = PADE_POLES[i] * scale;
            let decay = (-lambda * dt).exp();
            // Mode steady state under constant j.
            let target = -(PADE_RESIDUES[i] / r) * j / lambda;
            next.modes[i] = decay * state.modes[i] + (1.0 - decay) * target;
        }
    }
    let cs = next.c_surf();
    if !(cs > 0.0 && cs < particle.c_max) {
        return Err(Violation::new(format!("{label} surface concentration (mol/m3)"), cs));
    }
    Ok(next)
}

/// Steady-state surface-minus-bulk offset under constant flux, `−(R/5D)·j`.
pub fn steady_offset(flux: f64, d_s: f64, radius: f64) -> f64 {
    -radius / (5.0 * d_s) * flux / FARADAY
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    const P: Particle = Particle {
        radius: 5e-6,
        c_max: 31_000.0,
    };

    #[test]
    fn pade_constants_solve_the_denominator() {
        for p in PADE_POLES {
            assert!((p * p - 189.0 * p + 3465.0).abs() < 1e-9);
        }
        let dc: f64 = PADE_RESIDUES.iter().zip(PADE_POLES).map(|(r, p)| r / p).sum();
        assert!((dc - 0.2).abs() < 1e-15);
        // High-frequency limit of x·P(x) is 3465·2/385.
        assert!((PADE_RESIDUES[0] + PADE_RESIDUES[1] - 18.0).abs() < 1e-12);
    }

    #[test]
    fn zero_flux_from_equilibrium_is_identity() {
        let s = SolidRomState::uniform(12_000.0);
        assert_eq!(solid_step(&s, 0.0, 1.0, 5e-14, P, "n").unwrap(), s);
    }

    #[test]
    fn bulk_change_matches_flux_integral() {
        let mut s = SolidRomState::uniform(20_000.0);
        let flux = 1.1;
        for _ in 0..600 {
            s = solid_step(&s, flux, 1.0, 5e-14, P, "n").unwrap();
        }
        let expected = 20_000.0 - 3.0 * flux * 600.0 / (FARADAY * P.radius);
        assert!((s.c_bulk - expected).abs() <= 1e-9 * expected);
    }

    #[test]
    fn constant_flux_reaches_parabolic_offset() {
        let mut s = SolidRomState::uniform(20_000.0);
        for _ in 0..10 {
            s = solid_step(&s, 0.05, 200.0, 5e-14, P, "n").unwrap();
        }
        let off = s.c_surf() - s.c_bulk;
        assert!((off - steady_offset(0.05, 5e-14, P.radius)).abs() < 1e-9);
    }

    #[test]
    fn depletion_is_flagged() {
        let s = SolidRomState::uniform(100.0);
        let err = solid_step(&s, 5.0, 100.0, 5e-14, P, "negative").unwrap_err();
        assert!(err.quantity.contains("negative"));
    }

    proptest! {
        #[test]
        fn bulk_balance_is_exact_per_step(c in 5_000.0f64..25_000.0, flux in -2.0f64..2.0, dt in 0.1f64..10.0) {
            let s = SolidRomState::uniform(c);
            let n = solid_step(&s, flux, dt, 5e-14, P, "n").unwrap();
            let expected = c - 3.0 * flux * dt / (FARADAY * P.radius);
            prop_assert!((n.c_bulk - expected).abs() <= 4.0 * f64::EPSILON * c);
        }

        #[test]
        fn two_half_steps_equal_one(flux in -2.0f64..2.0, dt in 0.1f64..20.0) {
            let s = SolidRomState { c_bulk: 15_000.0, modes: [30.0, -12.0] };
            let one = solid_step(&s, flux, dt, 5e-14, P, "n").unwrap();
            let half = solid_step(&s, flux, dt / 2.0, 5e-14, P, "n").unwrap();
            let two = solid_step(&half, flux, dt / 2.0, 5e-14, P, "n").unwrap();
            prop_assert!((one.c_surf() - two.c_surf()).abs() < 1e-8);
        }
    }
}
