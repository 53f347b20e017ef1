//! Electrode kinetics: exchange current, charge-transfer plus intercalation
//! overpotential, and the concentration-dependent solid diffusivity.

use crate::error::Violation;
use crate::units::{FARADAY, GAS_CONSTANT};

/// `D_s = D_ref·exp(μ·|c_surf − c_bulk|)`.
#[inline]
pub fn effective_diffusivity(c_surf: f64, c_bulk: f64, mu: f64, d_ref: f64) -> f64 {
    d_ref * (mu * (c_surf - c_bulk).abs()).exp()
}

/// `i₀ = F·k₀·√(c_surf·(c_max − c_surf)·c_e)` (A/m²).
///
/// Arguments outside `0 < c_surf < c_max`, `c_e > 0` are rejected with the
/// offending quantity.
#[inline]
pub fn exchange_current(c_surf: f64, c_max: f64, c_e: f64, k0: f64) -> Result<f64, Violation> {
    if !(c_surf > 0.0 && c_surf < c_max) {
        return Err(Violation::new("surface concentration (mol/m3)", c_surf));
    }
    if !(c_e > 0.0) {
        return Err(Violation::new("electrolyte concentration (mol/m3)", c_e));
    }
    Ok(FARADAY * k0 * (c_surf * (c_max - c_surf) * c_e).sqrt())
}

/// Coefficients of the overpotential shared by both electrodes.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct KineticConstants {
    pub alpha: f64,
    pub rho: f64,
    pub theta_c: f64,
}

/// Charge-transfer and intercalation parts of the overpotential (V).
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Overpotential {
    pub charge_transfer: f64,
    pub intercalation: f64,
}

impl Overpotential {
    #[inline]
    pub fn total(&self) -> f64 {
        self.charge_transfer + self.intercalation
    }
}

/// Overpotential of one electrode at intercalation current density `j`
/// (A/m², positive into the particle) and exchange current `i0`.
///
/// `η_ct = (R̄T/αF)·asinh(j / 2i₀)`. The intercalation term is
/// `ρ·(c_max/c_surf)·j` below the critical stoichiometry and
/// `ρ·c_max/(c_max − c_surf)·j` at or above it.
#[inline]
pub fn kinetic_overpotential(
    j: f64,
    i0: f64,
    c_surf: f64,
    c_max: f64,
    k: KineticConstants,
    temp_k: f64,
) -> Overpotential {
    let charge_transfer = GAS_CONSTANT * temp_k / (k.alpha * FARADAY) * (j / (2.0 * i0)).asinh();
    let theta = c_surf / c_max;
    let intercalation = if theta < k.theta_c {
        k.rho * (c_max / c_surf) * j
    } else {
        k.rho * c_max / (c_max - c_surf) * j
    };
    Overpotential {
        charge_transfer,
        intercalation,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    const K: KineticConstants = KineticConstants {
        alpha: 0.5,
        rho: 2e-3,
        theta_c: 0.6,
    };

    #[test]
    fn diffusivity_examples() {
        assert_eq!(effective_diffusivity(9000.0, 9000.0, 1e-4, 3e-14), 3e-14);
        assert_eq!(effective_diffusivity(5000.0, 9000.0, 0.0, 3e-14), 3e-14);
        let d = effective_diffusivity(7000.0, 9000.0, 1e-4, 3e-14);
        assert!((d - 3e-14 * 0.2f64.exp()).abs() < 1e-28);
    }

    #[test]
    fn exchange_current_closed_form() {
        let i0 = exchange_current(15_000.0, 30_000.0, 1200.0, 3e-11).unwrap();
        let expected = FARADAY * 3e-11 * (15_000.0f64 * 15_000.0 * 1200.0).sqrt();
        assert!((i0 - expected).abs() <= 1e-15 * expected);
    }

    #[test]
    fn exchange_current_peaks_mid_window_and_vanishes_at_edges() {
        let mid = exchange_current(15_000.0, 30_000.0, 1200.0, 3e-11).unwrap();
        for c in [100.0, 7000.0, 14_999.0, 15_001.0, 25_000.0, 29_900.0] {
            assert!(exchange_current(c, 30_000.0, 1200.0, 3e-11).unwrap() < mid);
        }
        assert!(exchange_current(1e-9, 30_000.0, 1200.0, 3e-11).unwrap() < 1e-3);
        assert!(exchange_current(0.0, 30_000.0, 1200.0, 3e-11).is_err());
        assert!(exchange_current(30_000.0, 30_000.0, 1200.0, 3e-11).is_err());
        assert!(exchange_current(100.0, 30_000.0, 0.0, 3e-11).is_err());
    }

    #[test]
    fn zero_current_has_no_overpotential() {
        assert_eq!(kinetic_overpotential(0.0, 1.0, 12_000.0, 30_000.0, K, 298.15).total(), 0.0);
    }

    #[test]
    fn first_branch_below_critical_stoichiometry() {
        let eta = kinetic_overpotential(0.8, 1.0, 15_000.0, 30_000.0, K, 298.15);
        assert!((eta.intercalation - 2e-3 * 2.0 * 0.8).abs() < 1e-15);
    }

    #[test]
    fn second_branch_at_and_above_critical_stoichiometry() {
        let eta = kinetic_overpotential(0.8, 1.0, 24_000.0, 30_000.0, K, 298.15);
        assert!((eta.intercalation - 2e-3 * 5.0 * 0.8).abs() < 1e-15);
    }

    proptest! {
        #[test]
        fn charge_transfer_is_odd(j in -50.0f64..50.0, i0 in 0.01f64..10.0) {
            let a = kinetic_overpotential(j, i0, 12_000.0, 30_000.0, K, 298.15).charge_transfer;
            let b = kinetic_overpotential(-j, i0, 12_000.0, 30_000.0, K, 298.15).charge_transfer;
            prop_assert_eq!(a, -b);
        }
    }
}
