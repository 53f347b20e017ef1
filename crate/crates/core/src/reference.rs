//! A reference LFP/graphite cell (166 Ah, 2.5–3.65 V) used as synthetic truth.
//!
//! The electrode OCPs are the usual empirical fits for graphite and LFP,
//! tabulated on 1001 points. Geometry is chosen so the negative-electrode window
//! holds exactly the nameplate capacity. The `*_nominal` sets are the same
//! cell perturbed by fixed factors; identification bounds are centred on them,
//! never on the truth.

use crate::domain::{
    CellSpec, EcmParams, OcpCurve, OcvSurface, PbmConstants, PbmParams, PbmTransport, SegmentedArrhenius, Table1d,
    Table2d, ECM_SOC_GRID, ECM_TEMP_GRID_C,
};
use crate::hysteresis::HysteresisParams;
use crate::units::{celsius_to_kelvin, FARADAY, SECONDS_PER_HOUR};

pub const CAPACITY_AH: f64 = 166.0;
pub const V_MIN: f64 = 2.5;
pub const V_MAX: f64 = 3.65;

const OCP_POINTS: usize = 1001;

/// Graphite open-circuit potential (V vs Li/Li+).
pub fn graphite_ocp(x: f64) -> f64 {
    0.6379 + 0.5416 * (-305.5309 * x).exp() + 0.044 * (-(x - 0.1958) / 0.1088).tanh()
        - 0.1978 * ((x - 1.0571) / 0.0854).tanh()
        - 0.6875 * ((x + 0.0117) / 0.0529).tanh()
        - 0.0175 * ((x - 0.5692) / 0.0875).tanh()
}

/// LFP open-circuit potential (V vs Li/Li+).
pub fn lfp_ocp(y: f64) -> f64 {
    let z = (1.0 - y).max(0.0);
    3.4323 - 0.8428 * (-80.2493 * z.powf(1.3198)).exp() - 3.2474e-6 * (20.2645 * z.powf(3.8003)).exp()
        + 3.2482e-6 * (20.2646 * z.powf(3.7995)).exp()
}

pub fn cell_spec() -> CellSpec {
    CellSpec {
        capacity_ah: CAPACITY_AH,
        v_min: V_MIN,
        v_max: V_MAX,
        coulombic_efficiency: 0.998,
        sampling_dt_s: 1.0,
    }
}

/// Segment-varying activation energies around a base value.
fn segmented(value_25c: f64, ea: f64) -> SegmentedArrhenius {
    const EA_SHAPE: [f64; 5] = [1.12, 1.06, 1.0, 0.96, 0.92];
    let mut a = SegmentedArrhenius::single_law(value_25c, ea);
    for (e, k) in a.activation_energies.iter_mut().zip(EA_SHAPE) {
        *e = ea * k;
    }
    a
}

pub fn pbm_constants() -> PbmConstants {
    PbmConstants {
        c_max_pos: 22_800.0,
        c_max_neg: 31_000.0,
        c_e0: 1200.0,
        alpha: 0.5,
        beta: 0.0,
        rho: 2e-3,
        theta_c: 0.5,
        mu_pos: 5e-5,
        mu_neg: 1e-4,
        bruggeman: 1.5,
    }
}

pub fn pbm_params() -> PbmParams {
    let constants = pbm_constants();
    let porosity = 0.32;
    let thickness_neg = 60e-6;
    let (theta_neg_empty, theta_neg_full) = (0.02, 0.80);
    let per_area = FARADAY * thickness_neg * (1.0 - porosity) * constants.c_max_neg * (theta_neg_full - theta_neg_empty)
        / SECONDS_PER_HOUR;
    PbmParams {
        electrode_area: CAPACITY_AH / per_area,
        thickness_pos: 80e-6,
        thickness_sep: 25e-6,
        thickness_neg,
        radius_pos: 0.5e-6,
        radius_neg: 5e-6,
        porosity,
        theta_neg_empty,
        theta_neg_full,
        theta_pos_empty: 0.97,
        contact_resistance: 2e-4,
        transference: 0.38,
        constants,
        transport: PbmTransport {
            diffusivity_pos: segmented(1e-15, 35e3),
            diffusivity_neg: segmented(5e-14, 30e3),
            electrolyte_diffusivity: segmented(4e-10, 17e3),
            rate_constant_pos: segmented(2.6e-11, 35e3),
            rate_constant_neg: segmented(2e-11, 30e3),
            conductivity: segmented(1.0, 15e3),
        },
        ocp_pos: OcpCurve::tabulate(OCP_POINTS, lfp_ocp),
        ocp_neg: OcpCurve::tabulate(OCP_POINTS, graphite_ocp),
    }
}

/// The reference cell with every identified scalar and reference value
/// scaled by a fixed factor, and activation energies shifted.
pub fn pbm_nominal() -> PbmParams {
    let truth = pbm_params();
    let v = truth.identification_vector();
    let perturbed: Vec<f64> = v
        .iter()
        .enumerate()
        .map(|(k, &x)| {
            // Deterministic spread of factors in [0.9, 1.1].
            let u = ((k * 7 + 3) % 11) as f64 / 10.0 * 2.0 - 1.0;
            match k {
                // Stoichiometry window edges move by at most 0.01.
                7..=9 => x + 0.01 * u,
                _ => x * (1.0 + 0.1 * u),
            }
        })
        .collect();
    truth.with_identification_vector(&perturbed).expect("length matches")
}

/// Mean open-circuit voltage of the reference cell as an SOC × temperature
/// surface on the ECM grid. A small reversible-heat slope is added in
/// temperature.
pub fn ocv_surface() -> OcvSurface {
    let p = pbm_params();
    let table = Table2d::from_fn(&ECM_SOC_GRID, &ECM_TEMP_GRID_C, |soc, t| {
        let (tp, tn) = p.stoichiometry_at_soc(soc);
        p.ocp_pos.eval(tp) - p.ocp_neg.eval(tn) + 1e-4 * (t - 25.0)
    });
    OcvSurface { table }
}

fn thermal(t_c: f64, ea: f64) -> f64 {
    (ea / crate::units::GAS_CONSTANT * (1.0 / celsius_to_kelvin(t_c) - 1.0 / celsius_to_kelvin(25.0))).exp()
}

pub fn ecm_params() -> EcmParams {
    let mut p = EcmParams::from_fns(
        |s, t| 0.45e-3 * thermal(t, 25e3) * (1.0 + 0.25 * (1.0 - s).powi(4)),
        |s, t| 0.25e-3 * thermal(t, 30e3) * (1.0 + 0.4 * (1.0 - s).powi(3)),
        |s, t| 0.35e-3 * thermal(t, 20e3) * (1.0 + 0.2 * (0.5 - s).abs()),
        |s, t| 60e3 / thermal(t, 5e3) * (1.0 + 0.2 * s),
        |s, t| 9e5 / thermal(t, 5e3) * (1.0 + 0.1 * s),
        ocv_surface(),
    );
    p.charge_efficiency = 0.998;
    p
}

/// Every table entry scaled by a fixed factor in roughly ±15 %.
pub fn ecm_nominal() -> EcmParams {
    let truth = ecm_params();
    let v: Vec<f64> = truth
        .identification_vector()
        .iter()
        .enumerate()
        .map(|(k, &x)| x * (1.0 + 0.15 * (((k * 5 + 2) % 13) as f64 / 12.0 - 0.5) * 2.0))
        .collect();
    truth.with_identification_vector(&v).expect("length matches")
}

pub fn hysteresis_params() -> HysteresisParams {
    HysteresisParams {
        m0: Table1d {
            temp_grid_c: ECM_TEMP_GRID_C.to_vec(),
            values: vec![7e-3, 6e-3, 5e-3, 5e-3, 4.5e-3, 4e-3],
        },
        m_map: Table2d::from_fn(&ECM_SOC_GRID, &ECM_TEMP_GRID_C, |s, t| {
            let soc_shape = 1.0 + 0.4 * (s - 0.5).powi(2) * 4.0;
            let temp_shape = 1.0 + 0.01 * (25.0 - t).max(0.0);
            15e-3 * soc_shape * temp_shape
        }),
        gamma: 12.0,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reference_sets_validate() {
        cell_spec().validate().unwrap();
        pbm_params().validate().unwrap();
        pbm_nominal().validate().unwrap();
        ecm_params().validate().unwrap();
        ecm_nominal().validate().unwrap();
        hysteresis_params().validate().unwrap();
    }

    #[test]
    fn model_capacity_matches_nameplate() {
        assert!((pbm_params().capacity_ah() - CAPACITY_AH).abs() < 1e-9);
    }

    #[test]
    fn open_circuit_window_spans_voltage_limits() {
        let s = ocv_surface();
        let lo = s.eval(0.0, 25.0);
        let hi = s.eval(1.0, 25.0);
        assert!(lo > 2.5 && lo < 3.2, "{lo}");
        assert!(hi > 3.3 && hi < 3.65, "{hi}");
    }

    #[test]
    fn nominal_differs_from_truth() {
        let a = pbm_params().identification_vector();
        let b = pbm_nominal().identification_vector();
        let changed = a.iter().zip(&b).filter(|(x, y)| x != y).count();
        assert!(changed > 60);
    }
}
