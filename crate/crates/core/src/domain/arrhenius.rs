//! Segmented Arrhenius temperature scaling.
//!
//! A property carries five (reference value, activation energy) pairs, one per
//! reference temperature. Each reference temperature owns the segment that
//! reaches halfway to its neighbours; a temperature sitting exactly on a
//! boundary belongs to the lower segment. Temperatures outside the modelled
//! range are clamped to it before evaluation, which makes the scaling total.
//! Values are not forced to agree across segment boundaries.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::units::{celsius_to_kelvin, GAS_CONSTANT};

pub const SEGMENT_COUNT: usize = 5;

/// Reference temperatures of the five segments (°C).
pub const SEGMENT_REFERENCE_TEMPS_C: [f64; SEGMENT_COUNT] = [-17.0, -5.0, 10.0, 30.0, 38.0];

/// Temperature range over which properties are defined (°C).
pub const MODEL_TEMP_RANGE_C: (f64, f64) = (-20.0, 40.0);

/// Segment boundaries: midpoints between consecutive reference temperatures.
pub fn segment_boundaries_c() -> [f64; SEGMENT_COUNT - 1] {
    let r = SEGMENT_REFERENCE_TEMPS_C;
    [
        0.5 * (r[0] + r[1]),
        0.5 * (r[1] + r[2]),
        0.5 * (r[2] + r[3]),
        0.5 * (r[3] + r[4]),
    ]
}

/// Index of the segment that evaluates `temp_c` (after clamping).
pub fn segment_index(temp_c: f64) -> usize {
    let t = clamp_temp(temp_c);
    segment_boundaries_c()
        .iter()
        .position(|&b| t <= b)
        .unwrap_or(SEGMENT_COUNT - 1)
}

/// Single Arrhenius law: `value_ref · exp((Ea/R̄)(1/T_ref − 1/T))`, temperatures in kelvin.
#[inline]
pub fn arrhenius(value_ref: f64, activation_energy: f64, t_ref_k: f64, t_k: f64) -> f64 {
    value_ref * (activation_energy / GAS_CONSTANT * (1.0 / t_ref_k - 1.0 / t_k)).exp()
}

#[inline]
fn clamp_temp(temp_c: f64) -> f64 {
    temp_c.clamp(MODEL_TEMP_RANGE_C.0, MODEL_TEMP_RANGE_C.1)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SegmentedArrhenius {
    pub ref_values: [f64; SEGMENT_COUNT],
    #[serde(rename = "activation_energies_J_mol")]
    pub activation_energies: [f64; SEGMENT_COUNT],
}

impl SegmentedArrhenius {
    pub fn new(
        ref_values: [f64; SEGMENT_COUNT],
        activation_energies: [f64; SEGMENT_COUNT],
    ) -> Result<Self> {
        let a = Self {
            ref_values,
            activation_energies,
        };
        a.validate("arrhenius")?;
        Ok(a)
    }

    /// One activation energy over all segments, reference values consistent
    /// with a single Arrhenius law anchored at `value_25c`.
    pub fn single_law(value_25c: f64, activation_energy: f64) -> Self {
        let t25 = celsius_to_kelvin(25.0);
        let ref_values = SEGMENT_REFERENCE_TEMPS_C
            .map(|tc| arrhenius(value_25c, activation_energy, t25, celsius_to_kelvin(tc)));
        Self {
            ref_values,
            activation_energies: [activation_energy; SEGMENT_COUNT],
        }
    }

    pub fn validate(&self, name: &str) -> Result<()> {
        if self.ref_values.iter().any(|v| !(v.is_finite() && *v > 0.0)) {
            return Err(Error::param(name, "reference values must be positive and finite"));
        }
        if self.activation_energies.iter().any(|e| !e.is_finite()) {
            return Err(Error::param(name, "activation energies must be finite"));
        }
        Ok(())
    }

    /// Property value at `temp_c` (°C).
    pub fn eval(&self, temp_c: f64) -> f64 {
        let t = clamp_temp(temp_c);
        let k = segment_index(t);
        arrhenius(
            self.ref_values[k],
            self.activation_energies[k],
            celsius_to_kelvin(SEGMENT_REFERENCE_TEMPS_C[k]),
            celsius_to_kelvin(t),
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> SegmentedArrhenius {
        SegmentedArrhenius::new(
            [1e-15, 2e-15, 4e-15, 8e-15, 9e-15],
            [60e3, 45e3, 30e3, 25e3, 20e3],
        )
        .unwrap()
    }

    #[test]
    fn boundaries_are_midpoints() {
        assert_eq!(segment_boundaries_c(), [-11.0, 2.5, 20.0, 34.0]);
    }

    #[test]
    fn reference_temperature_returns_reference_value() {
        let a = sample();
        for (k, &tc) in SEGMENT_REFERENCE_TEMPS_C.iter().enumerate() {
            assert_eq!(a.eval(tc), a.ref_values[k]);
        }
    }

    #[test]
    fn closed_form_single_law() {
        let v = arrhenius(1e-14, 30_000.0, 298.15, 308.15);
        let expected = 1e-14 * ((30_000.0 / GAS_CONSTANT) * (1.0 / 298.15 - 1.0 / 308.15)).exp();
        assert_eq!(v, expected);
        // Same evaluation with the rounded gas constant 8.314.
        let rounded = 1e-14 * ((30_000.0f64 / 8.314) * (1.0 / 298.15 - 1.0 / 308.15)).exp();
        assert!((v - rounded).abs() / rounded < 1e-4);
    }

    #[test]
    fn zero_activation_energy_is_flat() {
        let a = SegmentedArrhenius::new([3.0; 5], [0.0; 5]).unwrap();
        for t in [-40.0, -17.0, 0.0, 22.0, 60.0] {
            assert_eq!(a.eval(t), 3.0);
        }
    }

    #[test]
    fn boundary_belongs_to_lower_segment() {
        assert_eq!(segment_index(-11.0), 0);
        assert_eq!(segment_index(-10.999), 1);
        assert_eq!(segment_index(34.0), 3);
        assert_eq!(segment_index(34.5), 4);
    }

    #[test]
    fn clamps_outside_model_range() {
        let a = sample();
        assert_eq!(a.eval(-35.0), a.eval(-20.0));
        assert_eq!(a.eval(55.0), a.eval(40.0));
    }

    #[test]
    fn rejects_non_positive_reference() {
        assert!(SegmentedArrhenius::new([1.0, 1.0, 0.0, 1.0, 1.0], [0.0; 5]).is_err());
    }
}
