//! Physical constants and unit helpers.

/// Faraday constant (C/mol).
pub const FARADAY: f64 = 96_485.332_12;

/// Universal gas constant (J/(mol·K)).
pub const GAS_CONSTANT: f64 = 8.314_462_618;

pub const KELVIN_OFFSET: f64 = 273.15;

pub const SECONDS_PER_HOUR: f64 = 3600.0;

#[inline]
pub fn celsius_to_kelvin(temp_c: f64) -> f64 {
    temp_c + KELVIN_OFFSET
}

/// Current (A) corresponding to a C-rate for a cell of `capacity_ah`.
#[inline]
pub fn c_rate_current(c_rate: f64, capacity_ah: f64) -> f64 {
    c_rate * capacity_ah
}
