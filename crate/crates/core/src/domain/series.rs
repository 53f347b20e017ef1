use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::units::SECONDS_PER_HOUR;

/// Sampled cell record. Current is positive on discharge.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TimeSeries {
    pub time_s: Vec<f64>,
    pub current_a: Vec<f64>,
    pub voltage_v: Vec<f64>,
    pub temperature_c: Vec<f64>,
}

impl TimeSeries {
    pub fn new(time_s: Vec<f64>, current_a: Vec<f64>, voltage_v: Vec<f64>, temperature_c: Vec<f64>) -> Result<Self> {
        let ts = Self {
            time_s,
            current_a,
            voltage_v,
            temperature_c,
        };
        ts.validate()?;
        Ok(ts)
    }

    /// A record with no measured voltage yet (zeros), used to drive simulations.
    pub fn from_profile(time_s: Vec<f64>, current_a: Vec<f64>, temperature_c: Vec<f64>) -> Result<Self> {
        let n = time_s.len();
        Self::new(time_s, current_a, vec![0.0; n], temperature_c)
    }

    /// Uniformly sampled profile at a constant temperature.
    pub fn uniform(dt: f64, current_a: Vec<f64>, temperature_c: f64) -> Result<Self> {
        let n = current_a.len();
        let time_s = (0..n).map(|k| k as f64 * dt).collect();
        Self::from_profile(time_s, current_a, vec![temperature_c; n])
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.time_s.len();
        if n < 2 {
            return Err(Error::InvalidInput("time series needs at least 2 samples".into()));
        }
        if self.current_a.len() != n || self.voltage_v.len() != n || self.temperature_c.len() != n {
            return Err(Error::InvalidInput("time series columns differ in length".into()));
        }
        for (name, col) in [
            ("time_s", &self.time_s),
            ("current_a", &self.current_a),
            ("voltage_v", &self.voltage_v),
            ("temperature_c", &self.temperature_c),
        ] {
            if let Some(k) = col.iter().position(|v| !v.is_finite()) {
                return Err(Error::InvalidInput(format!("non-finite {name} at sample {k}")));
            }
        }
        if let Some(k) = self.time_s.windows(2).position(|w| w[1] <= w[0]) {
            return Err(Error::InvalidInput(format!("non-monotone time at sample {}", k + 1)));
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.time_s.len()
    }

    pub fn is_empty(&self) -> bool {
        self.time_s.is_empty()
    }

    pub fn duration(&self) -> f64 {
        self.time_s[self.len() - 1] - self.time_s[0]
    }

    /// Sub-series over the sample range `[start, end)`.
    pub fn slice(&self, start: usize, end: usize) -> TimeSeries {
        TimeSeries {
            time_s: self.time_s[start..end].to_vec(),
            current_a: self.current_a[start..end].to_vec(),
            voltage_v: self.voltage_v[start..end].to_vec(),
            temperature_c: self.temperature_c[start..end].to_vec(),
        }
    }

    /// Same profile with another voltage column.
    pub fn with_voltage(&self, voltage_v: Vec<f64>) -> TimeSeries {
        assert_eq!(voltage_v.len(), self.len());
        TimeSeries {
            voltage_v,
            ..self.clone()
        }
    }

    /// Coulomb-counted SOC at each sample. Sample `k` carries the current held
    /// over the interval that ends at `t_k`, matching the simulators.
    pub fn coulomb_soc(&self, soc0: f64, capacity_ah: f64, charge_efficiency: f64) -> Vec<f64> {
        let mut soc = Vec::with_capacity(self.len());
        let mut s = soc0;
        soc.push(s);
        for k in 1..self.len() {
            let i = self.current_a[k];
            let eta = if i < 0.0 { charge_efficiency } else { 1.0 };
            s -= eta * i * (self.time_s[k] - self.time_s[k - 1]) / (capacity_ah * SECONDS_PER_HOUR);
            soc.push(s);
        }
        soc
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Role {
    Calibration,
    Validation,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ProfileKind {
    ConstantRate,
    MultiStep,
    DriveCycle,
    Characterization,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Dataset {
    pub id: String,
    pub role: Role,
    pub ambient_temp_c: f64,
    pub profile_kind: ProfileKind,
    pub initial_soc: Option<f64>,
    pub series: TimeSeries,
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_repeated_timestamp() {
        let r = TimeSeries::new(vec![0.0, 1.0, 1.0], vec![0.0; 3], vec![3.3; 3], vec![25.0; 3]);
        let msg = r.unwrap_err().to_string();
        assert!(msg.contains("non-monotone time at sample 2"), "{msg}");
    }

    #[test]
    fn rejects_nan_and_short_series() {
        assert!(TimeSeries::new(vec![0.0, 1.0], vec![0.0, f64::NAN], vec![3.3; 2], vec![25.0; 2]).is_err());
        assert!(TimeSeries::new(vec![0.0], vec![0.0], vec![3.3], vec![25.0]).is_err());
    }

    #[test]
    fn coulomb_soc_full_discharge() {
        let ts = TimeSeries::uniform(1.0, vec![166.0; 3601], 25.0).unwrap();
        let soc = ts.coulomb_soc(1.0, 166.0, 1.0);
        assert!(soc[3600].abs() < 1e-12);
    }
}
