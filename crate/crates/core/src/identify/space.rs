//! Bounded search spaces over flattened parameter vectors.

use serde::{Deserialize, Serialize};

use crate::domain::arrhenius::SEGMENT_COUNT;
use crate::domain::pbm_params::{PBM_ARRHENIUS_COUNT, PBM_SCALAR_COUNT};
use crate::domain::{EcmParams, PbmParams};
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Scale {
    Linear,
    Log,
}

/// Bounds, scaling and a free/fixed mask for every entry of a parameter
/// vector. Fixed entries keep their `base` value.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SearchSpace {
    pub names: Vec<String>,
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
    pub scale: Vec<Scale>,
    /// Starting point, also the value of fixed entries.
    pub base: Vec<f64>,
    pub free: Vec<bool>,
}

impl SearchSpace {
    pub fn validate(&self) -> Result<()> {
        let n = self.names.len();
        if [self.lower.len(), self.upper.len(), self.scale.len(), self.base.len(), self.free.len()]
            .iter()
            .any(|&l| l != n)
        {
            return Err(Error::InvalidInput("search space vectors differ in length".into()));
        }
        for k in 0..n {
            let (lo, hi) = (self.lower[k], self.upper[k]);
            if !(lo < hi) || !lo.is_finite() || !hi.is_finite() {
                return Err(Error::param(&self.names[k], "lower bound must be below upper bound"));
            }
            if self.scale[k] == Scale::Log && lo <= 0.0 {
                return Err(Error::param(&self.names[k], "log-scaled bounds must be positive"));
            }
        }
        if !self.free.iter().any(|&f| f) {
            return Err(Error::InvalidInput("search space has no free dimension".into()));
        }
        Ok(())
    }

    pub fn dim(&self) -> usize {
        self.names.len()
    }

    pub fn free_indices(&self) -> Vec<usize> {
        (0..self.dim()).filter(|&k| self.free[k]).collect()
    }

    /// Maps a unit coordinate of dimension `k` to parameter units. The end
    /// points map to the bounds exactly.
    #[inline]
    pub fn from_unit(&self, k: usize, u: f64) -> f64 {
        let (lo, hi) = (self.lower[k], self.upper[k]);
        if u <= 0.0 {
            return lo;
        }
        if u >= 1.0 {
            return hi;
        }
        match self.scale[k] {
            Scale::Linear => lo + u * (hi - lo),
            Scale::Log => (lo.ln() + u * (hi.ln() - lo.ln())).exp(),
        }
    }

    #[inline]
    pub fn to_unit(&self, k: usize, x: f64) -> f64 {
        let (lo, hi) = (self.lower[k], self.upper[k]);
        let u = match self.scale[k] {
            Scale::Linear => (x - lo) / (hi - lo),
            Scale::Log => (x.ln() - lo.ln()) / (hi.ln() - lo.ln()),
        };
        u.clamp(0.0, 1.0)
    }

    /// Full parameter vector from unit coordinates of the free dimensions.
    pub fn expand(&self, free_idx: &[usize], unit: &[f64]) -> Vec<f64> {
        let mut v = self.base.clone();
        for (&k, &u) in free_idx.iter().zip(unit) {
            v[k] = self.from_unit(k, u);
        }
        v
    }

    pub fn contains(&self, v: &[f64]) -> bool {
        v.len() == self.dim() && v.iter().enumerate().all(|(k, &x)| x >= self.lower[k] && x <= self.upper[k])
    }

    /// Frees exactly the dimensions whose name satisfies `pred`.
    pub fn with_mask(mut self, pred: impl Fn(&str) -> bool) -> Self {
        self.free = self.names.iter().map(|n| pred(n)).collect();
        self
    }

    pub fn load(path: &std::path::Path) -> Result<Self> {
        let s: Self = serde_json::from_reader(std::io::BufReader::new(std::fs::File::open(path)?))?;
        s.validate()?;
        Ok(s)
    }

    pub fn save(&self, path: &std::path::Path) -> Result<()> {
        let f = std::io::BufWriter::new(std::fs::File::create(path)?);
        serde_json::to_writer_pretty(f, self)?;
        Ok(())
    }
}

/// Relative widths of the default search boxes.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct BoundWidths {
    /// Linear scalars: `base·(1 ± w)`.
    pub linear_relative: f64,
    /// Log-scaled quantities: `base ×/÷ f`.
    pub log_factor: f64,
    /// Stoichiometry window edges: `base ± w` (absolute).
    pub stoichiometry_absolute: f64,
    /// Activation energies: `base·(1 ± w)`.
    pub activation_relative: f64,
}

impl Default for BoundWidths {
    fn default() -> Self {
        Self {
            linear_relative: 0.2,
            log_factor: 2.0,
            stoichiometry_absolute: 0.03,
            activation_relative: 0.25,
        }
    }
}

/// Default physics-model search space centred on `base`. Transport
/// properties (diffusivities, rate constants, conductivity) are searched on a
/// log scale, everything else linearly.
pub fn pbm_space(base: &PbmParams, w: BoundWidths) -> SearchSpace {
    let v = base.identification_vector();
    let names = PbmParams::parameter_names();
    let n = v.len();
    let mut lower = Vec::with_capacity(n);
    let mut upper = Vec::with_capacity(n);
    let mut scale = Vec::with_capacity(n);
    for (k, &x) in v.iter().enumerate() {
        let (lo, hi, sc) = if k < PBM_SCALAR_COUNT {
            match k {
                7..=9 => (
                    (x - w.stoichiometry_absolute).max(1e-4),
                    (x + w.stoichiometry_absolute).min(1.0 - 1e-4),
                    Scale::Linear,
                ),
                // Porosity and transference stay inside (0, 1).
                6 | 11 => ((x * (1.0 - w.linear_relative)).max(1e-3), (x * (1.0 + w.linear_relative)).min(0.95), Scale::Linear),
                _ => (x * (1.0 - w.linear_relative), x * (1.0 + w.linear_relative), Scale::Linear),
            }
        } else {
            let within = (k - PBM_SCALAR_COUNT) % (2 * SEGMENT_COUNT);
            if within < SEGMENT_COUNT {
                (x / w.log_factor, x * w.log_factor, Scale::Log)
            } else {
                let (a, b) = (x * (1.0 - w.activation_relative), x * (1.0 + w.activation_relative));
                (a.min(b), a.max(b), Scale::Linear)
            }
        };
        lower.push(lo);
        upper.push(hi);
        scale.push(sc);
    }
    debug_assert_eq!(n, PBM_SCALAR_COUNT + PBM_ARRHENIUS_COUNT * 2 * SEGMENT_COUNT);
    SearchSpace {
        names,
        lower,
        upper,
        scale,
        base: v,
        free: vec![true; n],
    }
}

/// Default circuit-model search space: every table entry on a log scale,
/// `base ×/÷ factor`.
pub fn ecm_space(base: &EcmParams, factor: f64) -> SearchSpace {
    let v = base.identification_vector();
    let n = v.len();
    SearchSpace {
        names: EcmParams::parameter_names(),
        lower: v.iter().map(|x| x / factor).collect(),
        upper: v.iter().map(|x| x * factor).collect(),
        scale: vec![Scale::Log; n],
        base: v,
        free: vec![true; n],
    }
}
