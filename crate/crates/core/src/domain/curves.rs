//! Tabulated curves and surfaces: open-circuit potentials, the OCV surface and
//! the SOC × temperature lookup tables used by the ECM and the hysteresis map.
//!
//! Every lookup clamps its arguments to the grid hull; nothing extrapolates.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Locates `x` on an ascending grid. Returns the lower index `i` and weight `w`
/// such that the interpolant is `(1 - w)·g[i] + w·g[i + 1]`. Arguments outside
/// the hull are clamped.
#[inline]
pub(crate) fn bracket(grid: &[f64], x: f64) -> (usize, f64) {
    let n = grid.len();
    if n == 1 || x <= grid[0] {
        return (0, 0.0);
    }
    if x >= grid[n - 1] {
        return (n - 2, 1.0);
    }
    // partition_point returns the first index with grid[idx] > x, so idx >= 1.
    let hi = grid.partition_point(|&g| g <= x);
    let i = hi - 1;
    let w = (x - grid[i]) / (grid[i + 1] - grid[i]);
    (i, w)
}

pub(crate) fn check_ascending(name: &str, grid: &[f64]) -> Result<()> {
    if grid.is_empty() {
        return Err(Error::param(name, "grid is empty"));
    }
    if grid.iter().any(|g| !g.is_finite()) {
        return Err(Error::param(name, "grid contains a non-finite value"));
    }
    if grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::param(name, "grid is not strictly ascending"));
    }
    Ok(())
}

/// Single-variable table over temperature (°C), linear between nodes.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Table1d {
    pub temp_grid_c: Vec<f64>,
    pub values: Vec<f64>,
}

impl Table1d {
    pub fn new(temp_grid_c: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        let t = Self {
            temp_grid_c,
            values,
        };
        t.validate("table1d")?;
        Ok(t)
    }

    pub fn constant(value: f64) -> Self {
        Self {
            temp_grid_c: vec![25.0],
            values: vec![value],
        }
    }

    pub fn validate(&self, name: &str) -> Result<()> {
        check_ascending(name, &self.temp_grid_c)?;
        if self.values.len() != self.temp_grid_c.len() {
            return Err(Error::param(name, "values length differs from grid"));
        }
        Ok(())
    }

    #[inline]
    pub fn interp(&self, temp_c: f64) -> f64 {
        let (i, w) = bracket(&self.temp_grid_c, temp_c);
        if w == 0.0 {
            return self.values[i];
        }
        (1.0 - w) * self.values[i] + w * self.values[i + 1]
    }
}

/// A value table on an SOC × temperature grid, stored SOC-major
/// (`values[i_soc * n_temp + j_temp]`).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Table2d {
    pub soc_grid: Vec<f64>,
    pub temp_grid_c: Vec<f64>,
    pub values: Vec<f64>,
}

impl Table2d {
    pub fn new(soc_grid: Vec<f64>, temp_grid_c: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        let t = Self {
            soc_grid,
            temp_grid_c,
            values,
        };
        t.validate("table2d")?;
        Ok(t)
    }

    pub fn from_fn(soc_grid: &[f64], temp_grid_c: &[f64], f: impl Fn(f64, f64) -> f64) -> Self {
        let values = soc_grid
            .iter()
            .flat_map(|&s| temp_grid_c.iter().map(move |&t| (s, t)))
            .map(|(s, t)| f(s, t))
            .collect();
        Self {
            soc_grid: soc_grid.to_vec(),
            temp_grid_c: temp_grid_c.to_vec(),
            values,
        }
    }

    pub fn validate(&self, name: &str) -> Result<()> {
        check_ascending(&format!("{name}.soc_grid"), &self.soc_grid)?;
        check_ascending(&format!("{name}.temp_grid_c"), &self.temp_grid_c)?;
        if self.values.len() != self.soc_grid.len() * self.temp_grid_c.len() {
            return Err(Error::param(name, "values length differs from grid size"));
        }
        if self.values.iter().any(|v| !v.is_finite()) {
            return Err(Error::param(name, "non-finite table entry"));
        }
        Ok(())
    }

    pub fn n_soc(&self) -> usize {
        self.soc_grid.len()
    }

    pub fn n_temp(&self) -> usize {
        self.temp_grid_c.len()
    }

    #[inline]
    pub fn at(&self, i_soc: usize, j_temp: usize) -> f64 {
        self.values[i_soc * self.temp_grid_c.len() + j_temp]
    }

    #[inline]
    pub fn set(&mut self, i_soc: usize, j_temp: usize, v: f64) {
        let n = self.temp_grid_c.len();
        self.values[i_soc * n + j_temp] = v;
    }

    /// Bilinear interpolation with clamping to the grid hull.
    #[inline]
    pub fn interp(&self, soc: f64, temp_c: f64) -> f64 {
        let (i, ws) = bracket(&self.soc_grid, soc);
        let (j, wt) = bracket(&self.temp_grid_c, temp_c);
        let i1 = if ws == 0.0 { i } else { i + 1 };
        let j1 = if wt == 0.0 { j } else { j + 1 };
        let v00 = self.at(i, j);
        let v01 = self.at(i, j1);
        let v10 = self.at(i1, j);
        let v11 = self.at(i1, j1);
        (1.0 - ws) * ((1.0 - wt) * v00 + wt * v01) + ws * ((1.0 - wt) * v10 + wt * v11)
    }

    pub fn min_value(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max_value(&self) -> f64 {
        self.values.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }
}

/// Single-electrode open-circuit potential versus stoichiometry (V vs Li/Li+).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OcpCurve {
    pub stoichiometry: Vec<f64>,
    pub potential_v: Vec<f64>,
}

impl OcpCurve {
    pub fn new(stoichiometry: Vec<f64>, potential_v: Vec<f64>) -> Result<Self> {
        let c = Self {
            stoichiometry,
            potential_v,
        };
        c.validate("ocp")?;
        Ok(c)
    }

    /// Tabulates `f` on `n` uniformly spaced stoichiometries in `[0, 1]`.
    pub fn tabulate(n: usize, f: impl Fn(f64) -> f64) -> Self {
        let stoichiometry: Vec<f64> = (0..n).map(|i| i as f64 / (n - 1) as f64).collect();
        let potential_v = stoichiometry.iter().map(|&x| f(x)).collect();
        Self {
            stoichiometry,
            potential_v,
        }
    }

    pub fn validate(&self, name: &str) -> Result<()> {
        check_ascending(name, &self.stoichiometry)?;
        if self.stoichiometry[0] < 0.0 || *self.stoichiometry.last().unwrap() > 1.0 {
            return Err(Error::param(name, "stoichiometry grid must lie in [0, 1]"));
        }
        if self.potential_v.len() != self.stoichiometry.len() {
            return Err(Error::param(name, "potential length differs from grid"));
        }
        if self.potential_v.iter().any(|v| !v.is_finite()) {
            return Err(Error::param(name, "non-finite potential"));
        }
        Ok(())
    }

    #[inline]
    pub fn eval(&self, theta: f64) -> f64 {
        let (i, w) = bracket(&self.stoichiometry, theta);
        if w == 0.0 {
            return self.potential_v[i];
        }
        (1.0 - w) * self.potential_v[i] + w * self.potential_v[i + 1]
    }
}

/// Full-cell open-circuit voltage over SOC × temperature.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct OcvSurface {
    pub table: Table2d,
}

impl OcvSurface {
    pub fn new(table: Table2d) -> Result<Self> {
        let s = Self { table };
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<()> {
        self.table.validate("ocv")?;
        let t = &self.table;
        for j in 0..t.n_temp() {
            for i in 1..t.n_soc() {
                if t.at(i, j) < t.at(i - 1, j) {
                    return Err(Error::param(
                        "ocv",
                        format!(
                            "OCV decreases with SOC at soc={}, temp={}",
                            t.soc_grid[i], t.temp_grid_c[j]
                        ),
                    ));
                }
            }
        }
        Ok(())
    }

    #[inline]
    pub fn eval(&self, soc: f64, temp_c: f64) -> f64 {
        self.table.interp(soc, temp_c)
    }

    /// Inverts the surface at fixed temperature by bisection. Voltages outside
    /// the reachable range map to the corresponding SOC bound.
    pub fn soc_for_voltage(&self, voltage: f64, temp_c: f64) -> f64 {
        let lo_soc = self.table.soc_grid[0];
        let hi_soc = *self.table.soc_grid.last().unwrap();
        invert_monotone(|s| self.eval(s, temp_c), voltage, lo_soc, hi_soc)
    }
}

/// Bisection for a non-decreasing function on `[lo, hi]`.
pub(crate) fn invert_monotone(f: impl Fn(f64) -> f64, target: f64, lo: f64, hi: f64) -> f64 {
    if target <= f(lo) {
        return lo;
    }
    if target >= f(hi) {
        return hi;
    }
    let (mut a, mut b) = (lo, hi);
    for _ in 0..80 {
        let m = 0.5 * (a + b);
        if f(m) < target {
            a = m;
        } else {
            b = m;
        }
    }
    0.5 * (a + b)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn unit_square(vals: [f64; 4]) -> Table2d {
        // SOC-major: (s0,t0) (s0,t1) (s1,t0) (s1,t1)
        Table2d::new(vec![0.0, 1.0], vec![0.0, 1.0], vals.to_vec()).unwrap()
    }

    #[test]
    fn node_query_returns_node_value() {
        let t = Table2d::from_fn(&[0.0, 0.5, 1.0], &[-20.0, 10.0, 40.0], |s, t| s * 7.0 + t);
        for (i, &s) in t.soc_grid.iter().enumerate() {
            for (j, &tc) in t.temp_grid_c.iter().enumerate() {
                assert_eq!(t.interp(s, tc), t.at(i, j));
            }
        }
    }

    #[test]
    fn constant_field_is_invariant() {
        let t = unit_square([0.3; 4]);
        assert_eq!(t.interp(0.5, 0.5), 0.3);
    }

    #[test]
    fn bilinear_center_of_unit_square() {
        let t = unit_square([1.0, 2.0, 3.0, 4.0]);
        assert!((t.interp(0.5, 0.5) - 2.5).abs() < 1e-15);
    }

    #[test]
    fn clamps_outside_hull() {
        let t = unit_square([1.0, 2.0, 3.0, 4.0]);
        assert_eq!(t.interp(-1.0, -5.0), 1.0);
        assert_eq!(t.interp(2.0, 9.0), 4.0);
    }

    #[test]
    fn rejects_bad_grids() {
        assert!(Table2d::new(vec![0.0, 0.0], vec![1.0], vec![1.0, 1.0]).is_err());
        assert!(Table2d::new(vec![0.0, 1.0], vec![1.0], vec![1.0]).is_err());
        assert!(OcpCurve::new(vec![0.0, 1.5], vec![1.0, 2.0]).is_err());
    }

    #[test]
    fn ocv_must_not_decrease_in_soc() {
        let t = Table2d::new(vec![0.0, 1.0], vec![25.0], vec![3.4, 3.3]).unwrap();
        assert!(OcvSurface::new(t).is_err());
    }

    #[test]
    fn ocv_inversion_round_trips() {
        let t = Table2d::from_fn(&[0.0, 0.25, 0.5, 0.75, 1.0], &[25.0], |s, _| 3.0 + 0.4 * s);
        let ocv = OcvSurface::new(t).unwrap();
        let soc = ocv.soc_for_voltage(3.0 + 0.4 * 0.37, 25.0);
        assert!((soc - 0.37).abs() < 1e-12);
        assert_eq!(ocv.soc_for_voltage(2.0, 25.0), 0.0);
    }

    #[test]
    fn table1d_interpolates_and_clamps() {
        let t = Table1d::new(vec![0.0, 10.0], vec![1.0, 3.0]).unwrap();
        assert_eq!(t.interp(5.0), 2.0);
        assert_eq!(t.interp(-4.0), 1.0);
        assert_eq!(t.interp(40.0), 3.0);
    }
}
