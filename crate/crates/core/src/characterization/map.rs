//! OCV and hysteresis maps from pulse tests.
//!
//! Every long rest after a pulse is extrapolated to its 8 h equilibrium
//! voltage and assigned to the nearest SOC node. Per node and temperature
//! the charge-side and discharge-side equilibria give
//! `half_gap = (V_chg − V_dis)/2` and `mean_ocv = (V_chg + V_dis)/2`.

use std::io::Write;
use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::domain::{CellSpec, Dataset, Table2d};
use crate::error::{Error, Result};

use super::pulse::{find_rests, Side};
use super::relaxation::{fit_relaxation, RelaxationFit, MIN_REST_S};

/// Largest distance between a rest's SOC and the node it is assigned to.
pub const SOC_SNAP_TOLERANCE: f64 = 0.02;

/// One extrapolated rest.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RestPoint {
    pub dataset: String,
    pub start: usize,
    pub side: Side,
    pub soc: f64,
    pub temp_c: f64,
    pub fit: RelaxationFit,
}

/// A grid node lacking one or both sides; its values were copied from the
/// nearest covered node.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MissingNode {
    pub soc: f64,
    pub temp_c: f64,
    pub charge_missing: bool,
    pub discharge_missing: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HysteresisMap {
    #[serde(rename = "half_gap_V")]
    pub half_gap: Table2d,
    #[serde(rename = "mean_ocv_V")]
    pub mean_ocv: Table2d,
    /// SOC-major, one flag per node.
    pub covered: Vec<bool>,
    pub missing: Vec<MissingNode>,
}

impl HysteresisMap {
    pub fn soc_grid(&self) -> &[f64] {
        &self.half_gap.soc_grid
    }

    pub fn temp_grid_c(&self) -> &[f64] {
        &self.half_gap.temp_grid_c
    }

    /// CSV with header `soc,temp_c,half_gap_V,mean_ocv_V,covered`.
    pub fn write_csv(&self, w: impl Write) -> Result<()> {
        let mut w = csv::Writer::from_writer(w);
        w.write_record(["soc", "temp_c", "half_gap_V", "mean_ocv_V", "covered"])?;
        let nt = self.half_gap.n_temp();
        for (i, &soc) in self.soc_grid().iter().enumerate() {
            for (j, &t) in self.temp_grid_c().iter().enumerate() {
                w.write_record([
                    soc.to_string(),
                    t.to_string(),
                    self.half_gap.at(i, j).to_string(),
                    self.mean_ocv.at(i, j).to_string(),
                    (self.covered[i * nt + j] as u8).to_string(),
                ])?;
            }
        }
        w.flush()?;
        Ok(())
    }

    pub fn save_csv(&self, path: &Path) -> Result<()> {
        self.write_csv(std::fs::File::create(path)?)
    }

    /// Reads the CSV layout written by [`HysteresisMap::write_csv`]. Rows
    /// may come in any order but must cover the full grid.
    pub fn read_csv(r: impl std::io::Read) -> Result<Self> {
        let mut rows = Vec::new();
        let mut rdr = csv::Reader::from_reader(r);
        let header: Vec<String> = rdr.headers()?.iter().map(str::to_string).collect();
        if header.len() < 4 || header[..4] != ["soc", "temp_c", "half_gap_V", "mean_ocv_V"] {
            return Err(Error::InvalidInput(format!("unexpected hysteresis map header {header:?}")));
        }
        for rec in rdr.records() {
            let rec = rec?;
            let f = |k: usize| -> Result<f64> {
                rec.get(k)
                    .unwrap_or("")
                    .trim()
                    .parse()
                    .map_err(|_| Error::InvalidInput(format!("bad number in hysteresis map row {:?}", rec)))
            };
            let covered = rec.get(4).map(|c| c.trim() != "0").unwrap_or(true);
            rows.push((f(0)?, f(1)?, f(2)?, f(3)?, covered));
        }
        let mut socs: Vec<f64> = rows.iter().map(|r| r.0).collect();
        let mut temps: Vec<f64> = rows.iter().map(|r| r.1).collect();
        for v in [&mut socs, &mut temps] {
            v.sort_by(f64::total_cmp);
            v.dedup();
        }
        let (ns, nt) = (socs.len(), temps.len());
        if rows.len() != ns * nt {
            return Err(Error::InvalidInput(format!(
                "hysteresis map has {} rows for a {ns}×{nt} grid",
                rows.len()
            )));
        }
        let mut half_gap = Table2d::from_fn(&socs, &temps, |_, _| f64::NAN);
        let mut mean_ocv = half_gap.clone();
        let mut covered = vec![false; ns * nt];
        for (s, t, hg, m, c) in rows {
            let i = socs.iter().position(|&x| x == s).unwrap();
            let j = temps.iter().position(|&x| x == t).unwrap();
            half_gap.set(i, j, hg);
            mean_ocv.set(i, j, m);
            covered[i * nt + j] = c;
        }
        half_gap.validate("half_gap_V")?;
        mean_ocv.validate("mean_ocv_V")?;
        let missing = covered
            .iter()
            .enumerate()
            .filter(|(_, &c)| !c)
            .map(|(k, _)| MissingNode {
                soc: socs[k / nt],
                temp_c: temps[k % nt],
                charge_missing: true,
                discharge_missing: true,
            })
            .collect();
        Ok(Self {
            half_gap,
            mean_ocv,
            covered,
            missing,
        })
    }

    pub fn load_csv(path: &Path) -> Result<Self> {
        Self::read_csv(std::fs::File::open(path)?)
    }
}

/// Extrapolated equilibria of every post-pulse rest in `tests`. Each test
/// must carry its initial SOC.
pub fn rest_points(tests: &[Dataset], spec: &CellSpec) -> Result<Vec<RestPoint>> {
    let mut jobs = Vec::new();
    for d in tests {
        let soc0 = d
            .initial_soc
            .ok_or_else(|| Error::InvalidInput(format!("pulse test `{}` has no initial SOC", d.id)))?;
        let soc = d.series.coulomb_soc(soc0, spec.capacity_ah, spec.coulombic_efficiency);
        for r in find_rests(&d.series, MIN_REST_S) {
            if let Some(side) = r.side {
                jobs.push((d, r, side, soc[r.start]));
            }
        }
    }
    jobs.par_iter()
        .map(|&(d, r, side, soc)| {
            Ok(RestPoint {
                dataset: d.id.clone(),
                start: r.start,
                side,
                soc,
                temp_c: d.ambient_temp_c,
                fit: fit_relaxation(&d.series.slice(r.start, r.end))?,
            })
        })
        .collect()
}

/// Mean with the summands sorted, so the result does not depend on input
/// order.
fn sorted_mean(v: &mut [f64]) -> f64 {
    v.sort_by(f64::total_cmp);
    v.iter().sum::<f64>() / v.len() as f64
}

/// Builds the map on `soc_grid` × (distinct ambient temperatures of
/// `tests`). Nodes without both sides are filled from the nearest covered
/// node and reported in `missing`. Negative gaps from noisy data are clamped
/// to zero.
pub fn build_hysteresis_map(tests: &[Dataset], spec: &CellSpec, soc_grid: &[f64]) -> Result<HysteresisMap> {
    if tests.is_empty() {
        return Err(Error::InvalidInput("no pulse tests given".into()));
    }
    let points = rest_points(tests, spec)?;
    map_from_rest_points(&points, tests, soc_grid)
}

pub fn map_from_rest_points(points: &[RestPoint], tests: &[Dataset], soc_grid: &[f64]) -> Result<HysteresisMap> {
    if soc_grid.is_empty() || soc_grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::param("soc_grid", "must be non-empty and strictly ascending"));
    }
    let mut temps: Vec<f64> = tests.iter().map(|d| d.ambient_temp_c).collect();
    temps.sort_by(f64::total_cmp);
    temps.dedup();
    let (ns, nt) = (soc_grid.len(), temps.len());
    let mut chg: Vec<Vec<f64>> = vec![Vec::new(); ns * nt];
    let mut dis: Vec<Vec<f64>> = vec![Vec::new(); ns * nt];
    for p in points {
        let (i, dist) = soc_grid
            .iter()
            .enumerate()
            .map(|(i, &s)| (i, (s - p.soc).abs()))
            .min_by(|a, b| a.1.total_cmp(&b.1))
            .unwrap();
        if dist > SOC_SNAP_TOLERANCE {
            continue;
        }
        let j = temps.iter().position(|&t| t == p.temp_c).expect("temperature from tests");
        match p.side {
            Side::Charge => chg[i * nt + j].push(p.fit.v_at_8h),
            Side::Discharge => dis[i * nt + j].push(p.fit.v_at_8h),
        }
    }

    let mut half_gap = Table2d::from_fn(soc_grid, &temps, |_, _| 0.0);
    let mut mean_ocv = half_gap.clone();
    let mut covered = vec![false; ns * nt];
    let mut missing = Vec::new();
    for i in 0..ns {
        for j in 0..nt {
            let k = i * nt + j;
            if chg[k].is_empty() || dis[k].is_empty() {
                missing.push(MissingNode {
                    soc: soc_grid[i],
                    temp_c: temps[j],
                    charge_missing: chg[k].is_empty(),
                    discharge_missing: dis[k].is_empty(),
                });
                continue;
            }
            let (c, d) = (sorted_mean(&mut chg[k]), sorted_mean(&mut dis[k]));
            half_gap.set(i, j, (0.5 * (c - d)).max(0.0));
            mean_ocv.set(i, j, 0.5 * (c + d));
            covered[k] = true;
        }
    }
    if !covered.iter().any(|&c| c) {
        return Err(Error::InvalidInput("no map node has both a charge and a discharge rest".into()));
    }
    for m in &missing {
        let i = soc_grid.iter().position(|&s| s == m.soc).unwrap();
        let j = temps.iter().position(|&t| t == m.temp_c).unwrap();
        // Nearest covered node: same temperature first, then by grid distance.
        let (si, sj) = (0..ns)
            .flat_map(|a| (0..nt).map(move |b| (a, b)))
            .filter(|&(a, b)| covered[a * nt + b])
            .min_by_key(|&(a, b)| (b.abs_diff(j), a.abs_diff(i), a, b))
            .unwrap();
        half_gap.set(i, j, half_gap.at(si, sj));
        mean_ocv.set(i, j, mean_ocv.at(si, sj));
    }
    Ok(HysteresisMap {
        half_gap,
        mean_ocv,
        covered,
        missing,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::characterization::pulse::{pulse_protocol, PulsePlan};
    use crate::domain::{ProfileKind, Role};
    use crate::reference;

    /// A cell whose terminal voltage is `ocv(soc) ± gap/2` depending on the
    /// last current direction, with no dynamics.
    fn gap_test(temp: f64, gap: f64) -> Dataset {
        let spec = reference::cell_spec();
        let s = pulse_protocol(&spec, temp, &PulsePlan::default()).unwrap();
        let soc = s.coulomb_soc(1.0, spec.capacity_ah, spec.coulombic_efficiency);
        let mut side = 0.0;
        let v = (0..s.len())
            .map(|k| {
                if s.current_a[k] != 0.0 {
                    side = -s.current_a[k].signum();
                }
                3.2 + 0.1 * soc[k] + 0.5 * gap * side
            })
            .collect();
        Dataset {
            id: format!("pulse_{temp}"),
            role: Role::Calibration,
            ambient_temp_c: temp,
            profile_kind: ProfileKind::Characterization,
            initial_soc: Some(1.0),
            series: s.with_voltage(v),
        }
    }

    fn grid() -> Vec<f64> {
        (1..=9).map(|k| k as f64 / 10.0).collect()
    }

    #[test]
    fn constant_gap_gives_constant_half_gap() {
        let tests = [gap_test(0.0, 0.020), gap_test(25.0, 0.020)];
        let map = build_hysteresis_map(&tests, &reference::cell_spec(), &grid()).unwrap();
        assert!(map.missing.is_empty());
        for &v in &map.half_gap.values {
            assert!((v - 0.010).abs() < 1e-9, "{v}");
        }
        for (i, &s) in grid().iter().enumerate() {
            assert!((map.mean_ocv.at(i, 0) - (3.2 + 0.1 * s)).abs() < 1e-9);
        }
    }

    #[test]
    fn no_gap_gives_zero_half_gap() {
        let map = build_hysteresis_map(&[gap_test(25.0, 0.0)], &reference::cell_spec(), &grid()).unwrap();
        assert!(map.half_gap.values.iter().all(|&v| v.abs() < 1e-12));
    }

    #[test]
    fn missing_rest_is_flagged_and_filled() {
        let mut d = gap_test(25.0, 0.020);
        // Shorten the discharge rest at SOC 0.5 below the minimum.
        let rests = find_rests(&d.series, MIN_REST_S);
        let r = rests.iter().find(|r| r.side == Some(Side::Discharge) && {
            let soc = d.series.coulomb_soc(1.0, 166.0, 0.998)[r.start];
            (soc - 0.5).abs() < 1e-9
        }).copied().unwrap();
        for k in r.start + 10..r.end {
            d.series.current_a[k] = 1e-3 * if k % 2 == 0 { 1.0 } else { -1.0 };
        }
        let map = build_hysteresis_map(&[d], &reference::cell_spec(), &grid()).unwrap();
        assert_eq!(map.missing.len(), 1);
        assert_eq!(map.missing[0].soc, 0.5);
        assert!(map.missing[0].discharge_missing && !map.missing[0].charge_missing);
        assert!(!map.covered[4]);
        assert!((map.half_gap.at(3, 0) - 0.010).abs() < 1e-9);
        assert!((map.half_gap.at(4, 0) - 0.010).abs() < 1e-9);
    }

    #[test]
    fn rest_order_does_not_matter() {
        let tests = [gap_test(25.0, 0.020)];
        let spec = reference::cell_spec();
        let mut points = rest_points(&tests, &spec).unwrap();
        for p in points.iter_mut() {
            p.fit.v_at_8h += 1e-4 * (p.start % 7) as f64;
        }
        let repeats: Vec<RestPoint> = points
            .iter()
            .cloned()
            .map(|mut p| {
                p.fit.v_at_8h -= 3.3e-4;
                p
            })
            .collect();
        points.extend(repeats);
        let a = map_from_rest_points(&points, &tests, &grid()).unwrap();
        points.reverse();
        let b = map_from_rest_points(&points, &tests, &grid()).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn csv_round_trip() {
        let map = build_hysteresis_map(&[gap_test(10.0, 0.02), gap_test(25.0, 0.03)], &reference::cell_spec(), &grid()).unwrap();
        let mut buf = Vec::new();
        map.write_csv(&mut buf).unwrap();
        let back = HysteresisMap::read_csv(buf.as_slice()).unwrap();
        assert_eq!(back.half_gap, map.half_gap);
        assert_eq!(back.mean_ocv, map.mean_ocv);
        assert_eq!(back.covered, map.covered);
    }
}
