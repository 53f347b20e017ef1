//! Fitting the hysteresis model to the equilibrium voltages of a pulse test.
//!
//! The map supplies the mean OCV and the half gap at each node. The fit
//! chooses the instantaneous magnitude `M0(T)` per map temperature, a common
//! scale on the dynamic magnitude `M = scale·max(half_gap − M0, 0)`, and the
//! rate `γ`, by minimizing the RMSE between the predicted and extrapolated
//! rest voltages.

use serde::{Deserialize, Serialize};

use crate::domain::{CellSpec, Dataset, Table1d, Table2d};
use crate::error::{Error, Result};
use crate::hysteresis::{HysteresisParams, HysteresisState};
use crate::identify::{run_pso, PsoConfig, Scale, SearchSpace};

use super::map::{rest_points, HysteresisMap, SOC_SNAP_TOLERANCE};

/// Smallest RMSE change (V) under halving or doubling `γ` that counts as
/// evidence for `γ`.
pub const GAMMA_SENSITIVITY_V: f64 = 1e-6;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct PlettFitConfig {
    pub pso: PsoConfig,
    pub gamma_bounds: (f64, f64),
    pub scale_bounds: (f64, f64),
}

impl Default for PlettFitConfig {
    fn default() -> Self {
        Self {
            pso: PsoConfig {
                n_particles: 40,
                max_iterations: 150,
                ..Default::default()
            },
            gamma_bounds: (0.1, 1000.0),
            scale_bounds: (0.0, 2.0),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PlettFit {
    pub params: HysteresisParams,
    pub scale: f64,
    /// RMSE of the rest-voltage predictions (V).
    pub rmse_v: f64,
    pub rest_points: usize,
    /// False when the data carry no information about `γ`.
    pub gamma_identifiable: bool,
    pub converged: bool,
    pub history: Vec<f64>,
}

/// One pulse test reduced to what the hysteresis state needs.
struct Trace {
    /// `(sample, current, efficiency, dt)` for every sample with current.
    steps: Vec<(usize, f64, f64, f64)>,
    /// `(sample, soc, temp, s, observed)` per rest, in time order.
    rests: Vec<(usize, f64, f64, f64, f64)>,
}

/// Rests off the map's SOC nodes are left out: the map has no equilibrium
/// voltage for them.
fn traces(tests: &[Dataset], spec: &CellSpec, map: &HysteresisMap) -> Result<Vec<Trace>> {
    let on_node = |soc: f64| map.soc_grid().iter().any(|&g| (g - soc).abs() <= SOC_SNAP_TOLERANCE);
    let points = rest_points(tests, spec)?;
    Ok(tests
        .iter()
        .map(|d| {
            let s = &d.series;
            let steps = (1..s.len())
                .filter(|&k| s.current_a[k] != 0.0)
                .map(|k| {
                    let i = s.current_a[k];
                    (k, i, spec.efficiency_for(i), s.time_s[k] - s.time_s[k - 1])
                })
                .collect();
            let rests = points
                .iter()
                .filter(|p| p.dataset == d.id && on_node(p.soc))
                .map(|p| (p.start, p.soc, p.temp_c, p.side.sign_state(), p.fit.v_at_8h))
                .collect();
            Trace { steps, rests }
        })
        .collect())
}

fn params_for(map: &HysteresisMap, m0: &[f64], scale: f64, gamma: f64) -> HysteresisParams {
    let temps = map.temp_grid_c();
    let mut m_map = map.half_gap.clone();
    for i in 0..m_map.n_soc() {
        for (j, &m0j) in m0.iter().enumerate() {
            m_map.set(i, j, scale * (map.half_gap.at(i, j) - m0j).max(0.0));
        }
    }
    HysteresisParams {
        m0: Table1d {
            temp_grid_c: temps.to_vec(),
            values: m0.to_vec(),
        },
        m_map,
        gamma,
    }
}

fn rmse(traces: &[Trace], map: &HysteresisMap, params: &HysteresisParams, capacity_ah: f64) -> f64 {
    let (mut ss, mut n) = (0.0, 0usize);
    for tr in traces {
        let mut st = HysteresisState::neutral();
        let mut next = 0;
        for &(k0, soc, temp, s, obs) in &tr.rests {
            while next < tr.steps.len() && tr.steps[next].0 <= k0 {
                let (_, i, eff, dt) = tr.steps[next];
                st = st.update_h(i, eff, params.gamma, dt, capacity_ah);
                next += 1;
            }
            let state = HysteresisState { h: st.h, s };
            let v = map.mean_ocv.interp(soc, temp) + state.voltage(soc, temp, params);
            ss += (v - obs).powi(2);
            n += 1;
        }
    }
    (ss / n as f64).sqrt()
}

/// Fits `(M0(T), scale, γ)` to the rests of `tests` given `map`.
pub fn fit_plett(tests: &[Dataset], map: &HysteresisMap, spec: &CellSpec, config: &PlettFitConfig) -> Result<PlettFit> {
    let traces = traces(tests, spec, map)?;
    let n_rests: usize = traces.iter().map(|t| t.rests.len()).sum();
    if n_rests == 0 {
        return Err(Error::InvalidInput("pulse tests contain no post-pulse rests on the map's nodes".into()));
    }
    let temps = map.temp_grid_c().to_vec();
    if let Some(d) = tests.iter().find(|d| !temps.contains(&d.ambient_temp_c)) {
        return Err(Error::Mismatch(format!(
            "pulse test `{}` at {} °C is not on the map's temperature grid",
            d.id, d.ambient_temp_c
        )));
    }
    let nt = temps.len();
    let mut names: Vec<String> = temps.iter().map(|t| format!("M0_V@{t}C")).collect();
    names.extend(["M_scale".to_string(), "gamma".to_string()]);
    let mut lower = vec![0.0; nt];
    let mut upper: Vec<f64> = (0..nt)
        .map(|j| {
            let hg = (0..map.half_gap.n_soc()).map(|i| map.half_gap.at(i, j)).fold(0.0, f64::max);
            1.5 * hg + 1e-4
        })
        .collect();
    let mut scale = vec![Scale::Linear; nt];
    lower.extend([config.scale_bounds.0, config.gamma_bounds.0]);
    upper.extend([config.scale_bounds.1, config.gamma_bounds.1]);
    scale.extend([Scale::Linear, Scale::Log]);
    let mut base: Vec<f64> = upper[..nt].iter().map(|u| u / 3.0).collect();
    base.extend([1.0f64.clamp(lower[nt], upper[nt]), (lower[nt + 1] * upper[nt + 1]).sqrt()]);
    let space = SearchSpace {
        names,
        lower,
        upper,
        scale,
        base,
        free: vec![true; nt + 2],
    };
    let eval = |v: &[f64]| {
        let p = params_for(map, &v[..nt], v[nt], v[nt + 1]);
        rmse(&traces, map, &p, spec.capacity_ah)
    };
    let out = run_pso(&space, &config.pso, eval)?;
    let v = &out.best_params;
    let (sc, gamma) = (v[nt], v[nt + 1]);
    let params = params_for(map, &v[..nt], sc, gamma);
    let rmse_v = rmse(&traces, map, &params, spec.capacity_ah);
    let sensitivity = [0.5, 2.0]
        .iter()
        .map(|f| (rmse(&traces, map, &params_for(map, &v[..nt], sc, gamma * f), spec.capacity_ah) - rmse_v).abs())
        .fold(0.0, f64::max);
    Ok(PlettFit {
        params,
        scale: sc,
        rmse_v,
        rest_points: n_rests,
        gamma_identifiable: sensitivity >= GAMMA_SENSITIVITY_V,
        converged: out.converged,
        history: out.history,
    })
}

/// Map implied by known hysteresis parameters and OCV: `half_gap = M0 + M`,
/// `mean_ocv = ocv`.
pub fn map_from_params(params: &HysteresisParams, ocv: impl Fn(f64, f64) -> f64, soc_grid: &[f64], temp_grid_c: &[f64]) -> HysteresisMap {
    HysteresisMap {
        half_gap: Table2d::from_fn(soc_grid, temp_grid_c, |s, t| params.m0.interp(t) + params.m_map.interp(s, t)),
        mean_ocv: Table2d::from_fn(soc_grid, temp_grid_c, ocv),
        covered: vec![true; soc_grid.len() * temp_grid_c.len()],
        missing: Vec::new(),
    }
}
