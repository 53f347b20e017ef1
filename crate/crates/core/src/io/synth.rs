//! Synthetic test corpora generated from a known "truth" model.
//!
//! Profiles follow a battery tester's behaviour: whenever the terminal
//! voltage would cross a cell limit the step ends and the cell rests.
//! Every rate is capped by [`max_c_rate`] at the test temperature.

use std::path::Path;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::characterization::{minor_loop_targets, pulse_protocol, pulse_sequence, PulsePlan};
use crate::domain::{max_c_rate, CellSpec, Dataset, ProfileKind, Role, TimeSeries};
use crate::error::{Error, Result};
use crate::model::CellModel;
use crate::units::SECONDS_PER_HOUR;

use super::data::save_series;
use super::manifest::{Manifest, ManifestEntry, MANIFEST_SCHEMA_VERSION};

/// Shapes of the bundled drive cycles. Both are synthetic traces shaped
/// after the urban (UDDS) and aggressive highway (US06) schedules.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DriveCycle {
    Udds,
    Us06,
}

/// `(accelerate, cruise, decelerate, idle)` durations in seconds and the
/// peak speed of one micro-trip (m/s).
type Trip = (f64, f64, f64, f64, f64);

const UDDS_TRIPS: [Trip; 10] = [
    (20.0, 15.0, 15.0, 20.0, 8.0),
    (35.0, 40.0, 25.0, 15.0, 14.0),
    (45.0, 120.0, 35.0, 20.0, 25.0),
    (15.0, 10.0, 15.0, 25.0, 6.0),
    (30.0, 60.0, 25.0, 15.0, 13.0),
    (25.0, 35.0, 20.0, 30.0, 11.0),
    (40.0, 90.0, 30.0, 20.0, 16.0),
    (20.0, 20.0, 20.0, 25.0, 9.0),
    (35.0, 70.0, 30.0, 20.0, 15.0),
    (25.0, 45.0, 25.0, 35.0, 12.0),
];

const US06_TRIPS: [Trip; 5] = [
    (15.0, 20.0, 12.0, 10.0, 20.0),
    (30.0, 180.0, 25.0, 5.0, 36.0),
    (12.0, 15.0, 10.0, 10.0, 15.0),
    (20.0, 60.0, 15.0, 8.0, 28.0),
    (18.0, 25.0, 14.0, 15.0, 22.0),
];

impl DriveCycle {
    fn trips(self) -> &'static [Trip] {
        match self {
            DriveCycle::Udds => &UDDS_TRIPS,
            DriveCycle::Us06 => &US06_TRIPS,
        }
    }

    /// Fraction of the temperature's rate cap reached at peak power.
    fn peak_fraction(self) -> f64 {
        match self {
            DriveCycle::Udds => 0.6,
            DriveCycle::Us06 => 1.0,
        }
    }

    /// Speed trace at 1 s resolution (m/s).
    pub fn speed(self) -> Vec<f64> {
        let mut v = Vec::new();
        for &(acc, cruise, dec, idle, peak) in self.trips() {
            let ramp = |n: f64, up: bool| {
                (0..n as usize).map(move |k| {
                    let x = (k as f64 + 1.0) / n;
                    let s = (0.5 * std::f64::consts::PI * x).sin().powi(2);
                    peak * if up { s } else { 1.0 - s }
                })
            };
            v.extend(ramp(acc, true));
            // A gentle surge keeps the cruise from being perfectly flat.
            v.extend((0..cruise as usize).map(|k| peak * (1.0 + 0.05 * (k as f64 / 9.0).sin())));
            v.extend(ramp(dec, false));
            v.extend(std::iter::repeat(0.0).take(idle as usize));
        }
        v
    }

    /// Current trace at 1 s resolution, peak discharge `peak_a`. Braking
    /// recovers 60 % of the kinetic power as charge current.
    pub fn current(self, peak_a: f64) -> Vec<f64> {
        let v = self.speed();
        let power: Vec<f64> = (0..v.len())
            .map(|k| {
                let a = if k == 0 { v[0] } else { v[k] - v[k - 1] };
                let p = 1.2 * a * v[k] + 0.15 * v[k] + 4e-4 * v[k].powi(3);
                if p < 0.0 {
                    0.6 * p
                } else {
                    p
                }
            })
            .collect();
        let pmax = power.iter().cloned().fold(0.0, f64::max);
        power.iter().map(|p| peak_a * p / pmax).collect()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChargeStep {
    pub c_rate: f64,
    pub until_soc: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ProfileShape {
    /// Constant-current discharge until the lower voltage limit.
    ConstantDischarge { c_rate: f64 },
    /// Successive constant-current charge steps, each until a coulomb-counted
    /// SOC.
    MultiStepCharge { steps: Vec<ChargeStep> },
    /// Repeated drive cycles, peak scaled to the temperature's rate cap.
    DriveCycle { cycle: DriveCycle, repeats: usize },
    /// Full characterization pulse test from SOC 1.
    Pulse { plan: PulsePlan },
    /// Partial cycles from SOC 1 with a rest after each pulse.
    MinorLoops { plan: PulsePlan, targets: Vec<f64> },
}

impl ProfileShape {
    pub fn kind(&self) -> ProfileKind {
        match self {
            ProfileShape::ConstantDischarge { .. } => ProfileKind::ConstantRate,
            ProfileShape::MultiStepCharge { .. } => ProfileKind::MultiStep,
            ProfileShape::DriveCycle { .. } => ProfileKind::DriveCycle,
            ProfileShape::Pulse { .. } | ProfileShape::MinorLoops { .. } => ProfileKind::Characterization,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProfileSpec {
    pub id: String,
    pub role: Role,
    pub temp_c: f64,
    pub initial_soc: f64,
    pub shape: ProfileShape,
    /// Rest appended after the profile and after a limit cutoff (s).
    pub rest_after_s: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SynthPlan {
    pub profiles: Vec<ProfileSpec>,
    /// Standard deviation of the gaussian voltage noise (V).
    pub noise_sigma_v: f64,
    pub seed: u64,
}

pub const STANDARD_TEMPS_C: [f64; 5] = [-20.0, 0.0, 10.0, 25.0, 40.0];

impl SynthPlan {
    /// Constant 0.25/1/2 C discharges, a multi-step charge and both drive
    /// cycles at each standard temperature.
    pub fn standard(noise_sigma_v: f64, seed: u64) -> Self {
        let mut profiles = Vec::new();
        for &t in &STANDARD_TEMPS_C {
            let tag = temp_tag(t);
            for (c, role) in [(0.25, Role::Validation), (1.0, Role::Calibration), (2.0, Role::Validation)] {
                profiles.push(ProfileSpec {
                    id: format!("cc_{c}C_{tag}"),
                    role,
                    temp_c: t,
                    initial_soc: 1.0,
                    shape: ProfileShape::ConstantDischarge { c_rate: c },
                    rest_after_s: 1800.0,
                });
            }
            profiles.push(ProfileSpec {
                id: format!("msc_{tag}"),
                role: Role::Calibration,
                temp_c: t,
                initial_soc: 0.1,
                shape: ProfileShape::MultiStepCharge {
                    steps: vec![
                        ChargeStep { c_rate: 1.0, until_soc: 0.5 },
                        ChargeStep { c_rate: 0.5, until_soc: 0.8 },
                        ChargeStep { c_rate: 0.2, until_soc: 0.95 },
                    ],
                },
                rest_after_s: 1800.0,
            });
            for (cycle, role, name) in [(DriveCycle::Udds, Role::Calibration, "udds"), (DriveCycle::Us06, Role::Validation, "us06")] {
                profiles.push(ProfileSpec {
                    id: format!("{name}_{tag}"),
                    role,
                    temp_c: t,
                    initial_soc: 0.9,
                    shape: ProfileShape::DriveCycle { cycle, repeats: 4 },
                    rest_after_s: 600.0,
                });
            }
        }
        Self {
            profiles,
            noise_sigma_v,
            seed,
        }
    }

    /// One drive-cycle profile per standard temperature, alternating the two
    /// cycles: the compact corpus of the calibration round trip.
    pub fn round_trip(noise_sigma_v: f64, seed: u64) -> Self {
        let profiles = STANDARD_TEMPS_C
            .iter()
            .enumerate()
            .map(|(k, &t)| {
                let (cycle, name) = if k % 2 == 0 { (DriveCycle::Udds, "udds") } else { (DriveCycle::Us06, "us06") };
                ProfileSpec {
                    id: format!("{name}_{}", temp_tag(t)),
                    role: Role::Calibration,
                    temp_c: t,
                    initial_soc: 0.8,
                    shape: ProfileShape::DriveCycle { cycle, repeats: 2 },
                    rest_after_s: 300.0,
                }
            })
            .collect();
        Self {
            profiles,
            noise_sigma_v,
            seed,
        }
    }

    /// A full pulse test and a minor-loop test at each temperature.
    pub fn characterization(temps_c: &[f64], noise_sigma_v: f64, seed: u64) -> Self {
        let mut profiles = Vec::new();
        for &t in temps_c {
            let tag = temp_tag(t);
            profiles.push(ProfileSpec {
                id: format!("pulse_{tag}"),
                role: Role::Calibration,
                temp_c: t,
                initial_soc: 1.0,
                shape: ProfileShape::Pulse { plan: PulsePlan::default() },
                rest_after_s: 0.0,
            });
            profiles.push(ProfileSpec {
                id: format!("loops_{tag}"),
                role: Role::Calibration,
                temp_c: t,
                initial_soc: 1.0,
                shape: ProfileShape::MinorLoops {
                    plan: PulsePlan::default(),
                    targets: minor_loop_targets(),
                },
                rest_after_s: 0.0,
            });
        }
        Self {
            profiles,
            noise_sigma_v,
            seed,
        }
    }
}

/// `-20` → `m20C`, `25` → `25C`.
pub fn temp_tag(t: f64) -> String {
    if t < 0.0 {
        format!("m{}C", -t)
    } else {
        format!("{t}C")
    }
}

/// Samples of active segment `seg` of `p` starting from `soc`, or `None`
/// past the last segment. Constant discharges have one segment, drive
/// cycles one per repeat and multi-step charges one per step.
fn segment(spec: &CellSpec, p: &ProfileSpec, seg: usize, soc: f64) -> Result<Option<Vec<f64>>> {
    let dt = spec.sampling_dt_s;
    let cap = max_c_rate(p.temp_c);
    Ok(match &p.shape {
        ProfileShape::ConstantDischarge { c_rate } => {
            if !(*c_rate > 0.0) {
                return Err(Error::param("c_rate", "must be positive"));
            }
            (seg == 0).then(|| {
                let i = c_rate.min(cap) * spec.one_c();
                let secs = soc.max(0.0) * spec.capacity_ah * SECONDS_PER_HOUR / i;
                vec![i; (secs / dt).ceil() as usize]
            })
        }
        ProfileShape::MultiStepCharge { steps } => match steps.get(seg) {
            None => None,
            Some(s) => {
                if !(s.c_rate > 0.0 && s.until_soc <= 1.0) {
                    return Err(Error::param("steps", "rates must be positive and targets at most 1"));
                }
                let i = s.c_rate.min(cap) * spec.one_c();
                let secs = (s.until_soc - soc).max(0.0) * spec.capacity_ah * SECONDS_PER_HOUR / (spec.coulombic_efficiency * i);
                Some(vec![-i; (secs / dt).round() as usize])
            }
        },
        ProfileShape::DriveCycle { cycle, repeats } => (seg < *repeats).then(|| {
            let per_sample = (dt.round() as usize).max(1);
            cycle
                .current(cycle.peak_fraction() * cap * spec.one_c())
                .into_iter()
                .step_by(per_sample)
                .collect()
        }),
        ProfileShape::Pulse { .. } | ProfileShape::MinorLoops { .. } => None,
    })
}

/// The current profile of `p` with every segment run to completion, as if
/// no limit were ever reached.
pub fn current_profile(spec: &CellSpec, p: &ProfileSpec) -> Result<TimeSeries> {
    let dt = spec.sampling_dt_s;
    match &p.shape {
        ProfileShape::Pulse { plan } => {
            let plan = PulsePlan { dt_s: dt, ..plan.clone() };
            return pulse_protocol(spec, p.temp_c, &plan);
        }
        ProfileShape::MinorLoops { plan, targets } => {
            let plan = PulsePlan { dt_s: dt, ..plan.clone() };
            return pulse_sequence(spec, p.temp_c, &plan, p.initial_soc, targets);
        }
        _ => {}
    }
    let mut c = vec![0.0];
    let mut soc = p.initial_soc;
    let mut seg = 0;
    while let Some(samples) = segment(spec, p, seg, soc)? {
        soc -= samples.iter().map(|&i| spec.efficiency_for(i) * i * dt).sum::<f64>() / (spec.capacity_ah * SECONDS_PER_HOUR);
        c.extend(samples);
        seg += 1;
    }
    c.extend(std::iter::repeat(0.0).take((p.rest_after_s / dt).round() as usize));
    TimeSeries::uniform(dt, c, p.temp_c)
}

/// First sample at or after `from` that crosses a voltage limit in the
/// direction of its current.
fn limit_crossing(spec: &CellSpec, current: &[f64], voltage: &[f64], from: usize) -> Option<usize> {
    (from.max(1)..voltage.len()).find(|&k| (current[k] > 0.0 && voltage[k] < spec.v_min) || (current[k] < 0.0 && voltage[k] > spec.v_max))
}

/// Simulates `p` on `truth` the way a tester runs it. Each active segment
/// ends early when the voltage crosses a limit, or when the model leaves
/// its valid region under load (a depleted particle surface, where a real
/// cell's voltage collapses). A multi-step charge then moves on to its next
/// step; other shapes end. The profile closes with a rest. Returns the
/// noiseless dataset and the first early-end sample, if any.
pub fn synthesize_profile(truth: &CellModel, p: &ProfileSpec) -> Result<(Dataset, Option<usize>)> {
    let spec = &truth.cell;
    let dt = spec.sampling_dt_s;
    let aborted = |sim: &crate::model::Simulation| -> Result<()> {
        match &sim.abort {
            Some(a) => Err(Error::InvalidInput(format!("profile `{}` aborted at sample {}: {}", p.id, a.step, a.violation))),
            None => Ok(()),
        }
    };
    let mut cutoff = None;
    let profile = if matches!(p.shape, ProfileShape::Pulse { .. } | ProfileShape::MinorLoops { .. }) {
        current_profile(spec, p)?
    } else {
        let mut current = vec![0.0];
        let mut soc = p.initial_soc;
        let mut seg = 0;
        while let Some(samples) = segment(spec, p, seg, soc)? {
            seg += 1;
            if samples.is_empty() {
                continue;
            }
            let start = current.len();
            current.extend(samples);
            let prof = TimeSeries::uniform(dt, current.clone(), p.temp_c)?;
            let sim = truth.simulate(&prof, p.initial_soc, false)?;
            let depleted = sim.abort.as_ref().map(|a| a.step).filter(|&k| k >= start);
            if sim.abort.is_some() && depleted.is_none() {
                aborted(&sim)?;
            }
            let crossed = limit_crossing(spec, &current, &sim.voltage, start);
            let end = match (crossed, depleted) {
                (Some(a), Some(b)) => Some(a.min(b)),
                (a, b) => a.or(b),
            };
            if let Some(k) = end {
                current.truncate(k);
                cutoff.get_or_insert(k);
                if !matches!(p.shape, ProfileShape::MultiStepCharge { .. }) {
                    break;
                }
            }
            soc = p.initial_soc
                - current.iter().skip(1).map(|&i| spec.efficiency_for(i) * i * dt).sum::<f64>() / (spec.capacity_ah * SECONDS_PER_HOUR);
        }
        current.extend(std::iter::repeat(0.0).take(((p.rest_after_s / dt).round() as usize).max(1)));
        TimeSeries::uniform(dt, current, p.temp_c)?
    };
    let sim = truth.simulate(&profile, p.initial_soc, false)?;
    aborted(&sim)?;
    Ok((
        Dataset {
            id: p.id.clone(),
            role: p.role,
            ambient_temp_c: p.temp_c,
            profile_kind: p.shape.kind(),
            initial_soc: Some(p.initial_soc),
            series: profile.with_voltage(sim.voltage),
        },
        cutoff,
    ))
}

pub struct SynthOutput {
    pub datasets: Vec<Dataset>,
    /// Sample at which each profile was cut off at a voltage limit.
    pub cutoffs: Vec<Option<usize>>,
}

/// Simulates every profile of `plan` on `truth` and adds gaussian voltage
/// noise. Dataset `k` draws its noise from stream `k` of a ChaCha generator
/// seeded with `plan.seed`, so output is independent of thread count.
pub fn generate_synthetic(truth: &CellModel, plan: &SynthPlan) -> Result<SynthOutput> {
    truth.validate()?;
    if !(plan.noise_sigma_v >= 0.0 && plan.noise_sigma_v.is_finite()) {
        return Err(Error::param("noise_sigma_v", "must be finite and non-negative"));
    }
    let mut ids = std::collections::HashSet::new();
    if let Some(p) = plan.profiles.iter().find(|p| !ids.insert(p.id.as_str())) {
        return Err(Error::InvalidInput(format!("duplicate profile id `{}`", p.id)));
    }
    let results: Vec<(Dataset, Option<usize>)> = plan
        .profiles
        .par_iter()
        .map(|p| synthesize_profile(truth, p))
        .collect::<Result<_>>()?;
    let mut datasets = Vec::with_capacity(results.len());
    let mut cutoffs = Vec::with_capacity(results.len());
    for (k, (mut d, cut)) in results.into_iter().enumerate() {
        if plan.noise_sigma_v > 0.0 {
            let mut rng = ChaCha8Rng::seed_from_u64(plan.seed);
            rng.set_stream(k as u64);
            let noise = Normal::new(0.0, plan.noise_sigma_v).expect("finite sigma");
            for v in d.series.voltage_v.iter_mut() {
                *v += noise.sample(&mut rng);
            }
        }
        datasets.push(d);
        cutoffs.push(cut);
    }
    Ok(SynthOutput { datasets, cutoffs })
}

/// Writes `datasets` as `data/<id>.csv` plus `manifest.json`, and the
/// truth model as `truth.json`, under `dir`.
pub fn write_corpus(dir: &Path, datasets: &[Dataset], truth: &CellModel) -> Result<()> {
    std::fs::create_dir_all(dir.join("data"))?;
    let mut entries = Vec::with_capacity(datasets.len());
    for d in datasets {
        let file = Path::new("data").join(format!("{}.csv", d.id));
        save_series(&d.series, &dir.join(&file))?;
        entries.push(ManifestEntry {
            id: d.id.clone(),
            file,
            role: d.role,
            ambient_temp_c: d.ambient_temp_c,
            profile_kind: d.profile_kind,
            initial_soc: d.initial_soc,
        });
    }
    serde_json::to_writer_pretty(std::fs::File::create(dir.join("cell.json"))?, &truth.cell)?;
    Manifest {
        schema_version: MANIFEST_SCHEMA_VERSION,
        cell_spec: Some("cell.json".into()),
        datasets: entries,
    }
    .save(&dir.join("manifest.json"))?;
    truth.save(&dir.join("truth.json"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::reference;

    fn ecm_truth() -> CellModel {
        CellModel::ecm(reference::cell_spec(), reference::hysteresis_params(), reference::ecm_params())
    }

    #[test]
    fn drive_cycles_are_capped_in_the_cold() {
        let spec = reference::cell_spec();
        for cycle in [DriveCycle::Udds, DriveCycle::Us06] {
            let p = ProfileSpec {
                id: "x".into(),
                role: Role::Calibration,
                temp_c: -20.0,
                initial_soc: 0.9,
                shape: ProfileShape::DriveCycle { cycle, repeats: 1 },
                rest_after_s: 0.0,
            };
            let s = current_profile(&spec, &p).unwrap();
            let peak = s.current_a.iter().fold(0.0f64, |m, i| m.max(i.abs()));
            assert!(peak <= max_c_rate(-20.0) * spec.one_c() + 1e-9, "{peak}");
            assert!(peak > 0.0);
        }
    }

    #[test]
    fn drive_cycles_have_regen_and_idle() {
        for cycle in [DriveCycle::Udds, DriveCycle::Us06] {
            let i = cycle.current(100.0);
            assert!(i.iter().any(|&x| x < 0.0));
            assert!(i.iter().any(|&x| x == 0.0));
            assert!((i.iter().cloned().fold(0.0, f64::max) - 100.0).abs() < 1e-9);
        }
        assert!(DriveCycle::Udds.speed().len() > DriveCycle::Us06.speed().len());
    }

    #[test]
    fn constant_discharge_stops_at_v_min_and_rests() {
        let truth = ecm_truth();
        let p = ProfileSpec {
            id: "cc".into(),
            role: Role::Validation,
            temp_c: 25.0,
            initial_soc: 1.0,
            shape: ProfileShape::ConstantDischarge { c_rate: 1.0 },
            rest_after_s: 600.0,
        };
        let (d, cut) = synthesize_profile(&truth, &p).unwrap();
        let k = cut.expect("reaches v_min");
        assert!(d.series.voltage_v[..k].iter().all(|&v| v >= truth.cell.v_min));
        assert!(d.series.current_a[k..].iter().all(|&i| i == 0.0));
        assert_eq!(d.series.len(), k + 600);
    }

    #[test]
    fn cold_multi_step_charge_falls_through_to_lower_rates() {
        let truth = ecm_truth();
        let p = SynthPlan::standard(0.0, 0)
            .profiles
            .into_iter()
            .find(|p| p.id == "msc_0C")
            .unwrap();
        let (d, cut) = synthesize_profile(&truth, &p).unwrap();
        assert!(cut.is_some());
        let rates: std::collections::BTreeSet<i64> = d.series.current_a.iter().map(|i| (i * 1e6).round() as i64).collect();
        // at least two charge rates and rest
        assert!(rates.iter().filter(|&&r| r < 0).count() >= 2, "{rates:?}");
        assert!(d.series.voltage_v.iter().all(|&v| v <= truth.cell.v_max));
    }

    #[test]
    fn standard_plan_generates_on_both_models() {
        for truth in [
            ecm_truth(),
            CellModel::pbm(reference::cell_spec(), reference::hysteresis_params(), reference::pbm_params()),
        ] {
            let out = generate_synthetic(&truth, &SynthPlan::standard(0.0, 0)).unwrap();
            assert_eq!(out.datasets.len(), 30);
            for d in &out.datasets {
                let v = &d.series.voltage_v;
                for k in 1..v.len() {
                    let i = d.series.current_a[k];
                    assert!(!(i > 0.0 && v[k] < truth.cell.v_min) && !(i < 0.0 && v[k] > truth.cell.v_max), "{} at {k}", d.id);
                }
            }
        }
    }

    #[test]
    fn noiseless_corpus_reproduces_with_truth() {
        let truth = ecm_truth();
        let out = generate_synthetic(&truth, &SynthPlan::round_trip(0.0, 1)).unwrap();
        let c = crate::identify::cost(&truth, &out.datasets).unwrap();
        assert_eq!(c.total, 0.0);
    }

    #[test]
    fn seeded_noise_is_reproducible() {
        let truth = ecm_truth();
        let a = generate_synthetic(&truth, &SynthPlan::round_trip(5e-4, 9)).unwrap();
        let b = generate_synthetic(&truth, &SynthPlan::round_trip(5e-4, 9)).unwrap();
        let c = generate_synthetic(&truth, &SynthPlan::round_trip(5e-4, 10)).unwrap();
        assert_eq!(a.datasets, b.datasets);
        assert_ne!(a.datasets[0].series.voltage_v, c.datasets[0].series.voltage_v);
    }
}
