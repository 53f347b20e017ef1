//! Global-best particle swarm optimization on the unit cube of a
//! [`SearchSpace`].
//!
//! All random draws happen in the coordinator in a fixed order. Cost
//! evaluations run in parallel, and the global best is chosen by
//! `(cost, particle index)`, so a run is bit-reproducible for a given seed
//! regardless of thread count.

use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

use super::space::SearchSpace;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct PsoConfig {
    pub n_particles: usize,
    pub max_iterations: usize,
    pub inertia: f64,
    pub cognitive: f64,
    pub social: f64,
    /// Stop as soon as the best cost is at or below this value.
    pub cost_tolerance: f64,
    /// Velocity limit as a fraction of each dimension's range.
    pub velocity_clamp: f64,
    pub seed: u64,
}

impl Default for PsoConfig {
    fn default() -> Self {
        Self {
            n_particles: 500,
            max_iterations: 300,
            inertia: 0.72,
            cognitive: 1.49,
            social: 1.49,
            cost_tolerance: 0.0,
            velocity_clamp: 0.25,
            seed: 0,
        }
    }
}

impl PsoConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n_particles < 2 {
            return Err(Error::param("n_particles", "must be at least 2"));
        }
        if self.max_iterations == 0 {
            return Err(Error::param("max_iterations", "must be positive"));
        }
        for (name, v) in [
            ("inertia", self.inertia),
            ("cognitive", self.cognitive),
            ("social", self.social),
            ("velocity_clamp", self.velocity_clamp),
        ] {
            if !(v > 0.0) {
                return Err(Error::param(name, "must be positive"));
            }
        }
        Ok(())
    }
}

/// Outcome of one swarm run.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PsoOutcome {
    /// Full parameter vector of the best particle ever seen.
    pub best_params: Vec<f64>,
    pub best_cost: f64,
    /// Best cost after initialization (entry 0) and after each iteration.
    pub history: Vec<f64>,
    /// False when no iteration improved on the initial swarm.
    pub converged: bool,
    pub evaluations: usize,
    pub wall_time_s: f64,
}

#[inline]
fn sanitize(c: f64) -> f64 {
    if c.is_nan() {
        f64::INFINITY
    } else {
        c
    }
}

/// Index and cost of the lowest cost, ties to the lowest index.
fn argmin(costs: &[f64]) -> (usize, f64) {
    let mut best = (0, costs[0]);
    for (i, &c) in costs.iter().enumerate().skip(1) {
        if c < best.1 {
            best = (i, c);
        }
    }
    best
}

/// Minimizes `cost` over the free dimensions of `space`. Particle 0 starts at
/// the space's base point; the rest start uniformly at random.
pub fn run_pso<F>(space: &SearchSpace, config: &PsoConfig, cost: F) -> Result<PsoOutcome>
where
    F: Fn(&[f64]) -> f64 + Sync,
{
    space.validate()?;
    config.validate()?;
    let start = Instant::now();
    let free = space.free_indices();
    let d = free.len();
    let n = config.n_particles;
    let vmax = config.velocity_clamp;
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);

    let mut pos: Vec<Vec<f64>> = (0..n)
        .map(|i| {
            if i == 0 {
                free.iter().map(|&k| space.to_unit(k, space.base[k])).collect()
            } else {
                (0..d).map(|_| rng.gen::<f64>()).collect()
            }
        })
        .collect();
    let mut vel: Vec<Vec<f64>> = (0..n)
        .map(|_| (0..d).map(|_| rng.gen_range(-vmax..vmax)).collect())
        .collect();

    let evaluate = |pos: &[Vec<f64>]| -> Vec<f64> {
        pos.par_iter()
            .map(|u| sanitize(cost(&space.expand(&free, u))))
            .collect()
    };

    let costs = evaluate(&pos);
    let mut evaluations = n;
    let mut pbest = pos.clone();
    let mut pbest_cost = costs;
    let (gi, gc) = argmin(&pbest_cost);
    let mut gbest = pbest[gi].clone();
    let mut gbest_cost = gc;
    let mut history = vec![gbest_cost];

    for _ in 0..config.max_iterations {
        if gbest_cost <= config.cost_tolerance {
            break;
        }
        for i in 0..n {
            for k in 0..d {
                let r1: f64 = rng.gen();
                let r2: f64 = rng.gen();
                let v = config.inertia * vel[i][k]
                    + config.cognitive * r1 * (pbest[i][k] - pos[i][k])
                    + config.social * r2 * (gbest[k] - pos[i][k]);
                let v = v.clamp(-vmax, vmax);
                let x = pos[i][k] + v;
                if x < 0.0 {
                    pos[i][k] = 0.0;
                    vel[i][k] = 0.0;
                } else if x > 1.0 {
                    pos[i][k] = 1.0;
                    vel[i][k] = 0.0;
                } else {
                    pos[i][k] = x;
                    vel[i][k] = v;
                }
            }
        }
        let costs = evaluate(&pos);
        evaluations += n;
        for i in 0..n {
            if costs[i] < pbest_cost[i] {
                pbest_cost[i] = costs[i];
                pbest[i].clone_from(&pos[i]);
            }
        }
        let (gi, gc) = argmin(&pbest_cost);
        if gc < gbest_cost {
            gbest_cost = gc;
            gbest.clone_from(&pbest[gi]);
        }
        history.push(gbest_cost);
    }

    let converged = history.len() > 1 && *history.last().unwrap() < history[0];
    Ok(PsoOutcome {
        best_params: space.expand(&free, &gbest),
        best_cost: gbest_cost,
        history,
        converged,
        evaluations,
        wall_time_s: start.elapsed().as_secs_f64(),
    })
}
