//! Forecast-driven rollouts and their batched evaluation.

use rand::Rng;
use rayon::prelude::*;

use crate::forecast::ForecastSequence;
use crate::kinematics::ActionSpec;
use crate::scalar::Scalar;
use crate::scoring::{rollout_reward, ScoreParams, StageSnapshot};
use crate::seed::{channel, mix, rng_from, unit_f64};

use super::state::{feasible_candidates, gap_closeness, sample_epsilon_greedy, sampling_weights, EvalContext, SimState};

/// Per-search constants of a rollout.
#[derive(Debug, Clone, Copy)]
pub struct RolloutSpec<'a, T> {
    pub eval: EvalContext<'a, T>,
    pub forecast: &'a ForecastSequence<T>,
    pub score: &'a ScoreParams<T>,
    /// Simulation stops once the clock reaches this time.
    pub horizon_end: T,
    /// Elapsed time in snapshots is measured from here.
    pub time_origin: T,
    /// `U` of the search root; snapshots record the gain over it.
    pub u_origin: T,
    pub coverage_target: T,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RolloutResult<T> {
    pub score: T,
    /// Closeness of the final cell to the nearest uncovered gap.
    pub closeness: T,
    pub actions: Vec<ActionSpec>,
    pub snapshots: Vec<StageSnapshot<T>>,
    pub dead_end: bool,
}

fn snapshot<T: Scalar>(state: &SimState<T>, spec: &RolloutSpec<'_, T>, u: T, at: T) -> StageSnapshot<T> {
    StageSnapshot {
        regularity: state.raster.morphology(spec.eval.a_thres).regularity(),
        u: u - spec.u_origin,
        elapsed: at - spec.time_origin,
    }
}

/// Snapshots at every stage wall in `(before.t, after.t]` up to the horizon.
/// `U` at a wall is interpolated linearly over the move in progress.
pub fn crossing_snapshots<T: Scalar>(
    before: &SimState<T>,
    after: &SimState<T>,
    spec: &RolloutSpec<'_, T>,
) -> Vec<StageSnapshot<T>> {
    let (t0, t1) = (before.t(), after.t());
    let mut wall = before.env.stage_end(t0);
    if wall > t1 || wall > spec.horizon_end {
        return Vec::new();
    }
    let alpha = spec.score.alpha;
    let (u0, u1) = (before.raster.redundancy_score(alpha).u, after.raster.redundancy_score(alpha).u);
    let regularity = after.raster.morphology(spec.eval.a_thres).regularity();
    let mut out = Vec::new();
    while wall <= t1 && wall <= spec.horizon_end {
        let f = (wall - t0) / (t1 - t0);
        out.push(StageSnapshot { regularity, u: u0 + f * (u1 - u0) - spec.u_origin, elapsed: wall - spec.time_origin });
        wall = wall + before.env.delta_t;
    }
    out
}

/// Simulates epsilon-greedy play from `start` until the horizon, the coverage
/// target, or a dead-end. Splitting actions are rejected and re-drawn.
///
/// The map is scored at every stage wall, so all rollouts of one search are
/// compared at the same instants. `prefix` holds the snapshots of walls
/// already crossed on the way to `start`. A dead-end freezes the map for the
/// remaining walls; reaching the target adds a snapshot at arrival.
pub fn rollout<T: Scalar, R: Rng>(
    start: &SimState<T>,
    prefix: &[StageSnapshot<T>],
    spec: &RolloutSpec<'_, T>,
    p: T,
    rng: &mut R,
) -> RolloutResult<T> {
    let mut state = start.clone();
    let mut actions = Vec::new();
    let mut snapshots = prefix.to_vec();
    let mut dead_end = false;

    loop {
        if state.coverage() >= spec.coverage_target {
            let at = state.t() - spec.time_origin;
            if snapshots.last().is_none_or(|s| s.elapsed < at) {
                let u = state.raster.redundancy_score(spec.score.alpha).u;
                snapshots.push(snapshot(&state, spec, u, state.t()));
            }
            break;
        }
        if state.t() >= spec.horizon_end {
            break;
        }
        let field = spec.forecast.field_for_stage(state.env.stage_of(state.t()));
        let mut cands = feasible_candidates(&state, field, &spec.eval, p);
        let chosen = loop {
            let weights = sampling_weights(&cands);
            match sample_epsilon_greedy(&weights, spec.score.epsilon, rng) {
                None => break None,
                Some(k) if cands[k].splits => {
                    cands.swap_remove(k);
                }
                Some(k) => break Some(cands.swap_remove(k)),
            }
        };
        let Some(c) = chosen else {
            dead_end = true;
            let u = state.raster.redundancy_score(spec.score.alpha).u;
            let frozen = snapshot(&state, spec, u, state.t());
            let mut wall = state.env.stage_end(state.t());
            while wall <= spec.horizon_end {
                snapshots.push(StageSnapshot { elapsed: wall - spec.time_origin, ..frozen });
                wall = wall + state.env.delta_t;
            }
            break;
        };
        let before = state.clone();
        state.apply(&c.traversal);
        actions.push(c.action());
        snapshots.extend(crossing_snapshots(&before, &state, spec));
    }
    let gaps: Vec<_> = state.raster.cells_with_gaps().collect();
    RolloutResult {
        score: rollout_reward(&snapshots, spec.score),
        closeness: gap_closeness(&gaps, state.vessel()),
        actions,
        snapshots,
        dead_end,
    }
}

/// Rollout layout of one simulation step.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BatchShape {
    pub workers: usize,
    pub rollouts_per_worker: usize,
    pub parallel: bool,
}

/// Regularity exponent of worker `w`, uniform on `p_range`.
pub fn worker_exponent<T: Scalar>(base_seed: u64, worker: usize, p_range: (T, T)) -> T {
    let u = T::lit(unit_f64(mix(&[base_seed, channel::PLANNER, worker as u64, 0x9])));
    p_range.0 + (p_range.1 - p_range.0) * u
}

/// Batch means of rollout score and final gap closeness.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BatchResult<T> {
    pub score: T,
    pub closeness: T,
}

/// Means over `workers * rollouts_per_worker` rollouts, each seeded from
/// `(base_seed, worker, index)`. The result does not depend on scheduling:
/// values are reduced in seed order.
pub fn simulate_batch<T: Scalar>(
    start: &SimState<T>,
    prefix: &[StageSnapshot<T>],
    spec: &RolloutSpec<'_, T>,
    shape: BatchShape,
    base_seed: u64,
) -> BatchResult<T> {
    let jobs: Vec<(usize, usize)> = (0..shape.workers)
        .flat_map(|w| (0..shape.rollouts_per_worker).map(move |r| (w, r)))
        .collect();
    let run = |&(w, r): &(usize, usize)| {
        let p = worker_exponent(base_seed, w, spec.score.p_range);
        let mut rng = rng_from(&[base_seed, w as u64, r as u64]);
        let r = rollout(start, prefix, spec, p, &mut rng);
        (r.score, r.closeness)
    };
    let results: Vec<(T, T)> = if shape.parallel {
        jobs.par_iter().map(run).collect()
    } else {
        jobs.iter().map(run).collect()
    };
    let (scores, closeness): (Vec<T>, Vec<T>) = results.into_iter().unzip();
    BatchResult { score: mean(&scores), closeness: mean(&closeness) }
}

pub fn mean<T: Scalar>(xs: &[T]) -> T {
    if xs.is_empty() {
        return T::zero();
    }
    xs.iter().fold(T::zero(), |a, &b| a + b) / T::from_count(xs.len())
}
