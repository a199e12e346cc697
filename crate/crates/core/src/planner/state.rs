//! Search state and candidate-action evaluation shared by tree and rollouts.

use rand::Rng;

use crate::env::EnvState;
use crate::field::FlowField;
use crate::grid::Cell;
use crate::kinematics::{evaluate_action, ActionSpec, KinematicsParams, TraversalResult};
use crate::morphology::is_split_mask;
use crate::polar::PolarTable;
use crate::raster::CoverageRaster;
use crate::scalar::Scalar;
use crate::scoring::{heuristic_score, HeuristicScore, PositionWeights};
use crate::seed::mix;

/// Environment clock/position plus the coverage raster.
#[derive(Debug, Clone)]
pub struct SimState<T> {
    pub env: EnvState<T>,
    pub raster: CoverageRaster<T>,
}

impl<T: Scalar> SimState<T> {
    /// Fresh mission state with the start cell already observed.
    pub fn start(env: EnvState<T>) -> Self {
        let mut raster = CoverageRaster::new(env.grid);
        raster.stamp(env.vessel());
        Self { env, raster }
    }

    pub fn t(&self) -> T {
        self.env.t()
    }

    pub fn vessel(&self) -> Cell {
        self.env.vessel()
    }

    pub fn coverage(&self) -> T {
        self.raster.coverage_fraction()
    }

    /// Moves to the traversal's destination, advances time and stamps the arrival cell.
    pub fn apply(&mut self, traversal: &TraversalResult<T>) {
        debug_assert!(traversal.feasible);
        let to = traversal.to.expect("feasible traversal has a destination");
        self.env.apply_move(to, traversal.total_time);
        self.raster.stamp(to);
    }

    pub fn checksum(&self) -> u64 {
        let mut words = vec![self.env.checksum(), self.raster.covered_pixels() as u64];
        words.extend(self.raster.counts().iter().map(|&c| c as u64).step_by(7));
        mix(&words)
    }
}

/// Immutable inputs every evaluation needs.
#[derive(Debug, Clone, Copy)]
pub struct EvalContext<'a, T> {
    pub polar: &'a PolarTable<T>,
    pub kinematics: &'a KinematicsParams<T>,
    pub weights: &'a PositionWeights<T>,
    pub a_thres: T,
    /// Longest allowed execution time of one action.
    pub time_budget: T,
}

#[derive(Debug, Clone)]
pub struct Candidate<T> {
    pub traversal: TraversalResult<T>,
    pub score: HeuristicScore<T>,
    pub splits: bool,
    /// Sampling weight used when no candidate adds new area: squared gap
    /// closeness of the end cell per second of travel.
    pub guide: T,
}

impl<T: Scalar> Candidate<T> {
    pub fn action(&self) -> ActionSpec {
        self.traversal.action
    }
}

/// Scores every feasible action from the current cell under `field`.
/// Regularity is raised to `p`.
pub fn feasible_candidates<T: Scalar>(
    state: &SimState<T>,
    field: &FlowField<T>,
    ctx: &EvalContext<'_, T>,
    p: T,
) -> Vec<Candidate<T>> {
    let grid = state.env.grid;
    let mut current_split: Option<bool> = None;
    let mut out = Vec::with_capacity(16);
    for action in ActionSpec::all() {
        let tr = evaluate_action(&grid, state.vessel(), field, action, ctx.polar, ctx.kinematics, ctx.time_budget);
        if !tr.feasible {
            continue;
        }
        let score = heuristic_score(&tr, &state.raster, ctx.weights, ctx.a_thres, p);
        let splits = match score.splits {
            Some(s) => s,
            // Covered set unchanged: the move splits iff the map already is split.
            None => *current_split.get_or_insert_with(|| {
                is_split_mask(state.raster.covered_mask(), grid.pixel_size, ctx.a_thres)
            }),
        };
        out.push(Candidate { traversal: tr, score, splits, guide: T::zero() });
    }
    if out.iter().all(|c| !(c.score.value > T::zero())) {
        let gaps: Vec<Cell> = state.raster.cells_with_gaps().collect();
        for c in &mut out {
            let closeness: T = gap_closeness(&gaps, c.traversal.to.expect("feasible"));
            c.guide = closeness * closeness / c.traversal.total_time;
        }
    }
    out
}

/// `1 / (1 + d)^2` with `d` the distance in cells from `cell` to the nearest
/// of `gaps`; 1 on a gap, and 1 when no gap is left.
pub fn gap_closeness<T: Scalar>(gaps: &[Cell], cell: Cell) -> T {
    let d2 = gaps
        .iter()
        .map(|g| {
            let (di, dj) = (g.i as i64 - cell.i as i64, g.j as i64 - cell.j as i64);
            di * di + dj * dj
        })
        .min();
    d2.map_or(T::one(), |d2| {
        let d = T::one() + T::from_i64(d2).unwrap().sqrt();
        T::one() / (d * d)
    })
}

/// Sampling weights: `H` when any candidate adds area, else the gap guide.
pub fn sampling_weights<T: Scalar>(cands: &[Candidate<T>]) -> Vec<T> {
    if cands.iter().any(|c| c.score.value > T::zero()) {
        cands.iter().map(|c| c.score.value).collect()
    } else {
        cands.iter().map(|c| c.guide).collect()
    }
}

/// Index drawn with probability proportional to `weights`; uniform when all are zero.
pub fn sample_proportional<T: Scalar, R: Rng>(weights: &[T], rng: &mut R) -> Option<usize> {
    if weights.is_empty() {
        return None;
    }
    let total = weights.iter().fold(T::zero(), |a, &w| a + w.max(T::zero()));
    if !(total > T::zero()) || !total.is_finite() {
        return Some(rng.gen_range(0..weights.len()));
    }
    let target = T::lit(rng.gen::<f64>()) * total;
    let mut acc = T::zero();
    for (k, &w) in weights.iter().enumerate() {
        acc = acc + w.max(T::zero());
        if target < acc {
            return Some(k);
        }
    }
    // Rounding left the target at the very top: take the last positive weight.
    weights.iter().rposition(|&w| w > T::zero())
}

/// Epsilon-greedy draw: uniform with probability `epsilon`, else proportional.
pub fn sample_epsilon_greedy<T: Scalar, R: Rng>(weights: &[T], epsilon: T, rng: &mut R) -> Option<usize> {
    if weights.is_empty() {
        return None;
    }
    if T::lit(rng.gen::<f64>()) < epsilon {
        Some(rng.gen_range(0..weights.len()))
    } else {
        sample_proportional(weights, rng)
    }
}
