//! Fixed serpentine sweep that waits out infeasible moves.

use crate::error::{Error, Result};
use crate::grid::{Cell, GridSpec};
use crate::kinematics::{evaluate_action, ActionSpec, KinematicsParams};
use crate::planner::SimState;
use crate::polar::PolarTable;
use crate::raster::CoverageRaster;
use crate::scalar::Scalar;

/// Row-by-row serpentine starting at the top-left cell.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BoustrophedonPlan {
    pub waypoints: Vec<Cell>,
    pub cursor: usize,
}

impl BoustrophedonPlan {
    pub fn new(rows: usize, cols: usize) -> Self {
        let mut waypoints = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            if i % 2 == 0 {
                waypoints.extend((0..cols).map(|j| Cell::new(i, j)));
            } else {
                waypoints.extend((0..cols).rev().map(|j| Cell::new(i, j)));
            }
        }
        Self { waypoints, cursor: 0 }
    }

    /// Waypoint the vessel should move to next.
    pub fn next_target(&self) -> Option<Cell> {
        self.waypoints.get(self.cursor + 1).copied()
    }

    pub fn is_exhausted(&self) -> bool {
        self.cursor + 1 >= self.waypoints.len()
    }
}

/// Coverage fraction at which a full-length sweep first reaches `target`,
/// or its final coverage if it never does. Independent of the flow fields.
pub fn boustrophedon_coverage_level<T: Scalar>(grid: &GridSpec<T>, target: T) -> T {
    let plan = BoustrophedonPlan::new(grid.rows, grid.cols);
    let mut raster = CoverageRaster::new(*grid);
    for &c in &plan.waypoints {
        raster.stamp(c);
        if raster.coverage_fraction() >= target {
            break;
        }
    }
    raster.coverage_fraction()
}

#[derive(Debug, Clone, PartialEq)]
pub enum BaselineStep<T> {
    Moved {
        stage: usize,
        action_id: u8,
        from: Cell,
        to: Cell,
        time: T,
        distance: T,
        coverage_after: T,
    },
    /// Scheduled move infeasible: idle until the next stage boundary.
    Waited { stage: usize, at: Cell, target: Cell, duration: T },
    Complete,
}

/// Executes or waits out the next scheduled move under the true field.
pub fn step_baseline<T: Scalar>(
    state: &mut SimState<T>,
    plan: &mut BoustrophedonPlan,
    polar: &PolarTable<T>,
    kinematics: &KinematicsParams<T>,
    delta_t: T,
) -> Result<BaselineStep<T>> {
    let Some(target) = plan.next_target() else {
        return Ok(BaselineStep::Complete);
    };
    let from = state.vessel();
    let action = ActionSpec::from_offset(target.i as i32 - from.i as i32, target.j as i32 - from.j as i32)
        .ok_or_else(|| Error::InvalidParameter("serpentine waypoints must be adjacent".into()))?;
    let stage = state.env.stage_of(state.t());
    state.env.advance_to_stage(stage)?;
    let field = state.env.current_field()?;
    let tr = evaluate_action(&state.env.grid, from, &field, action, polar, kinematics, delta_t);
    if tr.feasible {
        state.apply(&tr);
        plan.cursor += 1;
        return Ok(BaselineStep::Moved {
            stage,
            action_id: action.id,
            from,
            to: target,
            time: tr.total_time,
            distance: tr.distance,
            coverage_after: state.coverage(),
        });
    }
    let duration = state.env.stage_end(state.t()) - state.t();
    state.env.advance_clock(duration);
    Ok(BaselineStep::Waited { stage, at: from, target, duration })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BaselineConfig<T> {
    pub delta_t: T,
    pub coverage_target: T,
    pub kinematics: KinematicsParams<T>,
    /// Redundancy penalty weight used for the reported percentage.
    pub alpha: T,
    pub max_consecutive_waits: usize,
    /// Hard cap on mission length in stages.
    pub max_stages: usize,
}

impl<T: Scalar> Default for BaselineConfig<T> {
    fn default() -> Self {
        Self {
            delta_t: T::lit(300.0),
            coverage_target: T::lit(0.96),
            kinematics: KinematicsParams::default(),
            alpha: T::lit(0.2),
            max_consecutive_waits: 20,
            max_stages: 50,
        }
    }
}

#[derive(Debug, Clone)]
pub struct BaselineOutcome<T> {
    pub coverage: T,
    pub finish_time: T,
    pub await_time: T,
    pub redundancy_pct: T,
    pub distance: T,
    pub steps: Vec<BaselineStep<T>>,
    pub timed_out: bool,
    pub state: SimState<T>,
}

/// Runs the serpentine until the coverage target, plan exhaustion or timeout.
pub fn run_baseline<T: Scalar>(
    mut state: SimState<T>,
    polar: &PolarTable<T>,
    config: &BaselineConfig<T>,
) -> Result<BaselineOutcome<T>> {
    let grid = state.env.grid;
    let mut plan = BoustrophedonPlan::new(grid.rows, grid.cols);
    if state.vessel() != plan.waypoints[0] {
        return Err(Error::InvalidParameter("baseline must start at the first waypoint".into()));
    }
    let mut steps = Vec::new();
    let (mut await_time, mut distance) = (T::zero(), T::zero());
    let mut waits = 0usize;
    let mut timed_out = false;
    let t_cap = T::from_count(config.max_stages) * config.delta_t;
    while state.coverage() < config.coverage_target {
        if waits >= config.max_consecutive_waits || state.t() >= t_cap {
            timed_out = true;
            break;
        }
        let step = step_baseline(&mut state, &mut plan, polar, &config.kinematics, config.delta_t)?;
        match &step {
            BaselineStep::Moved { distance: d, .. } => {
                distance = distance + *d;
                waits = 0;
            }
            BaselineStep::Waited { duration, .. } => {
                await_time = await_time + *duration;
                waits += 1;
            }
            BaselineStep::Complete => break,
        }
        steps.push(step);
    }
    Ok(BaselineOutcome {
        coverage: state.coverage(),
        finish_time: state.t(),
        await_time,
        redundancy_pct: state.raster.redundancy_score(config.alpha).redundancy_pct,
        distance,
        steps,
        timed_out,
        state,
    })
}
