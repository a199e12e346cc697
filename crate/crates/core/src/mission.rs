//! Stage-by-stage MCTS mission driver.

use crate::error::Result;
use crate::forecast::{make_forecast, ForecastNoise};
use crate::grid::Cell;
use crate::planner::{plan_phase, CommittedAction, DecisionStats, PhaseStop, PlannerConfig, SimState};
use crate::polar::PolarTable;
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MissionConfig<T> {
    pub planner: PlannerConfig<T>,
    pub noise: ForecastNoise<T>,
    /// Mission time cap in stages.
    pub max_stages: usize,
    /// Consecutive stages with a dead-end root before the mission aborts.
    pub max_dead_end_stages: usize,
}

impl<T: Scalar> Default for MissionConfig<T> {
    fn default() -> Self {
        Self { planner: PlannerConfig::default(), noise: ForecastNoise::default(), max_stages: 50, max_dead_end_stages: 20 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum MissionEvent<T> {
    Move(CommittedAction<T>),
    /// Root dead-end: the vessel idles until the next stage boundary.
    Wait { stage: usize, at: Cell, duration: T },
}

#[derive(Debug, Clone)]
pub struct MissionOutcome<T> {
    pub events: Vec<MissionEvent<T>>,
    pub decisions: Vec<DecisionStats<T>>,
    pub coverage: T,
    pub finish_time: T,
    pub await_time: T,
    pub distance: T,
    pub redundancy_pct: T,
    pub aborted: bool,
    pub timed_out: bool,
    pub state: SimState<T>,
}

/// Plans stage after stage with a fresh forecast each time until the
/// coverage target is reached. `on_stage` sees the state at every stage start.
pub fn run_mcts_mission<T: Scalar>(
    mut state: SimState<T>,
    polar: &PolarTable<T>,
    config: &MissionConfig<T>,
    mut on_stage: impl FnMut(usize, &SimState<T>),
) -> Result<MissionOutcome<T>> {
    let pc = &config.planner;
    pc.validate()?;
    let mut events = Vec::new();
    let mut decisions = Vec::new();
    let (mut await_time, mut distance) = (T::zero(), T::zero());
    let (mut aborted, mut timed_out) = (false, false);
    let mut dead_stages = 0usize;
    let t_cap = T::from_count(config.max_stages) * pc.delta_t;
    while state.coverage() < pc.coverage_target {
        if state.t() >= t_cap {
            timed_out = true;
            break;
        }
        let stage = state.env.stage_of(state.t());
        on_stage(stage, &state);
        let env = &state.env;
        let forecast = make_forecast(env.seed, stage, pc.horizon, &env.grid, &env.bounds, &config.noise, pc.delta_t)?;
        let phase = plan_phase(&mut state, &forecast, polar, pc)?;
        for c in phase.committed {
            distance = distance + c.distance;
            events.push(MissionEvent::Move(c));
        }
        decisions.extend(phase.decisions);
        match phase.stop {
            PhaseStop::TargetReached => break,
            PhaseStop::PhaseEnded => dead_stages = 0,
            PhaseStop::DeadEnd => {
                let duration = state.env.stage_end(state.t()) - state.t();
                events.push(MissionEvent::Wait { stage, at: state.vessel(), duration });
                state.env.advance_clock(duration);
                await_time = await_time + duration;
                dead_stages += 1;
                if dead_stages >= config.max_dead_end_stages {
                    aborted = true;
                    break;
                }
            }
        }
    }
    Ok(MissionOutcome {
        events,
        decisions,
        coverage: state.coverage(),
        finish_time: state.t(),
        await_time,
        distance,
        redundancy_pct: state.raster.redundancy_score(pc.score.alpha).redundancy_pct,
        aborted,
        timed_out,
        state,
    })
}
