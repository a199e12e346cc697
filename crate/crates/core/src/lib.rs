//! Coverage path planning for an autonomous sailboat on a grid ocean with
//! cell-wise, stage-wise frozen wind and current fields.
//!
//! The numeric core is generic over [`Scalar`] (`f32` or `f64`); the
//! `*64` / `*32` aliases below pin the common instantiations.

pub mod baseline;
pub mod env;
pub mod error;
pub mod field;
pub mod forecast;
pub mod grid;
pub mod kinematics;
pub mod mask;
pub mod mission;
pub mod morphology;
pub mod planner;
pub mod polar;
pub mod raster;
pub mod scalar;
pub mod scoring;
pub mod seed;

pub use baseline::{
    boustrophedon_coverage_level, run_baseline, BaselineConfig, BaselineOutcome, BaselineStep, BoustrophedonPlan,
};
pub use env::EnvState;
pub use error::{Error, Result};
pub use field::{generate_scalar_field, generate_stage_fields, Flow, FlowBounds, FlowField, ScalarGrid};
pub use forecast::{make_forecast, ForecastNoise, ForecastSequence};
pub use grid::{Cell, GridSpec};
pub use kinematics::{
    actual_speed, decompose_track, effective_speed, evaluate_action, ActionSpec, KinematicsParams, TraversalResult,
};
pub use mask::PixelMask;
pub use mission::{run_mcts_mission, MissionConfig, MissionEvent, MissionOutcome};
pub use morphology::MorphologyReport;
pub use planner::{plan_phase, CommittedAction, DecisionStats, PhaseOutcome, PhaseStop, PlannerConfig, SimState};
pub use polar::PolarTable;
pub use raster::{CoverageRaster, RedundancyScore};
pub use scalar::Scalar;
pub use scoring::{PositionWeights, ScoreParams};

pub type GridSpec64 = GridSpec<f64>;
pub type GridSpec32 = GridSpec<f32>;
pub type FlowField64 = FlowField<f64>;
pub type FlowField32 = FlowField<f32>;
pub type ForecastSequence64 = ForecastSequence<f64>;
pub type PolarTable64 = PolarTable<f64>;
pub type PolarTable32 = PolarTable<f32>;
pub type EnvState64 = EnvState<f64>;
pub type EnvState32 = EnvState<f32>;
pub type CoverageRaster64 = CoverageRaster<f64>;
pub type CoverageRaster32 = CoverageRaster<f32>;
pub type TraversalResult64 = TraversalResult<f64>;
pub type PlannerConfig64 = PlannerConfig<f64>;
pub type SimState64 = SimState<f64>;
pub type ScoreParams64 = ScoreParams<f64>;
