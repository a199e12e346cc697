//! Phase-wise Monte Carlo tree search with forecast-driven rollouts.

pub mod rollout;
pub mod state;
pub mod tree;

use crate::error::{Error, Result};
use crate::forecast::ForecastSequence;
use crate::grid::Cell;
use crate::kinematics::{evaluate_action, KinematicsParams};
use crate::polar::PolarTable;
use crate::scalar::Scalar;
use crate::scoring::{PositionWeights, ScoreParams};
use crate::seed::{channel, mix, rng_from};

pub use rollout::{crossing_snapshots, rollout, BatchResult, simulate_batch, BatchShape, RolloutResult, RolloutSpec};
pub use state::{feasible_candidates, gap_closeness, sampling_weights, Candidate, EvalContext, SimState};
pub use tree::{ucb, Tree, TreeNode};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PlannerConfig<T> {
    pub n_iter: usize,
    pub rollout_workers: usize,
    pub rollouts_per_worker: usize,
    pub c_ucb: T,
    /// Forecast horizon in stages.
    pub horizon: usize,
    pub delta_t: T,
    /// Mission stops once coverage reaches this fraction.
    pub coverage_target: T,
    pub a_thres: T,
    pub seed: u64,
    pub score: ScoreParams<T>,
    pub kinematics: KinematicsParams<T>,
    /// Run rollout batches on the rayon pool.
    pub parallel: bool,
}

impl<T: Scalar> Default for PlannerConfig<T> {
    fn default() -> Self {
        Self {
            n_iter: 64,
            rollout_workers: 96,
            rollouts_per_worker: 3,
            c_ucb: T::lit(2.5),
            horizon: 1,
            delta_t: T::lit(300.0),
            coverage_target: T::lit(0.96),
            a_thres: T::lit(3000.0),
            seed: 0,
            score: ScoreParams::default(),
            kinematics: KinematicsParams::default(),
            parallel: true,
        }
    }
}

impl<T: Scalar> PlannerConfig<T> {
    pub fn validate(&self) -> Result<()> {
        if self.n_iter == 0 || self.rollout_workers == 0 || self.rollouts_per_worker == 0 {
            return Err(Error::InvalidParameter("planner counts must be at least 1".into()));
        }
        if !(self.c_ucb > T::zero()) {
            return Err(Error::InvalidParameter("UCB constant must be positive".into()));
        }
        if !(self.delta_t > T::zero()) || !(self.a_thres >= T::zero()) {
            return Err(Error::InvalidParameter("delta_t must be positive and a_thres non-negative".into()));
        }
        if !(self.coverage_target > T::zero() && self.coverage_target <= T::one()) {
            return Err(Error::InvalidParameter("coverage target must lie in (0, 1]".into()));
        }
        self.score.validate()
    }

    fn shape(&self) -> BatchShape {
        BatchShape {
            workers: self.rollout_workers,
            rollouts_per_worker: self.rollouts_per_worker,
            parallel: self.parallel,
        }
    }
}

/// One executed planner decision.
#[derive(Debug, Clone, PartialEq)]
pub struct CommittedAction<T> {
    pub stage: usize,
    pub decision_idx: usize,
    pub action_id: u8,
    pub from: Cell,
    pub to: Cell,
    pub time: T,
    pub distance: T,
    /// Clock after execution.
    pub t_after: T,
    pub coverage_after: T,
    /// Whether the covered set after the move splits the uncovered region.
    pub splits: bool,
}

/// Root statistics at commit time.
#[derive(Debug, Clone, PartialEq)]
pub struct DecisionStats<T> {
    pub root_visits: u32,
    /// `(action_id, visits, mean)` per root child in expansion order.
    pub children: Vec<(u8, u32, T)>,
    pub committed: u8,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PhaseStop {
    /// The clock passed the end of the planning stage.
    PhaseEnded,
    TargetReached,
    /// No feasible, non-splitting action at the root.
    DeadEnd,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PhaseOutcome<T> {
    pub committed: Vec<CommittedAction<T>>,
    pub decisions: Vec<DecisionStats<T>>,
    pub stop: PhaseStop,
}

/// Plans and executes decisions for the stage containing `state.t()` until
/// the stage is over, the coverage target is met, or the root is a dead-end.
///
/// `forecast.stages[0]` must equal the true field of that stage. Committed
/// actions that start before the stage wall run to completion.
pub fn plan_phase<T: Scalar>(
    state: &mut SimState<T>,
    forecast: &ForecastSequence<T>,
    polar: &PolarTable<T>,
    config: &PlannerConfig<T>,
) -> Result<PhaseOutcome<T>> {
    config.validate()?;
    let phase_stage = state.env.stage_of(state.t());
    state.env.advance_to_stage(phase_stage)?;
    let truth = state.env.current_field()?;
    if forecast.base_stage != phase_stage || forecast.stages.first() != Some(&*truth) {
        return Err(Error::ForecastMismatch);
    }
    let grid = state.env.grid;
    let weights = PositionWeights::new(&grid, config.score.position_distance_exponent);
    let eval = EvalContext {
        polar,
        kinematics: &config.kinematics,
        weights: &weights,
        a_thres: config.a_thres,
        time_budget: config.delta_t,
    };
    let phase_end = T::from_count(phase_stage + 1) * config.delta_t;
    let horizon_end = T::from_count(phase_stage + config.horizon + 1) * config.delta_t;

    let mut outcome = PhaseOutcome { committed: Vec::new(), decisions: Vec::new(), stop: PhaseStop::PhaseEnded };
    let mut tree = Tree::new(TreeNode::new(state.clone(), config.coverage_target));
    let mut decision_idx = 0usize;

    loop {
        if state.coverage() >= config.coverage_target {
            outcome.stop = PhaseStop::TargetReached;
            break;
        }
        if state.t() >= phase_end {
            break;
        }
        let spec = RolloutSpec {
            eval,
            forecast,
            score: &config.score,
            horizon_end,
            time_origin: state.t(),
            u_origin: state.raster.redundancy_score(config.score.alpha).u,
            coverage_target: config.coverage_target,
        };
        let expandable = |n: &mut TreeNode<T>| {
            if n.terminal || n.state.t() >= horizon_end {
                return false;
            }
            if n.untried.is_none() {
                let field = forecast.field_for_stage(n.state.env.stage_of(n.state.t()));
                let mut c = feasible_candidates(&n.state, field, &eval, T::one());
                c.retain(|c| !c.splits);
                n.untried = Some(c);
            }
            !n.is_dead_end()
        };
        let root = tree.root;
        let mut probe = expandable;
        if !probe(tree.node_mut(root)) && !tree.node(root).terminal {
            outcome.stop = PhaseStop::DeadEnd;
            break;
        }

        for iter in 0..config.n_iter {
            let base = mix(&[config.seed, channel::PLANNER, phase_stage as u64, decision_idx as u64, iter as u64]);
            let leaf = tree.select(config.c_ucb, &mut probe);
            let mut rng = rng_from(&[base, 1]);
            let node = match tree.node(leaf).untried.as_ref() {
                Some(u) if !u.is_empty() => tree
                    .expand(leaf, config.coverage_target, &mut rng, |a, b| crossing_snapshots(a, b, &spec))
                    .unwrap_or(leaf),
                _ => leaf,
            };
            let batch = simulate_batch(&tree.node(node).state, &tree.node(node).prefix, &spec, config.shape(), base);
            tree.backpropagate(node, batch.score, batch.closeness);
        }

        let Some(best) = tree.best_child() else {
            outcome.stop = PhaseStop::DeadEnd;
            break;
        };
        let stats = DecisionStats {
            root_visits: tree.node(tree.root).visits,
            children: tree
                .node(tree.root)
                .children
                .iter()
                .map(|&c| {
                    let n = tree.node(c);
                    (n.action_id(), n.visits, n.mean)
                })
                .collect(),
            committed: tree.node(best).action_id(),
        };
        let action = tree.node(best).action.expect("child has an action");
        let from = state.vessel();
        let executed = evaluate_action(&grid, from, &truth, action, polar, &config.kinematics, config.delta_t);
        if !executed.feasible || Some(&executed) != tree.node(best).traversal.as_ref() {
            return Err(Error::InvalidParameter("committed action diverged from its true execution".into()));
        }
        state.apply(&executed);
        if state.checksum() != tree.node(best).state.checksum() {
            return Err(Error::InvalidParameter("promoted subtree does not match the true state".into()));
        }
        let splits = state.raster.morphology(config.a_thres).is_split(config.a_thres);
        assert!(!splits, "committed action splits the uncovered region");
        outcome.committed.push(CommittedAction {
            stage: phase_stage,
            decision_idx,
            action_id: action.id,
            from,
            to: executed.to.expect("feasible"),
            time: executed.total_time,
            distance: executed.distance,
            t_after: state.t(),
            coverage_after: state.coverage(),
            splits,
        });
        outcome.decisions.push(stats);
        tree.promote(best);
        decision_idx += 1;
    }
    Ok(outcome)
}
