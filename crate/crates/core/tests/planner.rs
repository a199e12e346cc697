use std::collections::HashMap;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use sailcover::planner::{
    feasible_candidates, sampling_weights, simulate_batch, ucb, BatchShape, EvalContext, RolloutSpec, Tree, TreeNode,
};
use sailcover::{
    make_forecast, plan_phase, run_mcts_mission, Cell, EnvState, FlowBounds, ForecastNoise, GridSpec, MissionConfig,
    MissionEvent, PlannerConfig, PolarTable, PositionWeights, ScoreParams, SimState,
};

fn state(rows: usize, cols: usize, seed: u64, start: Cell, covered: &[(usize, usize)]) -> SimState<f64> {
    let grid = GridSpec::new(rows, cols, 100.0, 72.0, 5.0).unwrap();
    let env = EnvState::new(grid, FlowBounds::default(), 300.0, seed, start).unwrap();
    let mut s = SimState::start(env);
    for &(i, j) in covered {
        s.raster.stamp(Cell::new(i, j));
    }
    s
}

#[test]
fn ucb_worked_example() {
    let v: f64 = ucb(1.0, 4, 16, 2.5);
    assert_eq!(format!("{v:.4}"), "3.0814");
    let v32: f32 = ucb(1.0, 4, 16, 2.5);
    assert!((v32 as f64 - v).abs() < 1e-5);
}

#[test]
fn expansion_follows_heuristic_proportions() {
    let mut s = state(6, 6, 3, Cell::new(2, 2), &[(2, 3), (1, 2)]);
    let polar = PolarTable::default();
    let kin = Default::default();
    let weights = PositionWeights::new(&s.env.grid, 0.5);
    let ctx = EvalContext { polar: &polar, kinematics: &kin, weights: &weights, a_thres: 3000.0, time_budget: 300.0 };
    let field = s.env.current_field().unwrap();
    let cands = feasible_candidates(&s, &field, &ctx, 1.0);
    let w = sampling_weights(&cands);
    assert!(cands.len() >= 4, "need a spread of candidates, got {}", cands.len());
    let total: f64 = w.iter().sum();
    assert!(total > 0.0 && w.iter().filter(|&&x| x > 0.0).count() >= 3);

    let mut root = TreeNode::new(s.clone(), 0.99);
    root.untried = Some(cands.clone());
    let mut tree = Tree::new(root);
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    let mut hits: HashMap<u8, usize> = HashMap::new();
    let draws = 100_000;
    for _ in 0..draws {
        let child = tree.expand(0, 0.99, &mut rng, |_, _| Vec::new()).unwrap();
        *hits.entry(tree.node(child).action_id()).or_default() += 1;
        tree.nodes.pop();
        tree.nodes[0].children.clear();
        tree.nodes[0].untried = Some(cands.clone());
    }
    let tv: f64 = cands
        .iter()
        .zip(&w)
        .map(|(c, &wk)| {
            let f = *hits.get(&c.action().id).unwrap_or(&0) as f64 / draws as f64;
            if wk == 0.0 {
                assert_eq!(f, 0.0);
            }
            (f - wk / total).abs()
        })
        .sum::<f64>()
        / 2.0;
    assert!(tv < 0.02, "TV distance {tv}");
}

#[test]
fn parallel_and_serial_batches_agree() {
    let s = state(6, 6, 8, Cell::new(0, 0), &[]);
    let polar = PolarTable::default();
    let kin = Default::default();
    let weights = PositionWeights::new(&s.env.grid, 0.5);
    let eval = EvalContext { polar: &polar, kinematics: &kin, weights: &weights, a_thres: 3000.0, time_budget: 300.0 };
    let forecast = make_forecast(8, 0, 1, &s.env.grid, &s.env.bounds, &ForecastNoise::default(), 300.0).unwrap();
    let score = ScoreParams::default();
    let spec = RolloutSpec {
        eval,
        forecast: &forecast,
        score: &score,
        horizon_end: 600.0,
        time_origin: 0.0,
        u_origin: s.raster.redundancy_score(0.2).u,
        coverage_target: 0.96,
    };
    for seed in 0..5 {
        let shape = |parallel| BatchShape { workers: 8, rollouts_per_worker: 3, parallel };
        let a = simulate_batch(&s, &[], &spec, shape(true), seed);
        let b = simulate_batch(&s, &[], &spec, shape(false), seed);
        assert_eq!(a, b);
        assert!(a.score > 0.0);
    }
}

#[test]
fn backpropagation_keeps_running_means() {
    let s = state(4, 4, 1, Cell::new(0, 0), &[]);
    let mut tree = Tree::new(TreeNode::new(s.clone(), 0.99));
    let mut child = TreeNode::new(s.clone(), 0.99);
    child.parent = Some(0);
    tree.nodes.push(child);
    tree.nodes[0].children.push(1);
    let mut grandchild = TreeNode::new(s, 0.99);
    grandchild.parent = Some(1);
    tree.nodes.push(grandchild);
    tree.nodes[1].children.push(2);
    tree.backpropagate(2, 3.0, 1.0);
    tree.backpropagate(1, 1.0, 0.0);
    tree.backpropagate(0, 2.0, 0.5);
    assert_eq!((tree.node(0).visits, tree.node(1).visits, tree.node(2).visits), (3, 2, 1));
    assert_eq!((tree.node(0).mean, tree.node(1).mean, tree.node(2).mean), (2.0, 2.0, 3.0));
    assert_eq!(tree.node(0).closeness, 0.5);
}

fn small_config(horizon: usize, seed: u64) -> PlannerConfig<f64> {
    PlannerConfig {
        n_iter: 8,
        rollout_workers: 4,
        rollouts_per_worker: 2,
        horizon,
        seed,
        coverage_target: 0.9,
        ..PlannerConfig::default()
    }
}

#[test]
fn visit_bookkeeping_across_decisions() {
    let cfg = small_config(1, 5);
    let mut s = state(6, 6, 5, Cell::new(0, 0), &[]);
    let forecast = make_forecast(5, 0, 1, &s.env.grid, &s.env.bounds, &ForecastNoise::default(), 300.0).unwrap();
    let out = plan_phase(&mut s, &forecast, &PolarTable::default(), &cfg).unwrap();
    assert!(!out.decisions.is_empty());
    let mut inherited = 0;
    for d in &out.decisions {
        assert_eq!(d.root_visits, inherited + cfg.n_iter as u32);
        let child_sum: u32 = d.children.iter().map(|c| c.1).sum();
        assert!(child_sum <= d.root_visits);
        inherited = d.children.iter().find(|c| c.0 == d.committed).unwrap().1;
    }
    for c in &out.committed {
        assert!(!c.splits);
        assert!(c.t_after <= 300.0 + 300.0);
    }
}

#[test]
fn plan_phase_is_deterministic() {
    let run = || {
        let mut s = state(6, 6, 12, Cell::new(0, 0), &[]);
        let f = make_forecast(12, 0, 1, &s.env.grid, &s.env.bounds, &ForecastNoise::default(), 300.0).unwrap();
        let out = plan_phase(&mut s, &f, &PolarTable::default(), &small_config(1, 12)).unwrap();
        (out.committed, out.decisions, s.checksum())
    };
    assert_eq!(run(), run());
}

#[test]
fn mismatched_forecast_is_rejected() {
    let mut s = state(6, 6, 1, Cell::new(0, 0), &[]);
    let f = make_forecast(2, 0, 1, &s.env.grid, &s.env.bounds, &ForecastNoise::default(), 300.0).unwrap();
    assert!(plan_phase(&mut s, &f, &PolarTable::default(), &small_config(1, 1)).is_err());
}

#[test]
fn missions_are_reproducible_and_never_split() {
    let cfg = MissionConfig { planner: small_config(1, 21), ..MissionConfig::default() };
    let run = || run_mcts_mission(state(5, 5, 21, Cell::new(0, 0), &[]), &PolarTable::default(), &cfg, |_, _| {}).unwrap();
    let a = run();
    let b = run();
    assert_eq!(a.events, b.events);
    assert_eq!(a.finish_time, b.finish_time);
    assert!(a.coverage >= 0.9 || a.aborted || a.timed_out);
    let mut replay = sailcover::CoverageRaster::new(a.state.env.grid);
    replay.stamp(Cell::new(0, 0));
    for e in &a.events {
        if let MissionEvent::Move(c) = e {
            assert!(!replay.would_split_uncovered(&[c.to], 3000.0));
            replay.stamp(c.to);
        }
    }
    assert_eq!(replay.counts(), a.state.raster.counts());
}

#[test]
fn single_precision_mission_runs() {
    let grid = GridSpec::<f32>::new(4, 4, 100.0, 72.0, 5.0).unwrap();
    let env = EnvState::new(grid, FlowBounds::default(), 300.0, 4, Cell::new(0, 0)).unwrap();
    let planner = PlannerConfig::<f32> { n_iter: 4, rollout_workers: 2, rollouts_per_worker: 1, coverage_target: 0.9, seed: 4, ..PlannerConfig::default() };
    let cfg = MissionConfig { planner, ..MissionConfig::default() };
    let out = run_mcts_mission(SimState::start(env), &PolarTable::default(), &cfg, |_, _| {}).unwrap();
    assert!(out.coverage >= 0.9 || out.aborted || out.timed_out);
    assert!(out.finish_time > 0.0);
}
