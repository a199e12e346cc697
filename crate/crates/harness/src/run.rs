//! Single mission execution and its on-disk artifacts.

use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::time::Instant;

use sailcover::field::FIELD_CSV_HEADER;
use sailcover::{
    generate_stage_fields, run_baseline, run_mcts_mission, BaselineStep, Cell, EnvState, MissionEvent, SimState,
};

use crate::config::{LoadedConfig, Method};
use crate::error::HarnessError;
use crate::record::{coverage_curve, replay, write_curve, write_trace, RunRecord, StageCoverage, TraceRow};

pub const START_CELL: Cell = Cell { i: 0, j: 0 };

/// In-memory result of one mission.
#[derive(Debug, Clone)]
pub struct RunOutput {
    pub record: RunRecord,
    pub trace: Vec<TraceRow>,
}

/// `<out_root>/<digest>/<method>/<seed>`.
pub fn run_dir(out_root: &Path, config: &LoadedConfig, method: Method, seed: u64) -> PathBuf {
    out_root.join(config.short_digest()).join(method.to_string()).join(seed.to_string())
}

/// Writes the normalized config next to the runs it produced.
pub fn prepare_output(out_root: &Path, config: &LoadedConfig) -> Result<PathBuf, HarnessError> {
    let dir = out_root.join(config.short_digest());
    std::fs::create_dir_all(&dir).map_err(HarnessError::io(&dir))?;
    let path = dir.join("config.toml");
    std::fs::write(&path, config.config.to_toml_string()).map_err(HarnessError::io(&path))?;
    Ok(dir)
}

fn start_state(config: &LoadedConfig, seed: u64) -> Result<SimState<f64>, HarnessError> {
    let cfg = &config.config;
    let env = EnvState::new(cfg.grid_spec()?, cfg.flow_bounds(), cfg.planner.delta_t, seed, START_CELL)?;
    Ok(SimState::start(env))
}

/// Runs `method` on the scenario `seed` without touching the filesystem.
pub fn execute(config: &LoadedConfig, method: Method, seed: u64) -> Result<RunOutput, HarnessError> {
    let cfg = &config.config;
    let state = start_state(config, seed)?;
    let clock = Instant::now();
    let (trace, coverage, finish, await_time, redundancy, distance, aborted, timed_out) = match method {
        Method::Base => {
            let out = run_baseline(state, &config.polar, &cfg.baseline_config())?;
            let mut trace = Vec::new();
            let mut idx = (usize::MAX, 0);
            for step in &out.steps {
                let stage = match step {
                    BaselineStep::Moved { stage, .. } | BaselineStep::Waited { stage, .. } => *stage,
                    BaselineStep::Complete => continue,
                };
                idx = if idx.0 == stage { (stage, idx.1 + 1) } else { (stage, 0) };
                trace.push(match *step {
                    BaselineStep::Moved { action_id, from, to, time, coverage_after, .. } => TraceRow {
                        stage,
                        decision_idx: idx.1,
                        action_id,
                        from,
                        to,
                        time_s: time,
                        cum_coverage: coverage_after,
                    },
                    BaselineStep::Waited { at, duration, .. } => {
                        TraceRow { stage, decision_idx: idx.1, action_id: 0, from: at, to: at, time_s: duration, cum_coverage: 0.0 }
                    }
                    BaselineStep::Complete => unreachable!(),
                });
            }
            (trace, out.coverage, out.finish_time, out.await_time, out.redundancy_pct, out.distance, false, out.timed_out)
        }
        Method::Mcts { horizon } => {
            let mission = cfg.mission_config(horizon, seed)?;
            let mut stage_clock = Instant::now();
            let out = run_mcts_mission(state, &config.polar, &mission, |stage, _| {
                log::debug!("{method} seed {seed}: stage {stage} start, previous took {:?}", stage_clock.elapsed());
                stage_clock = Instant::now();
            })?;
            let trace = out
                .events
                .iter()
                .map(|e| match e {
                    &MissionEvent::Move(ref c) => TraceRow {
                        stage: c.stage,
                        decision_idx: c.decision_idx,
                        action_id: c.action_id,
                        from: c.from,
                        to: c.to,
                        time_s: c.time,
                        cum_coverage: c.coverage_after,
                    },
                    &MissionEvent::Wait { stage, at, duration } => {
                        TraceRow { stage, decision_idx: 0, action_id: 0, from: at, to: at, time_s: duration, cum_coverage: 0.0 }
                    }
                })
                .collect();
            (trace, out.coverage, out.finish_time, out.await_time, out.redundancy_pct, out.distance, out.aborted, out.timed_out)
        }
    };
    log::info!("{method} seed {seed}: coverage {:.2}% finish {finish:.1} s in {:?}", 100.0 * coverage, clock.elapsed());
    let mut trace: Vec<TraceRow> = trace;
    let initial = initial_coverage(config)?;
    fill_wait_coverage(&mut trace, initial);
    let record = RunRecord {
        seed,
        method: method.to_string(),
        coverage_pct: 100.0 * coverage,
        finish_time_s: finish,
        await_time_s: await_time,
        redundancy_pct: redundancy,
        distance_m: distance,
        aborted,
        timed_out,
        moves: trace.iter().filter(|r| !r.is_wait()).count(),
        stages: stage_coverage(&trace, cfg.planner.delta_t, finish, initial),
        trace_path: "trace.csv".into(),
        config_digest: config.digest.clone(),
    };
    Ok(RunOutput { record, trace })
}

fn initial_coverage(config: &LoadedConfig) -> Result<f64, HarnessError> {
    Ok(start_state(config, 0)?.coverage())
}

/// Waits carry the coverage of the last move before them.
fn fill_wait_coverage(trace: &mut [TraceRow], initial: f64) {
    let mut cov = initial;
    for r in trace {
        if r.is_wait() {
            r.cum_coverage = cov;
        } else {
            cov = r.cum_coverage;
        }
    }
}

/// Coverage at the end of every stage the mission touched.
fn stage_coverage(trace: &[TraceRow], delta_t: f64, finish: f64, initial: f64) -> Vec<StageCoverage> {
    let last = trace.last().map_or(0, |r| r.stage);
    (0..=last)
        .map(|stage| {
            let cov = trace.iter().filter(|r| r.stage <= stage).last().map_or(initial, |r| r.cum_coverage);
            let t_s = (delta_t * (stage + 1) as f64).min(finish);
            StageCoverage { stage, t_s, coverage_pct: 100.0 * cov }
        })
        .collect()
}

/// Runs one mission and writes `record.json`, `trace.csv`, `curve.csv`,
/// `fields.csv` and one `cov_stage<k>.pgm` per stage into its run directory.
pub fn run_experiment(config: &LoadedConfig, method: Method, seed: u64, out_root: &Path) -> Result<RunRecord, HarnessError> {
    let output = execute(config, method, seed)?;
    write_run(config, &output, method, out_root)?;
    Ok(output.record)
}

pub fn write_run(config: &LoadedConfig, output: &RunOutput, method: Method, out_root: &Path) -> Result<PathBuf, HarnessError> {
    let cfg = &config.config;
    let grid = cfg.grid_spec()?;
    let dir = run_dir(out_root, config, method, output.record.seed);
    std::fs::create_dir_all(&dir).map_err(HarnessError::io(&dir))?;
    output.record.write_json(&dir.join("record.json"))?;
    write_trace(&dir.join("trace.csv"), &output.trace)?;
    write_curve(&dir.join("curve.csv"), &coverage_curve(initial_coverage(config)?, &output.trace))?;

    let last_stage = output.record.stages.last().map_or(0, |s| s.stage);
    let mut next_stage = 0;
    let mut pgm_result = Ok(());
    replay(&grid, START_CELL, &output.trace, |row, raster| {
        let upto = row.map_or(last_stage + 1, |r| r.stage);
        while next_stage < upto && pgm_result.is_ok() {
            pgm_result = write_pgm(&dir.join(format!("cov_stage{next_stage}.pgm")), raster);
            next_stage += 1;
        }
    });
    pgm_result?;
    write_fields(&dir.join("fields.csv"), config, output.record.seed, last_stage)?;
    Ok(dir)
}

fn write_pgm(path: &Path, raster: &sailcover::CoverageRaster<f64>) -> Result<(), HarnessError> {
    let file = std::fs::File::create(path).map_err(HarnessError::io(path))?;
    raster.write_pgm(BufWriter::new(file)).map_err(HarnessError::io(path))
}

/// True fields of stages `0..=last_stage` as CSV.
pub fn write_fields(path: &Path, config: &LoadedConfig, seed: u64, last_stage: usize) -> Result<(), HarnessError> {
    let file = std::fs::File::create(path).map_err(HarnessError::io(path))?;
    let mut out = BufWriter::new(file);
    write_fields_to(&mut out, config, seed, last_stage)?;
    out.flush().map_err(HarnessError::io(path))
}

pub fn write_fields_to<W: Write>(out: &mut W, config: &LoadedConfig, seed: u64, last_stage: usize) -> Result<(), HarnessError> {
    let cfg = &config.config;
    let grid = cfg.grid_spec()?;
    let io = |e| HarnessError::Io { path: "fields.csv".into(), source: e };
    writeln!(out, "{FIELD_CSV_HEADER}").map_err(io)?;
    for stage in 0..=last_stage {
        generate_stage_fields(seed, stage, &grid, &cfg.flow_bounds())?.write_csv_rows(stage, out).map_err(io)?;
    }
    Ok(())
}
