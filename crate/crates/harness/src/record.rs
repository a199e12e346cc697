//! Persisted per-run artifacts: the run record, the decision trace and the
//! time-coverage curve, plus replay helpers that rebuild maps from a trace.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use sailcover::{ActionSpec, Cell, CoverageRaster, GridSpec};
use serde::{Deserialize, Serialize};

use crate::error::HarnessError;

pub const TRACE_HEADER: &str = "stage,decision_idx,action_id,from_i,from_j,to_i,to_j,time_s,cum_coverage";
pub const CURVE_HEADER: &str = "t_s,coverage_pct";

/// One executed move, or a wait (`action_id == 0`, `from == to`).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TraceRow {
    pub stage: usize,
    pub decision_idx: usize,
    pub action_id: u8,
    pub from: Cell,
    pub to: Cell,
    pub time_s: f64,
    pub cum_coverage: f64,
}

impl TraceRow {
    pub fn is_wait(&self) -> bool {
        self.action_id == 0
    }

    /// Track length of the move, zero for waits.
    pub fn distance(&self, cell_size: f64) -> f64 {
        ActionSpec::from_id(self.action_id).map_or(0.0, |a| a.track_length(cell_size))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StageCoverage {
    pub stage: usize,
    pub t_s: f64,
    pub coverage_pct: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub seed: u64,
    pub method: String,
    pub coverage_pct: f64,
    pub finish_time_s: f64,
    pub await_time_s: f64,
    pub redundancy_pct: f64,
    pub distance_m: f64,
    /// Planner gave up after repeated dead ends.
    pub aborted: bool,
    pub timed_out: bool,
    pub moves: usize,
    pub stages: Vec<StageCoverage>,
    pub trace_path: String,
    pub config_digest: String,
}

impl RunRecord {
    pub fn completed(&self) -> bool {
        !self.aborted && !self.timed_out
    }

    pub fn write_json(&self, path: &Path) -> Result<(), HarnessError> {
        let text = serde_json::to_string_pretty(self).expect("record serializes");
        std::fs::write(path, text + "\n").map_err(HarnessError::io(path))
    }

    pub fn read_json(path: &Path) -> Result<Self, HarnessError> {
        let text = std::fs::read_to_string(path).map_err(HarnessError::io(path))?;
        serde_json::from_str(&text).map_err(|e| HarnessError::Format { path: path.into(), message: e.to_string() })
    }
}

pub fn write_trace(path: &Path, rows: &[TraceRow]) -> Result<(), HarnessError> {
    let file = File::create(path).map_err(HarnessError::io(path))?;
    let mut out = BufWriter::new(file);
    let mut write = || -> std::io::Result<()> {
        writeln!(out, "{TRACE_HEADER}")?;
        for r in rows {
            writeln!(
                out,
                "{},{},{},{},{},{},{},{},{}",
                r.stage, r.decision_idx, r.action_id, r.from.i, r.from.j, r.to.i, r.to.j, r.time_s, r.cum_coverage
            )?;
        }
        out.flush()
    };
    write().map_err(HarnessError::io(path))
}

pub fn read_trace(path: &Path) -> Result<Vec<TraceRow>, HarnessError> {
    let file = File::open(path).map_err(HarnessError::io(path))?;
    let bad = |line: usize, message: String| HarnessError::Format { path: path.into(), message: format!("line {line}: {message}") };
    let mut rows = Vec::new();
    for (n, line) in BufReader::new(file).lines().enumerate() {
        let line = line.map_err(HarnessError::io(path))?;
        if n == 0 {
            if line != TRACE_HEADER {
                return Err(bad(1, format!("unexpected header `{line}`")));
            }
            continue;
        }
        let f: Vec<&str> = line.split(',').collect();
        if f.len() != 9 {
            return Err(bad(n + 1, format!("expected 9 fields, got {}", f.len())));
        }
        let int = |k: usize| f[k].parse::<usize>().map_err(|e| bad(n + 1, e.to_string()));
        let num = |k: usize| f[k].parse::<f64>().map_err(|e| bad(n + 1, e.to_string()));
        rows.push(TraceRow {
            stage: int(0)?,
            decision_idx: int(1)?,
            action_id: f[2].parse().map_err(|e: std::num::ParseIntError| bad(n + 1, e.to_string()))?,
            from: Cell::new(int(3)?, int(4)?),
            to: Cell::new(int(5)?, int(6)?),
            time_s: num(7)?,
            cum_coverage: num(8)?,
        });
    }
    Ok(rows)
}

/// `(t, coverage %)` after every trace row, starting from the first stamp.
pub fn coverage_curve(initial_coverage: f64, rows: &[TraceRow]) -> Vec<(f64, f64)> {
    let mut t = 0.0;
    let mut cov = initial_coverage;
    let mut out = vec![(0.0, 100.0 * cov)];
    for r in rows {
        t += r.time_s;
        if !r.is_wait() {
            cov = r.cum_coverage;
        }
        out.push((t, 100.0 * cov));
    }
    out
}

pub fn write_curve(path: &Path, curve: &[(f64, f64)]) -> Result<(), HarnessError> {
    let mut text = String::from(CURVE_HEADER);
    text.push('\n');
    for (t, c) in curve {
        text.push_str(&format!("{t},{c}\n"));
    }
    std::fs::write(path, text).map_err(HarnessError::io(path))
}

pub fn read_curve(path: &Path) -> Result<Vec<(f64, f64)>, HarnessError> {
    let text = std::fs::read_to_string(path).map_err(HarnessError::io(path))?;
    let bad = |message: String| HarnessError::Format { path: path.into(), message };
    let mut lines = text.lines();
    if lines.next() != Some(CURVE_HEADER) {
        return Err(bad("missing curve header".into()));
    }
    lines
        .map(|l| {
            let (t, c) = l.split_once(',').ok_or_else(|| bad(format!("bad row `{l}`")))?;
            Ok((t.parse().map_err(|_| bad(format!("bad row `{l}`")))?, c.parse().map_err(|_| bad(format!("bad row `{l}`")))?))
        })
        .collect()
}

/// Replays the moves of `rows` from `start`, calling `visit` with the map
/// before each row is applied and once more at the end (`None`).
pub fn replay(
    grid: &GridSpec<f64>,
    start: Cell,
    rows: &[TraceRow],
    mut visit: impl FnMut(Option<&TraceRow>, &CoverageRaster<f64>),
) -> CoverageRaster<f64> {
    let mut raster = CoverageRaster::new(*grid);
    raster.stamp(start);
    for r in rows {
        visit(Some(r), &raster);
        if !r.is_wait() {
            raster.stamp(r.to);
        }
    }
    visit(None, &raster);
    raster
}

/// Indices of moves whose arrival would split the uncovered region.
pub fn connectivity_violations(grid: &GridSpec<f64>, start: Cell, rows: &[TraceRow], a_thres: f64) -> Vec<usize> {
    let mut bad = Vec::new();
    let mut idx = 0;
    replay(grid, start, rows, |row, raster| {
        if let Some(r) = row {
            if !r.is_wait() && raster.would_split_uncovered(&[r.to], a_thres) {
                bad.push(idx);
            }
            idx += 1;
        }
    });
    bad
}
