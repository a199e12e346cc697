//! Seed x method batches, Table-style summaries and plot data.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::config::{LoadedConfig, Method};
use crate::error::HarnessError;
use crate::record::RunRecord;
use crate::run::{prepare_output, run_dir, run_experiment};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Stat {
    pub mean: f64,
    /// Sample standard deviation; zero for fewer than two values.
    pub std: f64,
    pub median: f64,
}

impl Stat {
    pub fn of(values: &[f64]) -> Option<Stat> {
        if values.is_empty() {
            return None;
        }
        let n = values.len() as f64;
        let mean = values.iter().sum::<f64>() / n;
        let std = if values.len() < 2 {
            0.0
        } else {
            (values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (n - 1.0)).sqrt()
        };
        let mut sorted = values.to_vec();
        sorted.sort_by(f64::total_cmp);
        let mid = sorted.len() / 2;
        let median = if sorted.len() % 2 == 1 { sorted[mid] } else { 0.5 * (sorted[mid - 1] + sorted[mid]) };
        Some(Stat { mean, std, median })
    }
}

/// Statistics over the completed runs of one method.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MethodSummary {
    pub method: String,
    pub runs: usize,
    pub completed: usize,
    pub coverage_pct: Option<Stat>,
    pub finish_time_s: Option<Stat>,
    pub await_time_s: Option<Stat>,
    pub redundancy_pct: Option<Stat>,
    pub distance_m: Option<Stat>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BatchSummary {
    pub config_digest: String,
    pub seeds: Vec<u64>,
    pub methods: Vec<MethodSummary>,
}

impl BatchSummary {
    pub fn from_records(config_digest: &str, methods: &[Method], seeds: &[u64], records: &[RunRecord]) -> Self {
        let methods = methods
            .iter()
            .map(|m| {
                let name = m.to_string();
                let mine: Vec<&RunRecord> = records.iter().filter(|r| r.method == name).collect();
                let done: Vec<&RunRecord> = mine.iter().copied().filter(|r| r.completed()).collect();
                let stat = |f: fn(&RunRecord) -> f64| Stat::of(&done.iter().map(|r| f(r)).collect::<Vec<_>>());
                MethodSummary {
                    method: name,
                    runs: mine.len(),
                    completed: done.len(),
                    coverage_pct: stat(|r| r.coverage_pct),
                    finish_time_s: stat(|r| r.finish_time_s),
                    await_time_s: stat(|r| r.await_time_s),
                    redundancy_pct: stat(|r| r.redundancy_pct),
                    distance_m: stat(|r| r.distance_m),
                }
            })
            .collect();
        Self { config_digest: config_digest.into(), seeds: seeds.to_vec(), methods }
    }

    pub fn method(&self, method: Method) -> Option<&MethodSummary> {
        let name = method.to_string();
        self.methods.iter().find(|m| m.method == name)
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from(
            "method,runs,completed,coverage_pct_mean,finish_time_s_mean,finish_time_s_std,finish_time_s_median,\
             await_time_s_mean,redundancy_pct_mean,redundancy_pct_std,distance_m_mean,distance_m_std\n",
        );
        let f = |s: &Option<Stat>, pick: fn(&Stat) -> f64| s.as_ref().map_or(String::new(), |s| format!("{}", pick(s)));
        for m in &self.methods {
            let _ = writeln!(
                out,
                "{},{},{},{},{},{},{},{},{},{},{},{}",
                m.method,
                m.runs,
                m.completed,
                f(&m.coverage_pct, |s| s.mean),
                f(&m.finish_time_s, |s| s.mean),
                f(&m.finish_time_s, |s| s.std),
                f(&m.finish_time_s, |s| s.median),
                f(&m.await_time_s, |s| s.mean),
                f(&m.redundancy_pct, |s| s.mean),
                f(&m.redundancy_pct, |s| s.std),
                f(&m.distance_m, |s| s.mean),
                f(&m.distance_m, |s| s.std),
            );
        }
        out
    }

    /// One row per seed and method, then an `Avg ± Std` row per method.
    pub fn to_table(&self, records: &[RunRecord]) -> String {
        let mut out = String::new();
        let _ = writeln!(
            out,
            "{:<6} {:<9} {:>9} {:>22} {:>14} {:>12}",
            "Seed", "Method", "Cov (%)", "Finished (await) (s)", "Redundancy (%)", "Distance (m)"
        );
        for &seed in &self.seeds {
            for m in &self.methods {
                if let Some(r) = records.iter().find(|r| r.seed == seed && r.method == m.method) {
                    let flag = if r.aborted { " aborted" } else if r.timed_out { " timeout" } else { "" };
                    let _ = writeln!(
                        out,
                        "{:<6} {:<9} {:>9.1} {:>22} {:>14.1} {:>12.1}{flag}",
                        format!("S{seed}"),
                        m.method,
                        r.coverage_pct,
                        format!("{:.1} ({:.1})", r.finish_time_s, r.await_time_s),
                        r.redundancy_pct,
                        r.distance_m
                    );
                }
            }
        }
        for m in &self.methods {
            let pm = |s: &Option<Stat>| s.as_ref().map_or("-".to_string(), |s| format!("{:.1} ± {:.1}", s.mean, s.std));
            let _ = writeln!(
                out,
                "{:<6} {:<9} {:>9} {:>22} {:>14} {:>12}  ({}/{} completed)",
                "Avg",
                m.method,
                m.coverage_pct.as_ref().map_or("-".into(), |s| format!("{:.1}", s.mean)),
                pm(&m.finish_time_s),
                pm(&m.redundancy_pct),
                pm(&m.distance_m),
                m.completed,
                m.runs
            );
        }
        out
    }
}

#[derive(Debug, Clone)]
pub struct BatchResult {
    pub records: Vec<RunRecord>,
    pub summary: BatchSummary,
    /// `<out_root>/<digest>`.
    pub dir: PathBuf,
}

impl BatchResult {
    pub fn record(&self, method: Method, seed: u64) -> Option<&RunRecord> {
        let name = method.to_string();
        self.records.iter().find(|r| r.seed == seed && r.method == name)
    }
}

/// Runs every (method, seed) pair on a pool of `jobs` threads and writes
/// `summary.txt`, `summary.csv` and `summary.json` next to the runs.
pub fn run_batch(
    config: &LoadedConfig,
    methods: &[Method],
    seeds: &[u64],
    out_root: &Path,
    jobs: usize,
) -> Result<BatchResult, HarnessError> {
    if seeds.is_empty() || methods.is_empty() {
        return Err(HarnessError::Config("a batch needs at least one seed and one method".into()));
    }
    let dir = prepare_output(out_root, config)?;
    let pairs: Vec<(Method, u64)> = methods.iter().flat_map(|&m| seeds.iter().map(move |&s| (m, s))).collect();
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs.max(1))
        .build()
        .map_err(|e| HarnessError::Config(format!("thread pool: {e}")))?;
    let records: Vec<RunRecord> = pool.install(|| {
        pairs.par_iter().map(|&(m, s)| run_experiment(config, m, s, out_root)).collect::<Result<_, _>>()
    })?;
    let summary = BatchSummary::from_records(&config.digest, methods, seeds, &records);
    let write = |name: &str, text: String| {
        let p = dir.join(name);
        std::fs::write(&p, text).map_err(HarnessError::io(p))
    };
    write("summary.txt", summary.to_table(&records))?;
    write("summary.csv", summary.to_csv())?;
    write("summary.json", serde_json::to_string_pretty(&summary).expect("summary serializes") + "\n")?;
    Ok(BatchResult { records, summary, dir })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurveEntry {
    pub method: String,
    pub seed: u64,
    pub file: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlotManifest {
    pub config_digest: String,
    pub curves: Vec<CurveEntry>,
}

/// Copies each run's curve to `<digest>/plots/curve_<method>_<seed>.csv` and
/// writes `manifest.json` listing them. Returns the manifest path.
pub fn emit_plot_data(config: &LoadedConfig, records: &[RunRecord], out_root: &Path) -> Result<PathBuf, HarnessError> {
    if let Some(r) = records.iter().find(|r| r.config_digest != config.digest) {
        return Err(HarnessError::Config(format!("record {} seed {} belongs to another config", r.method, r.seed)));
    }
    let dir = out_root.join(config.short_digest()).join("plots");
    std::fs::create_dir_all(&dir).map_err(HarnessError::io(&dir))?;
    let mut curves = Vec::new();
    for r in records {
        let method: Method = r.method.parse()?;
        let src = run_dir(out_root, config, method, r.seed).join("curve.csv");
        let file = format!("curve_{}_{}.csv", r.method, r.seed);
        std::fs::copy(&src, dir.join(&file)).map_err(HarnessError::io(&src))?;
        curves.push(CurveEntry { method: r.method.clone(), seed: r.seed, file });
    }
    let manifest = PlotManifest { config_digest: config.digest.clone(), curves };
    let path = dir.join("manifest.json");
    std::fs::write(&path, serde_json::to_string_pretty(&manifest).expect("manifest serializes") + "\n")
        .map_err(HarnessError::io(&path))?;
    Ok(path)
}
