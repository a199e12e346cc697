use std::path::Path;

use sailcover::{Cell, CoverageRaster};
use sailcover_harness::{
    connectivity_violations, emit_plot_data, execute, read_curve, read_trace, run_batch, run_dir, BatchSummary,
    ExperimentConfig, LoadedConfig, Method, PlotManifest, RunRecord,
};

fn small() -> LoadedConfig {
    let cfg = ExperimentConfig::from_toml_str(
        "[grid]\nrows = 5\ncols = 5\n[planner]\nn_iter = 6\nworkers = 3\nrollouts_per_worker = 2\n",
    )
    .unwrap();
    LoadedConfig::new(cfg, Path::new(".")).unwrap()
}

#[test]
fn repeated_runs_are_byte_identical() {
    let cfg = small();
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    let m = Method::Mcts { horizon: 1 };
    let ra = sailcover_harness::run_experiment(&cfg, m, 11, a.path()).unwrap();
    let rb = sailcover_harness::run_experiment(&cfg, m, 11, b.path()).unwrap();
    assert_eq!(ra, rb);
    for f in ["trace.csv", "curve.csv", "record.json", "fields.csv"] {
        let fa = std::fs::read(run_dir(a.path(), &cfg, m, 11).join(f)).unwrap();
        let fb = std::fs::read(run_dir(b.path(), &cfg, m, 11).join(f)).unwrap();
        assert_eq!(fa, fb, "{f} differs");
    }
}

#[test]
fn batch_jobs_do_not_change_results() {
    let cfg = small();
    let methods = [Method::Base, Method::Mcts { horizon: 0 }];
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    let serial = run_batch(&cfg, &methods, &[1, 2], a.path(), 1).unwrap();
    let parallel = run_batch(&cfg, &methods, &[1, 2], b.path(), 4).unwrap();
    assert_eq!(serial.records, parallel.records);
    assert_eq!(serial.summary, parallel.summary);
}

#[test]
fn summary_recomputes_from_persisted_records() {
    let cfg = small();
    let methods = [Method::Base, Method::Mcts { horizon: 0 }];
    let seeds = [3, 4, 5];
    let dir = tempfile::tempdir().unwrap();
    let batch = run_batch(&cfg, &methods, &seeds, dir.path(), 2).unwrap();
    let mut loaded = Vec::new();
    for &m in &methods {
        for &s in &seeds {
            loaded.push(RunRecord::read_json(&run_dir(dir.path(), &cfg, m, s).join("record.json")).unwrap());
        }
    }
    let again = BatchSummary::from_records(&cfg.digest, &methods, &seeds, &loaded);
    assert_eq!(again, batch.summary);
    let json: BatchSummary =
        serde_json::from_str(&std::fs::read_to_string(batch.dir.join("summary.json")).unwrap()).unwrap();
    assert_eq!(json, batch.summary);
    let base = batch.summary.method(Method::Base).unwrap();
    assert_eq!(base.runs, 3);
    assert_eq!(base.redundancy_pct.unwrap().std, 0.0);
}

#[test]
fn plot_data_is_monotone_and_listed() {
    let cfg = small();
    let dir = tempfile::tempdir().unwrap();
    let methods = [Method::Base, Method::Mcts { horizon: 1 }];
    let batch = run_batch(&cfg, &methods, &[8], dir.path(), 1).unwrap();
    let manifest_path = emit_plot_data(&cfg, &batch.records, dir.path()).unwrap();
    let manifest: PlotManifest = serde_json::from_str(&std::fs::read_to_string(&manifest_path).unwrap()).unwrap();
    assert_eq!(manifest.config_digest, cfg.digest);
    assert_eq!(manifest.curves.len(), 2);
    for entry in &manifest.curves {
        let curve = read_curve(&manifest_path.parent().unwrap().join(&entry.file)).unwrap();
        assert_eq!(curve[0].0, 0.0);
        for w in curve.windows(2) {
            assert!(w[1].0 >= w[0].0 && w[1].1 >= w[0].1, "{w:?}");
        }
        let rec = batch.record(entry.method.parse().unwrap(), entry.seed).unwrap();
        let last = curve.last().unwrap();
        assert!((last.0 - rec.finish_time_s).abs() < 1e-6);
        assert!((last.1 - rec.coverage_pct).abs() < 1e-9);
    }
}

#[test]
fn traces_replay_to_recorded_coverage() {
    let cfg = small();
    let grid = cfg.config.grid_spec().unwrap();
    for m in [Method::Base, Method::Mcts { horizon: 0 }] {
        let out = execute(&cfg, m, 6).unwrap();
        let dir = tempfile::tempdir().unwrap();
        sailcover_harness::run_experiment(&cfg, m, 6, dir.path()).unwrap();
        let rows = read_trace(&run_dir(dir.path(), &cfg, m, 6).join("trace.csv")).unwrap();
        assert_eq!(rows, out.trace);
        let mut raster = CoverageRaster::new(grid);
        raster.stamp(Cell::new(0, 0));
        for r in rows.iter().filter(|r| !r.is_wait()) {
            raster.stamp(r.to);
        }
        assert!((100.0 * raster.coverage_fraction() - out.record.coverage_pct).abs() < 1e-9);
        if m != Method::Base {
            assert!(connectivity_violations(&grid, Cell::new(0, 0), &rows, cfg.config.planner.a_thres).is_empty());
        }
    }
}
