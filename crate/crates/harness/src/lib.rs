//! Experiment harness for the sailcover planner: configuration, single runs,
//! seed batches and the files consumed by the plotting scripts.

pub mod batch;
pub mod config;
pub mod error;
pub mod record;
pub mod run;

pub use batch::{emit_plot_data, run_batch, BatchResult, BatchSummary, MethodSummary, PlotManifest, Stat};
pub use config::{parse_seeds, ExperimentConfig, LoadedConfig, Method};
pub use error::HarnessError;
pub use record::{connectivity_violations, read_curve, read_trace, RunRecord, TraceRow};
pub use run::{execute, run_dir, run_experiment, RunOutput, START_CELL};
