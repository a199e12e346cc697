//! Experiment configuration: a TOML document with `grid`, `physics`,
//! `planner`, `forecast` and `run` sections. Every key is optional and
//! unknown keys are rejected.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use sailcover::{
    boustrophedon_coverage_level, BaselineConfig, FlowBounds, ForecastNoise, GridSpec, KinematicsParams,
    MissionConfig, PlannerConfig, PolarTable, ScoreParams,
};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::HarnessError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GridSection {
    pub rows: usize,
    pub cols: usize,
    pub cell_size: f64,
    pub pixel_size: f64,
    pub d_obs: f64,
}

impl Default for GridSection {
    fn default() -> Self {
        Self { rows: 10, cols: 10, cell_size: 100.0, pixel_size: 5.0, d_obs: 72.0 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PhysicsSection {
    pub v_min: f64,
    pub v_max: f64,
    pub v_floor: f64,
    pub no_go_angle: f64,
    /// Polar CSV, relative to the config file. The built-in table when absent.
    pub polar: Option<PathBuf>,
}

impl Default for PhysicsSection {
    fn default() -> Self {
        Self { v_min: 0.2, v_max: 5.0, v_floor: 0.05, no_go_angle: 40.0, polar: None }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PlannerSection {
    pub n_iter: usize,
    pub workers: usize,
    pub rollouts_per_worker: usize,
    pub c: f64,
    pub delta_t: f64,
    pub eta: f64,
    pub a_thres: f64,
    pub alpha: f64,
    pub beta: f64,
    pub epsilon: f64,
    pub p_range: [f64; 2],
}

impl Default for PlannerSection {
    fn default() -> Self {
        Self {
            n_iter: 64,
            workers: 96,
            rollouts_per_worker: 3,
            c: 2.5,
            delta_t: 300.0,
            eta: 0.96,
            a_thres: 3000.0,
            alpha: 0.2,
            beta: 0.2,
            epsilon: 0.3,
            p_range: [0.25, 4.0],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ForecastSection {
    pub eps_v: f64,
    pub eps_theta: f64,
}

impl Default for ForecastSection {
    fn default() -> Self {
        Self { eps_v: 0.05, eps_theta: 5.0 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunSection {
    pub seeds: Vec<u64>,
    pub methods: Vec<String>,
    pub out_dir: PathBuf,
    /// Mission cap in stages.
    pub max_stages: usize,
}

impl Default for RunSection {
    fn default() -> Self {
        Self {
            seeds: (40..=47).collect(),
            methods: vec!["base".into(), "mcts_k0".into(), "mcts_k1".into()],
            out_dir: PathBuf::from("out"),
            max_stages: 50,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub grid: GridSection,
    pub physics: PhysicsSection,
    pub planner: PlannerSection,
    pub forecast: ForecastSection,
    pub run: RunSection,
}

impl ExperimentConfig {
    pub fn from_toml_str(text: &str) -> Result<Self, HarnessError> {
        let cfg: Self = toml::from_str(text).map_err(|e| HarnessError::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn to_toml_string(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    pub fn grid_spec(&self) -> Result<GridSpec<f64>, HarnessError> {
        let g = &self.grid;
        GridSpec::new(g.rows, g.cols, g.cell_size, g.d_obs, g.pixel_size).map_err(config_err)
    }

    pub fn flow_bounds(&self) -> FlowBounds<f64> {
        FlowBounds { speed_min: self.physics.v_min, speed_max: self.physics.v_max, ..FlowBounds::default() }
    }

    pub fn kinematics(&self) -> KinematicsParams<f64> {
        KinematicsParams { v_floor: self.physics.v_floor }
    }

    pub fn score_params(&self) -> ScoreParams<f64> {
        let p = &self.planner;
        ScoreParams {
            alpha: p.alpha,
            beta: p.beta,
            epsilon: p.epsilon,
            p_range: (p.p_range[0], p.p_range[1]),
            ..ScoreParams::default()
        }
    }

    /// Coverage level both methods must reach: the point where the sweep
    /// first meets `eta`.
    pub fn coverage_target(&self) -> Result<f64, HarnessError> {
        Ok(boustrophedon_coverage_level(&self.grid_spec()?, self.planner.eta))
    }

    pub fn mission_config(&self, horizon: usize, seed: u64) -> Result<MissionConfig<f64>, HarnessError> {
        let p = &self.planner;
        let planner = PlannerConfig {
            n_iter: p.n_iter,
            rollout_workers: p.workers,
            rollouts_per_worker: p.rollouts_per_worker,
            c_ucb: p.c,
            horizon,
            delta_t: p.delta_t,
            coverage_target: self.coverage_target()?,
            a_thres: p.a_thres,
            seed,
            score: self.score_params(),
            kinematics: self.kinematics(),
            parallel: true,
        };
        planner.validate().map_err(config_err)?;
        Ok(MissionConfig {
            planner,
            noise: ForecastNoise { eps_speed: self.forecast.eps_v, eps_dir_deg: self.forecast.eps_theta },
            max_stages: self.run.max_stages,
            ..MissionConfig::default()
        })
    }

    pub fn baseline_config(&self) -> BaselineConfig<f64> {
        BaselineConfig {
            delta_t: self.planner.delta_t,
            coverage_target: self.planner.eta,
            kinematics: self.kinematics(),
            alpha: self.planner.alpha,
            max_stages: self.run.max_stages,
            ..BaselineConfig::default()
        }
    }

    pub fn methods(&self) -> Result<Vec<Method>, HarnessError> {
        self.run.methods.iter().map(|m| m.parse()).collect()
    }

    pub fn validate(&self) -> Result<(), HarnessError> {
        self.grid_spec()?;
        let ph = &self.physics;
        if !(ph.v_min > 0.0 && ph.v_max > ph.v_min) {
            return Err(HarnessError::Config(format!("physics: need 0 < v_min < v_max, got {} and {}", ph.v_min, ph.v_max)));
        }
        if !(ph.v_floor >= 0.0) || !(0.0..180.0).contains(&ph.no_go_angle) {
            return Err(HarnessError::Config("physics: v_floor must be >= 0 and no_go_angle in [0, 180)".into()));
        }
        if !(0.0..=1.0).contains(&self.planner.eta) || !(self.planner.delta_t > 0.0) {
            return Err(HarnessError::Config("planner: need eta in [0, 1] and delta_t > 0".into()));
        }
        if !(self.forecast.eps_v >= 0.0 && self.forecast.eps_theta >= 0.0) {
            return Err(HarnessError::Config("forecast: eps_v and eps_theta must be >= 0".into()));
        }
        self.score_params().validate().map_err(config_err)?;
        if self.run.max_stages == 0 {
            return Err(HarnessError::Config("run: max_stages must be at least 1".into()));
        }
        self.methods()?;
        self.mission_config(0, 0)?;
        Ok(())
    }
}

fn config_err(e: sailcover::Error) -> HarnessError {
    HarnessError::Config(e.to_string())
}

/// A parsed config together with where it came from and its polar table.
#[derive(Debug, Clone)]
pub struct LoadedConfig {
    pub config: ExperimentConfig,
    pub polar: PolarTable<f64>,
    /// Hex SHA-256 over the normalized config text and the polar table.
    pub digest: String,
}

impl LoadedConfig {
    /// `base_dir` resolves a relative polar path.
    pub fn new(config: ExperimentConfig, base_dir: &Path) -> Result<Self, HarnessError> {
        config.validate()?;
        let polar = match &config.physics.polar {
            Some(p) => PolarTable::from_csv_path(&base_dir.join(p), config.physics.no_go_angle).map_err(config_err)?,
            None => PolarTable { no_go_angle: config.physics.no_go_angle, ..PolarTable::default() },
        };
        polar.validate().map_err(config_err)?;
        let mut h = Sha256::new();
        h.update(config.to_toml_string().as_bytes());
        let mut table = Vec::new();
        polar.write_csv(&mut table).expect("in-memory write");
        h.update(&table);
        let digest = hex::encode(h.finalize());
        Ok(Self { config, polar, digest })
    }

    pub fn load(path: &Path) -> Result<Self, HarnessError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| HarnessError::Config(format!("{}: {e}", path.display())))?;
        let config = ExperimentConfig::from_toml_str(&text)?;
        Self::new(config, path.parent().unwrap_or(Path::new(".")))
    }

    pub fn defaults() -> Self {
        Self::new(ExperimentConfig::default(), Path::new(".")).expect("defaults are valid")
    }

    /// First 12 hex digits, used as the output directory name.
    pub fn short_digest(&self) -> &str {
        &self.digest[..12]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Method {
    Base,
    Mcts { horizon: usize },
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Method::Base => f.write_str("base"),
            Method::Mcts { horizon } => write!(f, "mcts_k{horizon}"),
        }
    }
}

impl FromStr for Method {
    type Err = HarnessError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if s == "base" {
            return Ok(Method::Base);
        }
        s.strip_prefix("mcts_k")
            .and_then(|k| k.parse().ok())
            .map(|horizon| Method::Mcts { horizon })
            .ok_or_else(|| HarnessError::Config(format!("unknown method `{s}` (expected base or mcts_k<N>)")))
    }
}

/// Parses `40..47` (inclusive), `40,41,45` or a single seed.
pub fn parse_seeds(s: &str) -> Result<Vec<u64>, HarnessError> {
    let bad = || HarnessError::Config(format!("bad seed list `{s}`"));
    if let Some((a, b)) = s.split_once("..") {
        let (a, b): (u64, u64) = (a.trim().parse().map_err(|_| bad())?, b.trim().parse().map_err(|_| bad())?);
        if a > b {
            return Err(bad());
        }
        return Ok((a..=b).collect());
    }
    s.split(',').map(|x| x.trim().parse().map_err(|_| bad())).collect()
}
