//! Horizon-indexed forecasts with linearly growing, bounded error.

use crate::error::Result;
use crate::field::{generate_stage_fields, Flow, FlowBounds, FlowField};
use crate::grid::GridSpec;
use crate::scalar::{wrap_deg, Scalar};
use crate::seed::{channel, mix, unit_f64};

/// Per-step forecast error magnitudes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ForecastNoise<T> {
    /// Relative speed error per forecast step (0.05 = 5%).
    pub eps_speed: T,
    /// Direction error per forecast step, degrees.
    pub eps_dir_deg: T,
}

impl<T: Scalar> Default for ForecastNoise<T> {
    fn default() -> Self {
        Self { eps_speed: T::lit(0.05), eps_dir_deg: T::lit(5.0) }
    }
}

/// Smallest speed factor a perturbation may produce.
const MIN_SPEED_FACTOR: f64 = 1e-3;

#[derive(Debug, Clone, PartialEq)]
pub struct ForecastSequence<T> {
    /// Stage index of `stages[0]`.
    pub base_stage: usize,
    pub base_time: T,
    pub delta_t: T,
    /// `stages[k]` is the bulletin for `base_stage + k`, `k = 0..=horizon`.
    pub stages: Vec<FlowField<T>>,
}

impl<T: Scalar> ForecastSequence<T> {
    pub fn horizon(&self) -> usize {
        self.stages.len() - 1
    }

    /// Field to use at absolute stage `stage`; stages past the horizon reuse the last bulletin.
    pub fn field_for_stage(&self, stage: usize) -> &FlowField<T> {
        let k = stage.saturating_sub(self.base_stage).min(self.horizon());
        &self.stages[k]
    }
}

fn perturb<T: Scalar>(flow: Flow<T>, k: usize, noise: &ForecastNoise<T>, draw: [u64; 2]) -> Flow<T> {
    let kk = T::from_count(k);
    let u_speed = T::lit(2.0 * unit_f64(draw[0]) - 1.0);
    let u_dir = T::lit(2.0 * unit_f64(draw[1]) - 1.0);
    let factor = (T::one() + u_speed * kk * noise.eps_speed).max(T::lit(MIN_SPEED_FACTOR));
    Flow::new(flow.speed * factor, wrap_deg(flow.dir + u_dir * kk * noise.eps_dir_deg))
}

/// Builds the bulletin released at `stage`: the exact current field plus
/// `horizon` perturbed future fields.
pub fn make_forecast<T: Scalar>(
    seed: u64,
    stage: usize,
    horizon: usize,
    grid: &GridSpec<T>,
    bounds: &FlowBounds<T>,
    noise: &ForecastNoise<T>,
    delta_t: T,
) -> Result<ForecastSequence<T>> {
    let mut stages = Vec::with_capacity(horizon + 1);
    stages.push(generate_stage_fields(seed, stage, grid, bounds)?);
    for k in 1..=horizon {
        let mut field = generate_stage_fields(seed, stage + k, grid, bounds)?;
        let tag = |cell: usize, ch: u64| {
            mix(&[seed, channel::FORECAST, stage as u64, k as u64, cell as u64, ch])
        };
        for (idx, w) in field.wind.iter_mut().enumerate() {
            *w = perturb(*w, k, noise, [tag(idx, channel::WIND_SPEED), tag(idx, channel::WIND_DIR)]);
        }
        for (idx, c) in field.current.iter_mut().enumerate() {
            *c = perturb(
                *c,
                k,
                noise,
                [tag(idx, channel::CURRENT_SPEED), tag(idx, channel::CURRENT_DIR)],
            );
        }
        stages.push(field);
    }
    Ok(ForecastSequence {
        base_stage: stage,
        base_time: T::from_count(stage) * delta_t,
        delta_t,
        stages,
    })
}
