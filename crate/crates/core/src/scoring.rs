//! Heuristic action score and staged rollout reward.

use crate::grid::{Cell, GridSpec};
use crate::kinematics::TraversalResult;
use crate::raster::CoverageRaster;
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScoreParams<T> {
    /// Penalty per extra visit of a pixel in `U`.
    pub alpha: T,
    /// Per-stage discount of the rollout reward.
    pub beta: T,
    /// Probability of a uniform pick in rollout action sampling.
    pub epsilon: T,
    /// Interval of the random regularity exponent used by rollout workers.
    pub p_range: (T, T),
    pub efficiency_pen_exponent: i32,
    pub position_distance_exponent: T,
}

impl<T: Scalar> Default for ScoreParams<T> {
    fn default() -> Self {
        Self {
            alpha: T::lit(0.2),
            beta: T::lit(0.2),
            epsilon: T::lit(0.3),
            p_range: (T::lit(0.25), T::lit(4.0)),
            efficiency_pen_exponent: 2,
            position_distance_exponent: T::lit(0.5),
        }
    }
}

impl<T: Scalar> ScoreParams<T> {
    pub fn validate(&self) -> crate::Result<()> {
        let unit = |v: T| v >= T::zero() && v <= T::one();
        if !unit(self.alpha) || !unit(self.epsilon) || !(self.beta > T::zero() && self.beta <= T::one()) {
            return Err(crate::Error::InvalidParameter(
                "alpha and epsilon must lie in [0, 1], beta in (0, 1]".into(),
            ));
        }
        if !(self.p_range.0 > T::zero() && self.p_range.0 <= self.p_range.1) {
            return Err(crate::Error::InvalidParameter("p_range must be a positive interval".into()));
        }
        Ok(())
    }
}

/// Per-cell distance to the map center and its normalized weight.
#[derive(Debug, Clone, PartialEq)]
pub struct PositionWeights<T> {
    pub cols: usize,
    pub d: Vec<T>,
    pub w: Vec<T>,
    distance_exponent: T,
    floor: T,
}

impl<T: Scalar> PositionWeights<T> {
    pub fn new(grid: &GridSpec<T>, distance_exponent: T) -> Self {
        let (cx, cy) = grid.map_center();
        let d: Vec<T> = grid
            .cells()
            .map(|c| {
                let (x, y) = grid.cell_center(c);
                ((x - cx) * (x - cx) + (y - cy) * (y - cy)).sqrt()
            })
            .collect();
        let total = d.iter().fold(T::zero(), |a, &b| a + b);
        let w: Vec<T> = if total > T::zero() {
            d.iter().map(|&v| v / total).collect()
        } else {
            vec![T::one() / T::from_count(d.len()); d.len()]
        };
        let raw = |k: usize| d[k].powf(distance_exponent) * w[k];
        let min_nonzero = (0..d.len()).map(raw).filter(|&v| v > T::zero()).fold(T::infinity(), T::min);
        let floor = if min_nonzero.is_finite() { min_nonzero * T::lit(0.1) } else { T::one() };
        Self { cols: grid.cols, d, w, distance_exponent, floor }
    }

    pub fn distance(&self, cell: Cell) -> T {
        self.d[cell.i * self.cols + cell.j]
    }

    pub fn weight(&self, cell: Cell) -> T {
        self.w[cell.i * self.cols + cell.j]
    }

    /// `d^e * w` at the end cell, floored so the exact center never annihilates a move.
    pub fn position(&self, cell: Cell) -> T {
        let k = cell.i * self.cols + cell.j;
        (self.d[k].powf(self.distance_exponent) * self.w[k]).max(self.floor)
    }
}

/// Factor breakdown of one heuristic evaluation.
#[derive(Debug, Clone, PartialEq)]
pub struct HeuristicScore<T> {
    /// Newly covered area, m².
    pub new_area: T,
    pub efficiency: T,
    /// Regularity of the post-stamp map, already raised to the exponent.
    pub regularity: T,
    pub position: T,
    pub value: T,
    /// Whether the post-stamp map has two large uncovered components.
    /// `None` when the stamp adds no area, since the covered set is unchanged.
    pub splits: Option<bool>,
}

/// `H(a) = efficiency * regularity^p * position` for a feasible traversal.
pub fn heuristic_score<T: Scalar>(
    traversal: &TraversalResult<T>,
    raster: &CoverageRaster<T>,
    weights: &PositionWeights<T>,
    a_thres: T,
    p: T,
) -> HeuristicScore<T> {
    let end = traversal.to.expect("feasible traversal has a destination");
    let position = weights.position(end);
    let new_px = raster.new_pixels_if_stamped(end);
    if new_px == 0 || !(traversal.total_time > T::zero()) {
        return HeuristicScore {
            new_area: T::zero(),
            efficiency: T::zero(),
            regularity: T::zero(),
            position,
            value: T::zero(),
            splits: None,
        };
    }
    let new_area = T::from_count(new_px) * raster.pixel_area();
    let efficiency = new_area / traversal.total_time;
    let after = raster.covered_mask_with(&[end]);
    let report = crate::morphology::morphology_report(&after, raster.grid().pixel_size, a_thres);
    let regularity = report.regularity().powf(p);
    HeuristicScore {
        new_area,
        efficiency,
        regularity,
        position,
        value: efficiency * regularity * position,
        splits: Some(report.is_split(a_thres)),
    }
}

/// Map state at the end of one simulated stage.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StageSnapshot<T> {
    pub regularity: T,
    /// Redundancy-aware coverage score `U` gained over the search root.
    pub u: T,
    /// Sailing time since the search root, seconds.
    pub elapsed: T,
}

/// One stage's term `regularity * (U / T)^e`; zero when no time elapsed or
/// the coverage score did not grow.
pub fn stage_score<T: Scalar>(s: &StageSnapshot<T>, params: &ScoreParams<T>) -> T {
    if !(s.elapsed > T::zero()) || !(s.u > T::zero()) {
        return T::zero();
    }
    s.regularity * (s.u / s.elapsed).powi(params.efficiency_pen_exponent)
}

/// Discounted sum of stage scores, `sum_k beta^(k-1) * stage_score_k`.
pub fn rollout_reward<T: Scalar>(snapshots: &[StageSnapshot<T>], params: &ScoreParams<T>) -> T {
    let mut discount = T::one();
    let mut total = T::zero();
    for s in snapshots {
        total = total + discount * stage_score(s, params);
        discount = discount * params.beta;
    }
    total
}
