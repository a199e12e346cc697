//! Action set, sailing speed model and per-action traversal.

use crate::field::{Flow, FlowField};
use crate::grid::{Cell, GridSpec};
use crate::polar::PolarTable;
use crate::scalar::{angular_distance, wrap_deg, Scalar};

/// Speed penalty applied inside the no-go zone.
pub const NO_GO_PENALTY: f64 = 0.95;

/// Row/column offsets of the 16 actions, ordered clockwise by bearing from north.
pub const ACTION_OFFSETS: [(i32, i32); 16] = [
    (-1, 0),
    (-2, 1),
    (-1, 1),
    (-1, 2),
    (0, 1),
    (1, 2),
    (1, 1),
    (2, 1),
    (1, 0),
    (2, -1),
    (1, -1),
    (1, -2),
    (0, -1),
    (-1, -2),
    (-1, -1),
    (-2, -1),
];

/// One of the 16 center-to-center moves. Ids run 1..=16; id 0 is reserved
/// for "wait" in traces.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ActionSpec {
    pub id: u8,
    pub di: i32,
    pub dj: i32,
}

impl ActionSpec {
    pub fn all() -> [ActionSpec; 16] {
        let mut out = [ActionSpec { id: 0, di: 0, dj: 0 }; 16];
        for (k, &(di, dj)) in ACTION_OFFSETS.iter().enumerate() {
            out[k] = ActionSpec { id: k as u8 + 1, di, dj };
        }
        out
    }

    pub fn from_id(id: u8) -> Option<ActionSpec> {
        (1..=16).contains(&id).then(|| Self::all()[id as usize - 1])
    }

    /// The action whose offset is `(di, dj)`, if any.
    pub fn from_offset(di: i32, dj: i32) -> Option<ActionSpec> {
        Self::all().into_iter().find(|a| a.di == di && a.dj == dj)
    }

    pub fn track_length<T: Scalar>(&self, cell_size: T) -> T {
        cell_size * T::from_i32(self.di * self.di + self.dj * self.dj).unwrap().sqrt()
    }

    /// Compass bearing of the track, degrees clockwise from north.
    pub fn track_direction<T: Scalar>(&self) -> T {
        let east = T::from_i32(self.dj).unwrap();
        let north = T::from_i32(-self.di).unwrap();
        wrap_deg(east.atan2(north).to_degrees())
    }

    pub fn destination(&self, from: Cell, rows: usize, cols: usize) -> Option<Cell> {
        from.offset(self.di, self.dj, rows, cols)
    }
}

/// Boat speed through the water on a track, with the no-go penalty.
pub fn actual_speed<T: Scalar>(wind: Flow<T>, track_direction: T, polar: &PolarTable<T>) -> T {
    let twa = angular_distance(wind.dir, track_direction);
    if twa > polar.no_go_angle {
        polar.vpp(wind.speed, twa)
    } else {
        T::lit(NO_GO_PENALTY) * polar.vpp(wind.speed, polar.no_go_angle)
    }
}

/// Along-track speed over ground: boat speed plus the current's projection
/// on the track. Cross-track drift is assumed compensated by heading.
pub fn effective_speed<T: Scalar>(v_act: T, track_direction: T, current: Flow<T>) -> T {
    v_act + current.speed * (current.dir - track_direction).to_radians().cos()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrackSegment<T> {
    pub cell: Cell,
    pub length: T,
}

/// Splits the center-to-center track into the cells it crosses.
///
/// Crossing parameters are the exact intersections with grid lines; a track
/// through a grid corner yields a zero-length contact that is dropped, so the
/// crossing is attributed to the diagonal cell entered next. Returns `None`
/// when the destination leaves the grid.
pub fn decompose_track<T: Scalar>(grid: &GridSpec<T>, from: Cell, action: ActionSpec) -> Option<Vec<TrackSegment<T>>> {
    action.destination(from, grid.rows, grid.cols)?;
    let half = T::lit(0.5);
    let x0 = T::from_count(from.j) + half;
    let y0 = T::from_count(from.i) + half;
    let dx = T::from_i32(action.dj).unwrap();
    let dy = T::from_i32(action.di).unwrap();
    let total = action.track_length(grid.cell_size);

    let mut ts = vec![T::zero(), T::one()];
    let mut crossings = |start: T, delta: T| {
        if delta == T::zero() {
            return;
        }
        let (a, b) = if delta > T::zero() { (start, start + delta) } else { (start + delta, start) };
        let mut k = a.ceil();
        while k < b {
            let t = (k - start) / delta;
            if t > T::zero() && t < T::one() {
                ts.push(t);
            }
            k = k + T::one();
        }
    };
    crossings(x0, dx);
    crossings(y0, dy);
    ts.sort_by(|a, b| a.partial_cmp(b).unwrap());

    let eps = T::lit(1e-12);
    let mut out = Vec::with_capacity(ts.len());
    for w in ts.windows(2) {
        let (ta, tb) = (w[0], w[1]);
        if tb - ta <= eps {
            continue;
        }
        let tm = (ta + tb) * half;
        let col = (x0 + dx * tm).floor().to_usize().expect("inside grid");
        let row = (y0 + dy * tm).floor().to_usize().expect("inside grid");
        out.push(TrackSegment { cell: Cell::new(row, col), length: (tb - ta) * total });
    }
    Some(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Infeasibility {
    OffMap,
    /// A segment's effective speed is at or below the floor.
    TooSlow,
    /// Execution would exceed the time budget.
    OverBudget,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SegmentTraversal<T> {
    pub cell: Cell,
    pub length: T,
    pub effective_speed: T,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TraversalResult<T> {
    pub action: ActionSpec,
    pub from: Cell,
    pub to: Option<Cell>,
    pub feasible: bool,
    pub infeasibility: Option<Infeasibility>,
    pub total_time: T,
    pub segments: Vec<SegmentTraversal<T>>,
    pub distance: T,
}

/// Tunables of the traversal model.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KinematicsParams<T> {
    /// Segments at or below this effective speed make an action infeasible, m/s.
    pub v_floor: T,
}

impl<T: Scalar> Default for KinematicsParams<T> {
    fn default() -> Self {
        Self { v_floor: T::lit(0.05) }
    }
}

/// Times one action under a frozen field.
pub fn evaluate_action<T: Scalar>(
    grid: &GridSpec<T>,
    from: Cell,
    field: &FlowField<T>,
    action: ActionSpec,
    polar: &PolarTable<T>,
    params: &KinematicsParams<T>,
    time_budget: T,
) -> TraversalResult<T> {
    let mut res = TraversalResult {
        action,
        from,
        to: action.destination(from, grid.rows, grid.cols),
        feasible: false,
        infeasibility: None,
        total_time: T::zero(),
        segments: Vec::new(),
        distance: T::zero(),
    };
    let Some(track) = decompose_track(grid, from, action) else {
        res.infeasibility = Some(Infeasibility::OffMap);
        return res;
    };
    let heading = action.track_direction::<T>();
    let mut total = T::zero();
    for seg in track {
        let v_act = actual_speed(field.wind_at(seg.cell), heading, polar);
        let v_eff = effective_speed(v_act, heading, field.current_at(seg.cell));
        res.segments.push(SegmentTraversal { cell: seg.cell, length: seg.length, effective_speed: v_eff });
        if v_eff <= params.v_floor {
            res.infeasibility = Some(Infeasibility::TooSlow);
            return res;
        }
        total = total + seg.length / v_eff;
    }
    res.total_time = total;
    res.distance = action.track_length(grid.cell_size);
    if total > time_budget {
        res.infeasibility = Some(Infeasibility::OverBudget);
        return res;
    }
    res.feasible = true;
    res
}
