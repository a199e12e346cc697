//! Mission clock, vessel position and the true-field cache.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::field::{generate_stage_fields, FlowBounds, FlowField};
use crate::grid::{Cell, GridSpec};
use crate::scalar::Scalar;
use crate::seed::mix;

/// Ground-truth world state for one mission.
///
/// Fields are frozen within a stage of length `delta_t`. The cached field is
/// immutable and shared between clones, so cloning is cheap and clones never
/// observe each other's mutations.
#[derive(Debug, Clone)]
pub struct EnvState<T> {
    pub grid: GridSpec<T>,
    pub bounds: FlowBounds<T>,
    pub delta_t: T,
    pub seed: u64,
    t: T,
    stage_index: usize,
    vessel: Cell,
    cache: Option<(usize, Arc<FlowField<T>>)>,
}

impl<T: Scalar> EnvState<T> {
    pub fn new(grid: GridSpec<T>, bounds: FlowBounds<T>, delta_t: T, seed: u64, start: Cell) -> Result<Self> {
        grid.validate()?;
        if !grid.contains(start) {
            return Err(Error::CellOutOfBounds(start.i as i64, start.j as i64));
        }
        if !(delta_t > T::zero()) {
            return Err(Error::InvalidParameter("delta_t must be positive".into()));
        }
        Ok(Self { grid, bounds, delta_t, seed, t: T::zero(), stage_index: 0, vessel: start, cache: None })
    }

    pub fn t(&self) -> T {
        self.t
    }

    pub fn stage_index(&self) -> usize {
        self.stage_index
    }

    pub fn vessel(&self) -> Cell {
        self.vessel
    }

    pub fn set_vessel(&mut self, cell: Cell) -> Result<()> {
        if !self.grid.contains(cell) {
            return Err(Error::CellOutOfBounds(cell.i as i64, cell.j as i64));
        }
        self.vessel = cell;
        Ok(())
    }

    pub fn stage_of(&self, t: T) -> usize {
        (t / self.delta_t).floor().to_usize().unwrap_or(0)
    }

    /// End of the stage that contains `t`.
    pub fn stage_end(&self, t: T) -> T {
        T::from_count(self.stage_of(t) + 1) * self.delta_t
    }

    /// Advances the clock; the stage index follows `floor(t / delta_t)`.
    pub fn advance_clock(&mut self, dt: T) {
        debug_assert!(dt >= T::zero());
        self.t = self.t + dt;
        self.stage_index = self.stage_of(self.t);
    }

    /// Moves the vessel and clock together after an executed action.
    pub fn apply_move(&mut self, to: Cell, dt: T) {
        debug_assert!(self.grid.contains(to));
        self.vessel = to;
        self.advance_clock(dt);
    }

    /// Refreshes the true-field cache for `stage`; the clock is not moved.
    pub fn advance_to_stage(&mut self, stage: usize) -> Result<()> {
        if stage < self.stage_index {
            return Err(Error::BackwardStage { current: self.stage_index, requested: stage });
        }
        let clock = self.stage_of(self.t);
        if stage > clock {
            return Err(Error::StageAheadOfClock { clock, requested: stage });
        }
        self.stage_index = stage;
        if self.cache.as_ref().map(|(s, _)| *s) != Some(stage) {
            let field = generate_stage_fields(self.seed, stage, &self.grid, &self.bounds)?;
            self.cache = Some((stage, Arc::new(field)));
        }
        Ok(())
    }

    /// True field of the current stage, generating it on first use.
    pub fn current_field(&mut self) -> Result<Arc<FlowField<T>>> {
        self.advance_to_stage(self.stage_index)?;
        Ok(self.cache.as_ref().expect("cache filled").1.clone())
    }

    /// Cached field without regenerating; `None` if the cache is stale.
    pub fn cached_field(&self) -> Option<&Arc<FlowField<T>>> {
        self.cache.as_ref().filter(|(s, _)| *s == self.stage_index).map(|(_, f)| f)
    }

    /// Stable fingerprint of the mutable state.
    pub fn checksum(&self) -> u64 {
        mix(&[
            self.seed,
            self.t.as_f64().to_bits(),
            self.stage_index as u64,
            self.vessel.i as u64,
            self.vessel.j as u64,
        ])
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn env() -> EnvState<f64> {
        EnvState::new(GridSpec::standard(), FlowBounds::default(), 300.0, 42, Cell::new(0, 0)).unwrap()
    }

    #[test]
    fn advance_to_current_stage_is_identity() {
        let mut e = env();
        e.advance_to_stage(0).unwrap();
        assert_eq!(e.stage_index(), 0);
        assert_eq!(e.t(), 0.0);
    }

    #[test]
    fn clock_drives_stage_index() {
        let mut e = env();
        e.advance_clock(299.0);
        assert_eq!(e.stage_index(), 0);
        e.advance_clock(1.0);
        assert_eq!(e.stage_index(), 1);
        e.advance_clock(1234.5);
        assert_eq!(e.stage_index(), (1534.5f64 / 300.0).floor() as usize);
    }

    #[test]
    fn stage_cache_is_transparent() {
        let mut e = env();
        e.advance_clock(5.0 * 300.0 + 1.0);
        e.advance_to_stage(5).unwrap();
        let f = e.current_field().unwrap();
        let direct = generate_stage_fields(42, 5, &GridSpec::standard(), &FlowBounds::default()).unwrap();
        assert_eq!(*f, direct);
        assert!(e.cached_field().is_some());
    }

    #[test]
    fn rejects_backward_and_future_stages() {
        let mut e = env();
        e.advance_clock(700.0);
        assert!(matches!(e.advance_to_stage(1), Err(Error::BackwardStage { .. })));
        assert!(matches!(e.advance_to_stage(3), Err(Error::StageAheadOfClock { .. })));
        e.advance_to_stage(2).unwrap();
    }

    #[test]
    fn clones_are_independent() {
        let e = env();
        let mut c = e.clone();
        c.set_vessel(Cell::new(3, 4)).unwrap();
        c.advance_clock(10.0);
        assert_eq!(e.vessel(), Cell::new(0, 0));
        assert_eq!(e.t(), 0.0);
        let cc = c.clone();
        assert_eq!(cc.checksum(), c.checksum());
        assert_eq!(cc.vessel(), c.vessel());
    }
}
