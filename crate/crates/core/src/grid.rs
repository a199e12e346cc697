//! Grid geometry.

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Grid cell index: `i` is the row (north to south), `j` the column (west to east).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Cell {
    pub i: usize,
    pub j: usize,
}

impl Cell {
    pub const fn new(i: usize, j: usize) -> Self {
        Self { i, j }
    }

    /// Applies a signed offset, returning `None` if the result leaves the grid.
    pub fn offset(self, di: i32, dj: i32, rows: usize, cols: usize) -> Option<Cell> {
        let i = self.i as i64 + di as i64;
        let j = self.j as i64 + dj as i64;
        (i >= 0 && j >= 0 && (i as usize) < rows && (j as usize) < cols)
            .then(|| Cell::new(i as usize, j as usize))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec<T> {
    pub rows: usize,
    pub cols: usize,
    /// Edge length of a square cell, meters.
    pub cell_size: T,
    /// Observation radius, meters.
    pub d_obs: T,
    /// Coverage raster resolution, meters.
    pub pixel_size: T,
}

impl<T: Scalar> GridSpec<T> {
    pub fn new(rows: usize, cols: usize, cell_size: T, d_obs: T, pixel_size: T) -> Result<Self> {
        let g = Self { rows, cols, cell_size, d_obs, pixel_size };
        g.validate()?;
        Ok(g)
    }

    /// 10x10 grid of 100 m cells, 72 m observation radius, 5 m pixels.
    pub fn standard() -> Self {
        Self {
            rows: 10,
            cols: 10,
            cell_size: T::lit(100.0),
            d_obs: T::lit(72.0),
            pixel_size: T::lit(5.0),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.rows == 0 || self.cols == 0 {
            return Err(Error::InvalidGrid("rows and cols must be at least 1".into()));
        }
        let pos = |v: T| v.is_finite() && v > T::zero();
        if !pos(self.cell_size) || !pos(self.d_obs) || !pos(self.pixel_size) {
            return Err(Error::InvalidGrid(
                "cell_size, d_obs and pixel_size must be positive".into(),
            ));
        }
        if self.pixel_size > self.cell_size {
            return Err(Error::InvalidGrid("pixel_size exceeds cell_size".into()));
        }
        let ratio = self.cell_size / self.pixel_size;
        if (ratio - ratio.round()).abs() > T::lit(1e-6) * ratio {
            return Err(Error::InvalidGrid(
                "cell_size must be an integer multiple of pixel_size".into(),
            ));
        }
        Ok(())
    }

    pub fn cell_count(&self) -> usize {
        self.rows * self.cols
    }

    pub fn contains(&self, cell: Cell) -> bool {
        cell.i < self.rows && cell.j < self.cols
    }

    pub fn index(&self, cell: Cell) -> usize {
        cell.i * self.cols + cell.j
    }

    pub fn cell_at(&self, index: usize) -> Cell {
        Cell::new(index / self.cols, index % self.cols)
    }

    pub fn cells(&self) -> impl Iterator<Item = Cell> + '_ {
        (0..self.rows).flat_map(move |i| (0..self.cols).map(move |j| Cell::new(i, j)))
    }

    /// Pixels along one cell edge.
    pub fn pixels_per_cell(&self) -> usize {
        (self.cell_size / self.pixel_size)
            .round()
            .to_usize()
            .expect("validated grid")
    }

    /// Cell center in meters, `(east, south)` measured from the north-west corner.
    pub fn cell_center(&self, cell: Cell) -> (T, T) {
        let half = T::lit(0.5);
        (
            (T::from_count(cell.j) + half) * self.cell_size,
            (T::from_count(cell.i) + half) * self.cell_size,
        )
    }

    pub fn map_center(&self) -> (T, T) {
        let half = T::lit(0.5);
        (
            T::from_count(self.cols) * self.cell_size * half,
            T::from_count(self.rows) * self.cell_size * half,
        )
    }
}
