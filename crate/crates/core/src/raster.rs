//! Pixel-level coverage bookkeeping.

use std::io::{self, Write};
use std::sync::Arc;

use crate::grid::{Cell, GridSpec};
use crate::mask::PixelMask;
use crate::morphology::{is_split_mask, morphology_report, MorphologyReport};
use crate::scalar::Scalar;

/// Pixel offsets of the observation disk, relative to a cell's top-left pixel.
#[derive(Debug)]
struct Stencil {
    d_obs_bits: u64,
    offsets: Vec<(i32, i32)>,
}

impl Stencil {
    fn build(ppc: usize, d_obs_px: f64) -> Self {
        let reach = d_obs_px.ceil() as i32 + 1;
        let ppc_i = ppc as i32;
        // Distances in half-pixel units keep the membership test exact on the lattice.
        let r2 = (2.0 * d_obs_px) * (2.0 * d_obs_px);
        let mut offsets = Vec::new();
        for dy in -reach..ppc_i + reach {
            for dx in -reach..ppc_i + reach {
                let ex = (2 * dx + 1 - ppc_i) as f64;
                let ey = (2 * dy + 1 - ppc_i) as f64;
                if ex * ex + ey * ey <= r2 {
                    offsets.push((dy, dx));
                }
            }
        }
        Self { d_obs_bits: d_obs_px.to_bits(), offsets }
    }
}

/// Visit counts for every pixel of the map plus per-cell aggregates.
#[derive(Debug, Clone)]
pub struct CoverageRaster<T> {
    grid: GridSpec<T>,
    ppc: usize,
    width: usize,
    height: usize,
    counts: Vec<u32>,
    covered: PixelMask,
    covered_total: usize,
    /// Per cell: pixels with count >= 1.
    cell_covered: Vec<u32>,
    /// Per cell: sum over pixels of `max(count - 1, 0)`.
    cell_excess: Vec<u32>,
    visited: Vec<bool>,
    stencil: Arc<Stencil>,
}

/// Redundancy-aware coverage score and the derived redundancy percentage.
#[derive(Debug, Clone, PartialEq)]
pub struct RedundancyScore<T> {
    /// Map-level score `U`, the mean of `per_cell`.
    pub u: T,
    pub per_cell: Vec<T>,
    /// Penalty mass over covered mass, percent.
    pub redundancy_pct: T,
}

impl<T: Scalar> CoverageRaster<T> {
    pub fn new(grid: GridSpec<T>) -> Self {
        let ppc = grid.pixels_per_cell();
        let (width, height) = (grid.cols * ppc, grid.rows * ppc);
        let stencil = Arc::new(Stencil::build(ppc, (grid.d_obs / grid.pixel_size).as_f64()));
        Self {
            grid,
            ppc,
            width,
            height,
            counts: vec![0; width * height],
            covered: PixelMask::new(width, height),
            covered_total: 0,
            cell_covered: vec![0; grid.cell_count()],
            cell_excess: vec![0; grid.cell_count()],
            visited: vec![false; grid.cell_count()],
            stencil,
        }
    }

    pub fn grid(&self) -> &GridSpec<T> {
        &self.grid
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn pixel_area(&self) -> T {
        self.grid.pixel_size * self.grid.pixel_size
    }

    pub fn count(&self, x: usize, y: usize) -> u32 {
        self.counts[y * self.width + x]
    }

    pub fn counts(&self) -> &[u32] {
        &self.counts
    }

    pub fn covered_mask(&self) -> &PixelMask {
        &self.covered
    }

    pub fn covered_pixels(&self) -> usize {
        self.covered_total
    }

    pub fn total_pixels(&self) -> usize {
        self.width * self.height
    }

    pub fn is_visited(&self, cell: Cell) -> bool {
        self.visited[self.grid.index(cell)]
    }

    pub fn visited_count(&self) -> usize {
        self.visited.iter().filter(|&&v| v).count()
    }

    /// Cell that owns pixel `(x, y)`.
    pub fn cell_of_pixel(&self, x: usize, y: usize) -> Cell {
        Cell::new(y / self.ppc, x / self.ppc)
    }

    fn stencil_for(&self, d_obs: T) -> Arc<Stencil> {
        let d_px = (d_obs / self.grid.pixel_size).as_f64();
        if d_px.to_bits() == self.stencil.d_obs_bits {
            self.stencil.clone()
        } else {
            Arc::new(Stencil::build(self.ppc, d_px))
        }
    }

    /// Pixels of the observation disk around `cell`, clipped to the map.
    fn disk<'a>(&'a self, cell: Cell, stencil: &'a Stencil) -> impl Iterator<Item = (usize, usize)> + 'a {
        let ox = (cell.j * self.ppc) as i64;
        let oy = (cell.i * self.ppc) as i64;
        let (w, h) = (self.width as i64, self.height as i64);
        stencil
            .offsets
            .iter()
            .map(move |&(dy, dx)| (ox + dx as i64, oy + dy as i64))
            .filter(move |&(x, y)| x >= 0 && y >= 0 && x < w && y < h)
            .map(|(x, y)| (x as usize, y as usize))
    }

    /// Increments every pixel whose center lies within `d_obs` of the cell
    /// center and marks the cell visited.
    pub fn stamp_visit(&mut self, cell: Cell, d_obs: T) {
        let stencil = self.stencil_for(d_obs);
        let ox = (cell.j * self.ppc) as i64;
        let oy = (cell.i * self.ppc) as i64;
        let (w, h) = (self.width as i64, self.height as i64);
        for &(dy, dx) in &stencil.offsets {
            let (x, y) = (ox + dx as i64, oy + dy as i64);
            if x < 0 || y < 0 || x >= w || y >= h {
                continue;
            }
            let (x, y) = (x as usize, y as usize);
            let owner = (y / self.ppc) * self.grid.cols + x / self.ppc;
            let c = &mut self.counts[y * self.width + x];
            if *c == 0 {
                self.covered.set(x, y);
                self.covered_total += 1;
                self.cell_covered[owner] += 1;
            } else {
                self.cell_excess[owner] += 1;
            }
            *c += 1;
        }
        let idx = self.grid.index(cell);
        self.visited[idx] = true;
    }

    /// Stamps with the grid's own observation radius.
    pub fn stamp(&mut self, cell: Cell) {
        self.stamp_visit(cell, self.grid.d_obs);
    }

    /// Cells that still own at least one uncovered pixel.
    pub fn cells_with_gaps(&self) -> impl Iterator<Item = Cell> + '_ {
        let full = (self.ppc * self.ppc) as u32;
        self.cell_covered
            .iter()
            .enumerate()
            .filter(move |&(_, &c)| c < full)
            .map(|(k, _)| self.grid.cell_at(k))
    }

    /// Pixels a stamp at `cell` would cover for the first time.
    pub fn new_pixels_if_stamped(&self, cell: Cell) -> usize {
        self.disk(cell, &self.stencil).filter(|&(x, y)| !self.covered.get(x, y)).count()
    }

    /// Covered mask after hypothetically stamping `cells`.
    pub fn covered_mask_with(&self, cells: &[Cell]) -> PixelMask {
        let mut m = self.covered.clone();
        for &c in cells {
            for (x, y) in self.disk(c, &self.stencil) {
                m.set(x, y);
            }
        }
        m
    }

    pub fn coverage_fraction(&self) -> T {
        T::from_count(self.covered_total) / T::from_count(self.total_pixels())
    }

    /// Redundancy-aware score with penalty weight `alpha`.
    pub fn redundancy_score(&self, alpha: T) -> RedundancyScore<T> {
        let n = T::from_count(self.ppc * self.ppc);
        let per_cell: Vec<T> = self
            .cell_covered
            .iter()
            .zip(&self.cell_excess)
            .map(|(&cov, &exc)| (T::from_u32(cov).unwrap() - alpha * T::from_u32(exc).unwrap()) / n)
            .collect();
        let u = per_cell.iter().fold(T::zero(), |a, &b| a + b) / T::from_count(per_cell.len());
        let excess: u64 = self.cell_excess.iter().map(|&e| e as u64).sum();
        let redundancy_pct = if self.covered_total == 0 {
            T::zero()
        } else {
            T::lit(100.0) * alpha * T::from_u64(excess).unwrap() / T::from_count(self.covered_total)
        };
        RedundancyScore { u, per_cell, redundancy_pct }
    }

    pub fn morphology(&self, a_thres: T) -> MorphologyReport<T> {
        morphology_report(&self.covered, self.grid.pixel_size, a_thres)
    }

    /// True iff stamping `cells` leaves two or more uncovered components above `a_thres`.
    pub fn would_split_uncovered(&self, cells: &[Cell], a_thres: T) -> bool {
        is_split_mask(&self.covered_mask_with(cells), self.grid.pixel_size, a_thres)
    }

    /// Plain PGM (`P2`) dump of the visit counts.
    pub fn write_pgm<W: Write>(&self, mut out: W) -> io::Result<()> {
        let max = self.counts.iter().copied().max().unwrap_or(0).max(1);
        writeln!(out, "P2")?;
        writeln!(out, "{} {}", self.width, self.height)?;
        writeln!(out, "{max}")?;
        for row in self.counts.chunks(self.width) {
            let line: Vec<String> = row.iter().map(|c| c.to_string()).collect();
            writeln!(out, "{}", line.join(" "))?;
        }
        Ok(())
    }
}
