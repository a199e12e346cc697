//! Multiscale random flow fields.
//!
//! A scalar layer is `0.6 * coarse + 0.4 * fine`, where the coarse part is a
//! 2x2 uniform noise grid smoothed and bilinearly upsampled, the fine part is
//! full-resolution uniform noise smoothed the same way. The sum is rescaled so
//! its extremes land exactly on the requested bounds.

use std::io::{self, Write};

use rand::Rng;

use crate::error::{Error, Result};
use crate::grid::{Cell, GridSpec};
use crate::scalar::{wrap_deg, Scalar};
use crate::seed::{channel, rng_from};

const COARSE_WEIGHT: f64 = 0.6;
const FINE_WEIGHT: f64 = 0.4;
const SMOOTHING_SIGMA: f64 = 1.0;

/// Dense row-major grid of scalars.
#[derive(Debug, Clone, PartialEq)]
pub struct ScalarGrid<T> {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<T>,
}

impl<T: Scalar> ScalarGrid<T> {
    pub fn filled(rows: usize, cols: usize, value: T) -> Self {
        Self { rows, cols, data: vec![value; rows * cols] }
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> T {
        self.data[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: T) {
        self.data[i * self.cols + j] = v;
    }

    pub fn min_max(&self) -> (T, T) {
        self.data.iter().fold((T::infinity(), T::neg_infinity()), |(lo, hi), &v| {
            (lo.min(v), hi.max(v))
        })
    }

    fn uniform_noise(rows: usize, cols: usize, seed_parts: &[u64]) -> Self {
        let mut rng = rng_from(seed_parts);
        let data = (0..rows * cols).map(|_| T::lit(rng.gen::<f64>())).collect();
        Self { rows, cols, data }
    }
}

/// Half-sample symmetric reflection (`d c b a | a b c d | d c b a`).
fn reflect(idx: i64, n: usize) -> usize {
    let n = n as i64;
    let m = idx.rem_euclid(2 * n);
    (if m >= n { 2 * n - 1 - m } else { m }) as usize
}

fn gaussian_kernel<T: Scalar>(sigma: f64) -> Vec<T> {
    let radius = (3.0 * sigma).ceil() as i64;
    let raw: Vec<f64> = (-radius..=radius)
        .map(|x| (-(x * x) as f64 / (2.0 * sigma * sigma)).exp())
        .collect();
    let total: f64 = raw.iter().sum();
    raw.into_iter().map(|w| T::lit(w / total)).collect()
}

/// Separable Gaussian blur with reflected boundaries.
pub fn gaussian_smooth<T: Scalar>(grid: &ScalarGrid<T>, sigma: f64) -> ScalarGrid<T> {
    let kernel = gaussian_kernel::<T>(sigma);
    let r = (kernel.len() / 2) as i64;
    let (rows, cols) = (grid.rows, grid.cols);

    let mut horiz = ScalarGrid::filled(rows, cols, T::zero());
    for i in 0..rows {
        for j in 0..cols {
            let mut acc = T::zero();
            for (k, &w) in kernel.iter().enumerate() {
                let jj = reflect(j as i64 + k as i64 - r, cols);
                acc = acc + w * grid.get(i, jj);
            }
            horiz.set(i, j, acc);
        }
    }
    let mut out = ScalarGrid::filled(rows, cols, T::zero());
    for i in 0..rows {
        for j in 0..cols {
            let mut acc = T::zero();
            for (k, &w) in kernel.iter().enumerate() {
                let ii = reflect(i as i64 + k as i64 - r, rows);
                acc = acc + w * horiz.get(ii, j);
            }
            out.set(i, j, acc);
        }
    }
    out
}

/// Bilinear resampling with aligned corners.
pub fn bilinear_upsample<T: Scalar>(src: &ScalarGrid<T>, rows: usize, cols: usize) -> ScalarGrid<T> {
    let coord = |dst: usize, n_dst: usize, n_src: usize| -> (usize, usize, T) {
        if n_dst <= 1 || n_src <= 1 {
            return (0, 0, T::zero());
        }
        let x = T::from_count(dst) * T::from_count(n_src - 1) / T::from_count(n_dst - 1);
        let lo = x.floor().to_usize().unwrap_or(0).min(n_src - 1);
        let hi = (lo + 1).min(n_src - 1);
        (lo, hi, x - T::from_count(lo))
    };
    let mut out = ScalarGrid::filled(rows, cols, T::zero());
    for i in 0..rows {
        let (i0, i1, fy) = coord(i, rows, src.rows);
        for j in 0..cols {
            let (j0, j1, fx) = coord(j, cols, src.cols);
            let top = src.get(i0, j0) * (T::one() - fx) + src.get(i0, j1) * fx;
            let bot = src.get(i1, j0) * (T::one() - fx) + src.get(i1, j1) * fx;
            out.set(i, j, top * (T::one() - fy) + bot * fy);
        }
    }
    out
}

/// Multiscale noise field rescaled to `[lo, hi]`, deterministic in `seed`.
pub fn generate_scalar_field<T: Scalar>(
    seed: u64,
    rows: usize,
    cols: usize,
    lo: T,
    hi: T,
) -> Result<ScalarGrid<T>> {
    if rows < 2 || cols < 2 {
        return Err(Error::DegenerateGrid { rows, cols });
    }
    if !(lo < hi) {
        return Err(Error::EmptyRange { lo: lo.as_f64(), hi: hi.as_f64() });
    }
    let coarse = ScalarGrid::<T>::uniform_noise(2, 2, &[seed, channel::COARSE]);
    let coarse = bilinear_upsample(&gaussian_smooth(&coarse, SMOOTHING_SIGMA), rows, cols);
    let fine = ScalarGrid::<T>::uniform_noise(rows, cols, &[seed, channel::FINE]);
    let fine = gaussian_smooth(&fine, SMOOTHING_SIGMA);

    let (wc, wf) = (T::lit(COARSE_WEIGHT), T::lit(FINE_WEIGHT));
    let mut out = ScalarGrid::filled(rows, cols, T::zero());
    for (o, (c, f)) in out.data.iter_mut().zip(coarse.data.iter().zip(&fine.data)) {
        *o = wc * *c + wf * *f;
    }

    let (min, max) = out.min_max();
    if !(max > min) {
        return Err(Error::ConstantField);
    }
    let span = max - min;
    for v in &mut out.data {
        let s = (*v - min) / span;
        // Convex combination hits lo at s = 0 and hi at s = 1 exactly.
        *v = lo * (T::one() - s) + hi * s;
    }
    Ok(out)
}

/// Speed (m/s) and bearing (degrees) of one flow vector.
///
/// Wind bearings are the direction the wind blows FROM; current bearings
/// are the direction the water flows TO.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Flow<T> {
    pub speed: T,
    pub dir: T,
}

impl<T: Scalar> Flow<T> {
    pub fn new(speed: T, dir: T) -> Self {
        Self { speed, dir }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FlowBounds<T> {
    pub speed_min: T,
    pub speed_max: T,
    pub dir_min: T,
    pub dir_max: T,
}

impl<T: Scalar> Default for FlowBounds<T> {
    fn default() -> Self {
        Self {
            speed_min: T::lit(0.2),
            speed_max: T::lit(5.0),
            dir_min: T::zero(),
            dir_max: T::lit(359.0),
        }
    }
}

/// Wind and current for every cell during one stage.
#[derive(Debug, Clone, PartialEq)]
pub struct FlowField<T> {
    pub rows: usize,
    pub cols: usize,
    pub wind: Vec<Flow<T>>,
    pub current: Vec<Flow<T>>,
}

impl<T: Scalar> FlowField<T> {
    /// Same wind and current everywhere.
    pub fn uniform(rows: usize, cols: usize, wind: Flow<T>, current: Flow<T>) -> Self {
        Self {
            rows,
            cols,
            wind: vec![wind; rows * cols],
            current: vec![current; rows * cols],
        }
    }

    #[inline]
    pub fn wind_at(&self, cell: Cell) -> Flow<T> {
        self.wind[cell.i * self.cols + cell.j]
    }

    #[inline]
    pub fn current_at(&self, cell: Cell) -> Flow<T> {
        self.current[cell.i * self.cols + cell.j]
    }

    pub fn matches(&self, grid: &GridSpec<T>) -> bool {
        self.rows == grid.rows && self.cols == grid.cols
    }

    /// Writes one CSV row per cell (no header).
    pub fn write_csv_rows<W: Write>(&self, stage: usize, out: &mut W) -> io::Result<()> {
        for i in 0..self.rows {
            for j in 0..self.cols {
                let w = self.wind_at(Cell::new(i, j));
                let c = self.current_at(Cell::new(i, j));
                writeln!(
                    out,
                    "{stage},{i},{j},{:.4},{:.2},{:.4},{:.2}",
                    w.speed.as_f64(),
                    w.dir.as_f64(),
                    c.speed.as_f64(),
                    c.dir.as_f64()
                )?;
            }
        }
        Ok(())
    }
}

pub const FIELD_CSV_HEADER: &str = "stage,i,j,wind_speed,wind_dir,cur_speed,cur_dir";

/// True field for `stage`; each channel is sub-seeded from `(seed, stage, channel)`.
pub fn generate_stage_fields<T: Scalar>(
    seed: u64,
    stage: usize,
    grid: &GridSpec<T>,
    bounds: &FlowBounds<T>,
) -> Result<FlowField<T>> {
    let layer = |ch: u64, lo: T, hi: T| {
        generate_scalar_field(crate::seed::mix(&[seed, stage as u64, ch]), grid.rows, grid.cols, lo, hi)
    };
    let ws = layer(channel::WIND_SPEED, bounds.speed_min, bounds.speed_max)?;
    let wd = layer(channel::WIND_DIR, bounds.dir_min, bounds.dir_max)?;
    let cs = layer(channel::CURRENT_SPEED, bounds.speed_min, bounds.speed_max)?;
    let cd = layer(channel::CURRENT_DIR, bounds.dir_min, bounds.dir_max)?;
    let zip = |s: &ScalarGrid<T>, d: &ScalarGrid<T>| -> Vec<Flow<T>> {
        s.data
            .iter()
            .zip(&d.data)
            .map(|(&speed, &dir)| Flow::new(speed, wrap_deg(dir)))
            .collect()
    };
    Ok(FlowField {
        rows: grid.rows,
        cols: grid.cols,
        wind: zip(&ws, &wd),
        current: zip(&cs, &cd),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rescale_hits_bounds_exactly() {
        for seed in [7u64, 8, 9, 1234] {
            let g = generate_scalar_field(seed, 10, 10, 0.2f64, 5.0).unwrap();
            let (lo, hi) = g.min_max();
            assert_eq!(lo, 0.2);
            assert_eq!(hi, 5.0);
            assert!(g.data.iter().all(|&v| (0.2..=5.0).contains(&v)));
            assert_eq!(g.data.len(), 100);
        }
    }

    #[test]
    fn rejects_empty_range_and_tiny_grids() {
        assert!(matches!(
            generate_scalar_field(7, 10, 10, 1.0f64, 1.0),
            Err(Error::EmptyRange { .. })
        ));
        assert!(matches!(
            generate_scalar_field(7, 1, 10, 0.0f64, 1.0),
            Err(Error::DegenerateGrid { .. })
        ));
    }

    #[test]
    fn deterministic_in_seed() {
        let a = generate_scalar_field(7, 10, 10, 0.2f64, 5.0).unwrap();
        let b = generate_scalar_field(7, 10, 10, 0.2f64, 5.0).unwrap();
        assert_eq!(a, b);
        let c = generate_scalar_field(8, 10, 10, 0.2f64, 5.0).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn reflect_matches_symmetric_padding() {
        let idx: Vec<usize> = (-4..6).map(|k| reflect(k, 2)).collect();
        assert_eq!(idx, vec![0, 1, 1, 0, 0, 1, 1, 0, 0, 1]);
    }

    #[test]
    fn smoothing_preserves_constants() {
        let g = ScalarGrid::filled(4, 5, 3.0f64);
        let s = gaussian_smooth(&g, 1.0);
        assert!(s.data.iter().all(|v| (v - 3.0).abs() < 1e-12));
    }

    #[test]
    fn upsample_keeps_corners() {
        let src = ScalarGrid { rows: 2, cols: 2, data: vec![0.0f64, 1.0, 2.0, 3.0] };
        let up = bilinear_upsample(&src, 10, 10);
        assert_eq!(up.get(0, 0), 0.0);
        assert_eq!(up.get(0, 9), 1.0);
        assert_eq!(up.get(9, 0), 2.0);
        assert_eq!(up.get(9, 9), 3.0);
        // Midpoint row/col of a linear ramp.
        let mid = bilinear_upsample(&src, 3, 3);
        assert!((mid.get(1, 1) - 1.5).abs() < 1e-12);
    }

    #[test]
    fn stage_fields_are_sub_seeded() {
        let grid = GridSpec::<f64>::standard();
        let b = FlowBounds::default();
        let s0 = generate_stage_fields(42, 0, &grid, &b).unwrap();
        let s1 = generate_stage_fields(42, 1, &grid, &b).unwrap();
        assert_ne!(s0, s1);
        let s3a = generate_stage_fields(42, 3, &grid, &b).unwrap();
        let s3b = generate_stage_fields(42, 3, &grid, &b).unwrap();
        assert_eq!(s3a, s3b);
        for f in s0.wind.iter().chain(&s0.current) {
            assert!((0.2..=5.0).contains(&f.speed));
            assert!((0.0..360.0).contains(&f.dir));
        }
        assert_ne!(s0.wind, s0.current);
    }

    #[test]
    fn csv_rows_use_fixed_precision() {
        let f = FlowField::uniform(1, 2, Flow::new(1.23456f64, 10.0), Flow::new(0.5, 359.5));
        let mut buf = Vec::new();
        f.write_csv_rows(4, &mut buf).unwrap();
        let s = String::from_utf8(buf).unwrap();
        assert_eq!(s.lines().next().unwrap(), "4,0,0,1.2346,10.00,0.5000,359.50");
        assert_eq!(s.lines().count(), 2);
    }
}
