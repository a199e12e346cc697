//! Brute-force reference implementations shared by the integration tests.
#![allow(dead_code)]

use std::collections::VecDeque;

use rand::Rng;
use sailcover::kinematics::ActionSpec;
use sailcover::{actual_speed, effective_speed, Cell, CoverageRaster, FlowField, GridSpec, PixelMask, PolarTable};

pub const SCORE_CAP: f64 = 1.05;

/// Plain boolean image, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct Bitmap {
    pub w: usize,
    pub h: usize,
    pub px: Vec<bool>,
}

impl Bitmap {
    pub fn new(w: usize, h: usize) -> Self {
        Self { w, h, px: vec![false; w * h] }
    }

    pub fn get(&self, x: usize, y: usize) -> bool {
        self.px[y * self.w + x]
    }

    pub fn set(&mut self, x: usize, y: usize, v: bool) {
        self.px[y * self.w + x] = v;
    }

    pub fn from_mask(m: &PixelMask) -> Self {
        let mut b = Self::new(m.width(), m.height());
        for y in 0..m.height() {
            for x in 0..m.width() {
                b.set(x, y, m.get(x, y));
            }
        }
        b
    }

    pub fn to_mask(&self) -> PixelMask {
        PixelMask::from_fn(self.w, self.h, |x, y| self.get(x, y))
    }

    pub fn from_pixels(w: usize, h: usize, pixels: &[(usize, usize)]) -> Self {
        let mut b = Self::new(w, h);
        for &(x, y) in pixels {
            b.set(x, y, true);
        }
        b
    }

    pub fn ones(&self) -> Vec<(usize, usize)> {
        (0..self.h).flat_map(|y| (0..self.w).map(move |x| (x, y))).filter(|&(x, y)| self.get(x, y)).collect()
    }
}

/// Union of random disks and rectangles minus a few random bites.
pub fn random_blob<R: Rng>(rng: &mut R) -> Bitmap {
    let (w, h) = (rng.gen_range(8..72), rng.gen_range(8..72));
    let mut b = Bitmap::new(w, h);
    let paint = |b: &mut Bitmap, rng: &mut R, value: bool, max_r: f64| {
        let (cx, cy) = (rng.gen_range(0.0..w as f64), rng.gen_range(0.0..h as f64));
        if rng.gen_bool(0.5) {
            let r = rng.gen_range(1.0..max_r);
            for y in 0..h {
                for x in 0..w {
                    let (dx, dy) = (x as f64 + 0.5 - cx, y as f64 + 0.5 - cy);
                    if dx * dx + dy * dy <= r * r {
                        b.set(x, y, value);
                    }
                }
            }
        } else {
            let (hw, hh) = (rng.gen_range(0.5..max_r), rng.gen_range(0.5..max_r));
            for y in 0..h {
                for x in 0..w {
                    if (x as f64 + 0.5 - cx).abs() <= hw && (y as f64 + 0.5 - cy).abs() <= hh {
                        b.set(x, y, value);
                    }
                }
            }
        }
    };
    for _ in 0..rng.gen_range(1..7) {
        paint(&mut b, rng, true, 0.4 * w.min(h) as f64 + 1.0);
    }
    for _ in 0..rng.gen_range(0..4) {
        paint(&mut b, rng, false, 0.15 * w.min(h) as f64 + 1.0);
    }
    b
}

/// 4-connected components of pixels equal to `value`, seeded in raster order.
pub fn components(b: &Bitmap, value: bool) -> Vec<Vec<(usize, usize)>> {
    let mut seen = vec![false; b.w * b.h];
    let mut out = Vec::new();
    for y in 0..b.h {
        for x in 0..b.w {
            if seen[y * b.w + x] || b.get(x, y) != value {
                continue;
            }
            let mut comp = Vec::new();
            let mut q = VecDeque::from([(x, y)]);
            seen[y * b.w + x] = true;
            while let Some((px, py)) = q.pop_front() {
                comp.push((px, py));
                let mut push = |nx: usize, ny: usize| {
                    if b.get(nx, ny) == value && !seen[ny * b.w + nx] {
                        seen[ny * b.w + nx] = true;
                        q.push_back((nx, ny));
                    }
                };
                if px > 0 {
                    push(px - 1, py);
                }
                if px + 1 < b.w {
                    push(px + 1, py);
                }
                if py > 0 {
                    push(px, py - 1);
                }
                if py + 1 < b.h {
                    push(px, py + 1);
                }
            }
            out.push(comp);
        }
    }
    out
}

/// Largest component, first in raster order on ties.
pub fn largest(comps: &[Vec<(usize, usize)>]) -> Option<&Vec<(usize, usize)>> {
    let mut best: Option<&Vec<(usize, usize)>> = None;
    for c in comps {
        if best.is_none_or(|b| c.len() > b.len()) {
            best = Some(c);
        }
    }
    best
}

fn cross(o: (i64, i64), a: (i64, i64), b: (i64, i64)) -> i64 {
    (a.0 - o.0) * (b.1 - o.1) - (a.1 - o.1) * (b.0 - o.0)
}

/// Gift-wrapping hull of every pixel center, area in pixel units.
pub fn hull_area_px(pixels: &[(usize, usize)]) -> f64 {
    let mut pts: Vec<(i64, i64)> = pixels.iter().map(|&(x, y)| (2 * x as i64 + 1, 2 * y as i64 + 1)).collect();
    pts.sort_unstable();
    pts.dedup();
    if pts.len() < 3 {
        return 0.0;
    }
    let start = pts[0];
    let mut hull = vec![start];
    let mut cur = start;
    loop {
        let mut next = if pts[0] == cur { pts[1] } else { pts[0] };
        for &p in &pts {
            if p == cur {
                continue;
            }
            let c = cross(cur, next, p);
            let d2 = |q: (i64, i64)| (q.0 - cur.0).pow(2) + (q.1 - cur.1).pow(2);
            if c < 0 || (c == 0 && d2(p) > d2(next)) {
                next = p;
            }
        }
        if next == start {
            break;
        }
        hull.push(next);
        cur = next;
        assert!(hull.len() <= pts.len(), "gift wrapping failed to close");
    }
    let n = hull.len();
    let twice: i64 = (0..n).map(|k| hull[k].0 * hull[(k + 1) % n].1 - hull[(k + 1) % n].0 * hull[k].1).sum();
    twice.abs() as f64 / 8.0
}

pub fn convexity(pixels: &[(usize, usize)]) -> f64 {
    let hull = hull_area_px(pixels);
    if pixels.is_empty() || hull == 0.0 {
        return 1.0;
    }
    (pixels.len() as f64 / (hull + 1.0)).min(SCORE_CAP)
}

/// Isoperimetric score after filling enclosed holes smaller than `a_thres` (m²).
pub fn shape(b: &Bitmap, pixel_size: f64, a_thres: f64) -> f64 {
    let mut filled = b.clone();
    for hole in components(b, false) {
        let touches = hole.iter().any(|&(x, y)| x == 0 || y == 0 || x + 1 == b.w || y + 1 == b.h);
        if !touches && hole.len() as f64 * pixel_size * pixel_size < a_thres {
            for (x, y) in hole {
                filled.set(x, y, true);
            }
        }
    }
    let mut area = 0usize;
    let mut edges = 0usize;
    for y in 0..b.h {
        for x in 0..b.w {
            if !filled.get(x, y) {
                continue;
            }
            area += 1;
            let out = |nx: i64, ny: i64| {
                nx < 0 || ny < 0 || nx >= b.w as i64 || ny >= b.h as i64 || !filled.get(nx as usize, ny as usize)
            };
            let (xi, yi) = (x as i64, y as i64);
            edges += [(xi - 1, yi), (xi + 1, yi), (xi, yi - 1), (xi, yi + 1)].iter().filter(|&&(a, c)| out(a, c)).count();
        }
    }
    if area == 0 || edges == 0 {
        return 1.0;
    }
    (4.0 * std::f64::consts::PI * area as f64 / (edges * edges) as f64).min(SCORE_CAP)
}

/// `(convexity, shape)` of the largest component of `value` pixels; `(1, 1)` when empty.
pub fn region_scores(b: &Bitmap, value: bool, pixel_size: f64, a_thres: f64) -> (f64, f64) {
    let comps = components(b, value);
    match largest(&comps) {
        None => (1.0, 1.0),
        Some(c) => (convexity(c), shape(&Bitmap::from_pixels(b.w, b.h, c), pixel_size, a_thres)),
    }
}

pub fn is_split(b: &Bitmap, pixel_size: f64, a_thres: f64) -> bool {
    components(b, false).iter().filter(|c| c.len() as f64 * pixel_size * pixel_size > a_thres).count() >= 2
}

/// `(U, redundancy %)` recomputed from the raw per-pixel visit counts.
pub fn redundancy(raster: &CoverageRaster<f64>, alpha: f64) -> (f64, f64) {
    let grid = raster.grid();
    let ppc = grid.pixels_per_cell();
    let n = (ppc * ppc) as f64;
    let mut per_cell = Vec::new();
    let (mut cov_total, mut exc_total) = (0u64, 0u64);
    for i in 0..grid.rows {
        for j in 0..grid.cols {
            let (mut cov, mut exc) = (0u32, 0u32);
            for y in i * ppc..(i + 1) * ppc {
                for x in j * ppc..(j + 1) * ppc {
                    let c = raster.count(x, y);
                    if c >= 1 {
                        cov += 1;
                        exc += c - 1;
                    }
                }
            }
            cov_total += cov as u64;
            exc_total += exc as u64;
            per_cell.push((cov as f64 - alpha * exc as f64) / n);
        }
    }
    let u = per_cell.iter().fold(0.0, |a, &b| a + b) / per_cell.len() as f64;
    let pct = if cov_total == 0 { 0.0 } else { 100.0 * alpha * exc_total as f64 / cov_total as f64 };
    (u, pct)
}

/// Travel time by marching along the track in steps of `step` metres and
/// using the speed of whichever cell contains each step midpoint. `None` if
/// any step is at or below `v_floor` or the move leaves the map.
pub fn integrate_time(
    grid: &GridSpec<f64>,
    field: &FlowField<f64>,
    polar: &PolarTable<f64>,
    from: Cell,
    action: ActionSpec,
    v_floor: f64,
    step: f64,
) -> Option<f64> {
    action.destination(from, grid.rows, grid.cols)?;
    let cs = grid.cell_size;
    let (x0, y0) = ((from.j as f64 + 0.5) * cs, (from.i as f64 + 0.5) * cs);
    let len = cs * ((action.di * action.di + action.dj * action.dj) as f64).sqrt();
    let (ux, uy) = (action.dj as f64 * cs / len, action.di as f64 * cs / len);
    let heading: f64 = action.track_direction();
    let mut speed_cache: std::collections::HashMap<(usize, usize), f64> = Default::default();
    let mut t = 0.0;
    let mut s = 0.0;
    while s < len {
        let ds = step.min(len - s);
        let mid = s + 0.5 * ds;
        let (x, y) = (x0 + ux * mid, y0 + uy * mid);
        let cell = Cell::new((y / cs).floor() as usize, (x / cs).floor() as usize);
        let v = *speed_cache.entry((cell.i, cell.j)).or_insert_with(|| {
            effective_speed(actual_speed(field.wind_at(cell), heading, polar), heading, field.current_at(cell))
        });
        if v <= v_floor {
            return None;
        }
        t += ds / v;
        s += ds;
    }
    Some(t)
}
