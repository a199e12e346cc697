//! Connected components and compactness scores on pixel masks.
//!
//! Everything works on run-length rows: components are unions of
//! overlapping runs in adjacent rows (4-connectivity), hulls are built from
//! run endpoints, and perimeters are counted from packed words.

use crate::mask::{PixelMask, Run};
use crate::scalar::Scalar;

/// Upper clamp on compactness scores; rasterization can push ratios past 1.
pub const SCORE_CAP: f64 = 1.05;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ComponentStats {
    pub area_px: usize,
    pub touches_border: bool,
}

/// 4-connected components of one pixel value.
#[derive(Debug, Clone)]
pub struct Labeling {
    pub runs: Vec<Run>,
    /// Component id of every run; ids follow first appearance in raster order.
    pub run_component: Vec<u32>,
    pub components: Vec<ComponentStats>,
}

fn find(parent: &mut [u32], mut x: u32) -> u32 {
    while parent[x as usize] != x {
        let p = parent[x as usize];
        parent[x as usize] = parent[p as usize];
        x = p;
    }
    x
}

fn union(parent: &mut [u32], a: u32, b: u32) {
    let (ra, rb) = (find(parent, a), find(parent, b));
    if ra != rb {
        let (lo, hi) = if ra < rb { (ra, rb) } else { (rb, ra) };
        parent[hi as usize] = lo;
    }
}

/// Labels the 4-connected components formed by pixels equal to `value`.
pub fn label(mask: &PixelMask, value: bool) -> Labeling {
    let (w, h) = (mask.width(), mask.height());
    let mut runs = Vec::new();
    let mut row_start = Vec::with_capacity(h + 1);
    for y in 0..h {
        row_start.push(runs.len());
        mask.runs_in_row(y, value, &mut runs);
    }
    row_start.push(runs.len());

    let mut parent: Vec<u32> = (0..runs.len() as u32).collect();
    for y in 1..h {
        let (mut a, a_end) = (row_start[y - 1], row_start[y]);
        let (mut b, b_end) = (row_start[y], row_start[y + 1]);
        while a < a_end && b < b_end {
            let (ra, rb) = (runs[a], runs[b]);
            if ra.start < rb.end && rb.start < ra.end {
                union(&mut parent, a as u32, b as u32);
            }
            if ra.end <= rb.end {
                a += 1;
            } else {
                b += 1;
            }
        }
    }

    let mut remap = vec![u32::MAX; runs.len()];
    let mut run_component = Vec::with_capacity(runs.len());
    let mut components: Vec<ComponentStats> = Vec::new();
    for (k, run) in runs.iter().enumerate() {
        let root = find(&mut parent, k as u32) as usize;
        if remap[root] == u32::MAX {
            remap[root] = components.len() as u32;
            components.push(ComponentStats { area_px: 0, touches_border: false });
        }
        let id = remap[root];
        run_component.push(id);
        let c = &mut components[id as usize];
        c.area_px += run.len();
        c.touches_border |= run.start == 0
            || run.end as usize == w
            || run.row == 0
            || run.row as usize + 1 == h;
    }
    Labeling { runs, run_component, components }
}

impl Labeling {
    /// Largest component; ties go to the lowest id.
    pub fn largest(&self) -> Option<usize> {
        let mut best: Option<usize> = None;
        for (k, c) in self.components.iter().enumerate() {
            if best.is_none_or(|b| c.area_px > self.components[b].area_px) {
                best = Some(k);
            }
        }
        best
    }

    pub fn component_runs(&self, id: usize) -> impl Iterator<Item = &Run> + Clone + '_ {
        self.runs
            .iter()
            .zip(&self.run_component)
            .filter(move |(_, &c)| c as usize == id)
            .map(|(r, _)| r)
    }

    pub fn component_mask(&self, id: usize, width: usize, height: usize) -> PixelMask {
        let mut m = PixelMask::new(width, height);
        for r in self.component_runs(id) {
            m.set_span(r.row as usize, r.start as usize, r.end as usize);
        }
        m
    }

    /// Component areas in pixels, largest first.
    pub fn areas_desc(&self) -> Vec<usize> {
        let mut a: Vec<usize> = self.components.iter().map(|c| c.area_px).collect();
        a.sort_unstable_by(|x, y| y.cmp(x));
        a
    }
}

fn cross(o: (i64, i64), a: (i64, i64), b: (i64, i64)) -> i64 {
    (a.0 - o.0) * (b.1 - o.1) - (a.1 - o.1) * (b.0 - o.0)
}

/// Convex hull area of pixel centers, times 8, in doubled coordinates.
///
/// Pixel `(x, y)` has center `(2x + 1, 2y + 1) / 2`; working in doubled
/// integer coordinates keeps the monotone chain and shoelace exact.
fn hull_area_x8<'a>(runs: impl Iterator<Item = &'a Run>) -> i64 {
    let mut pts: Vec<(i64, i64)> = Vec::new();
    for r in runs {
        let y = 2 * r.row as i64 + 1;
        pts.push((2 * r.start as i64 + 1, y));
        if r.end - r.start > 1 {
            pts.push((2 * (r.end as i64 - 1) + 1, y));
        }
    }
    pts.sort_unstable();
    pts.dedup();
    if pts.len() < 3 {
        return 0;
    }
    let mut hull: Vec<(i64, i64)> = Vec::with_capacity(2 * pts.len());
    for &p in &pts {
        while hull.len() >= 2 && cross(hull[hull.len() - 2], hull[hull.len() - 1], p) <= 0 {
            hull.pop();
        }
        hull.push(p);
    }
    let lower = hull.len() + 1;
    for &p in pts.iter().rev().skip(1) {
        while hull.len() >= lower && cross(hull[hull.len() - 2], hull[hull.len() - 1], p) <= 0 {
            hull.pop();
        }
        hull.push(p);
    }
    hull.pop();
    let n = hull.len();
    if n < 3 {
        return 0;
    }
    // Shoelace gives twice the area in doubled units, i.e. 8x the pixel-unit area.
    let twice: i64 = (0..n)
        .map(|k| {
            let (a, b) = (hull[k], hull[(k + 1) % n]);
            a.0 * b.1 - b.0 * a.1
        })
        .sum();
    twice.abs()
}

/// Convex hull area (m²) of the pixel centers of a set of runs.
pub fn hull_area<'a, T: Scalar>(runs: impl Iterator<Item = &'a Run>, pixel_size: T) -> T {
    T::from_i64(hull_area_x8(runs)).unwrap() / T::lit(8.0) * pixel_size * pixel_size
}

fn convexity_from_runs<'a, T: Scalar>(runs: impl Iterator<Item = &'a Run> + Clone) -> T {
    let area_px: usize = runs.clone().map(Run::len).sum();
    let hull8 = hull_area_x8(runs);
    if area_px == 0 || hull8 == 0 {
        return T::one();
    }
    let hull_px = T::from_i64(hull8).unwrap() / T::lit(8.0);
    // One pixel of slack for the half-pixel ring the center hull misses.
    (T::from_count(area_px) / (hull_px + T::one())).min(T::lit(SCORE_CAP))
}

/// `A_real / A_hull` of a component, with degenerate hulls scoring 1.
pub fn convexity_score<T: Scalar>(component: &PixelMask) -> T {
    let mut runs = Vec::new();
    for y in 0..component.height() {
        component.runs_in_row(y, true, &mut runs);
    }
    convexity_from_runs(runs.iter())
}

/// Fills interior holes smaller than `a_thres` (m²); returns the filled mask.
pub fn fill_small_holes<T: Scalar>(component: &PixelMask, pixel_size: T, a_thres: T) -> PixelMask {
    let holes = label(component, false);
    let pixel_area = pixel_size * pixel_size;
    let mut filled = component.clone();
    for (k, c) in holes.components.iter().enumerate() {
        if !c.touches_border && T::from_count(c.area_px) * pixel_area < a_thres {
            for r in holes.component_runs(k) {
                filled.set_span(r.row as usize, r.start as usize, r.end as usize);
            }
        }
    }
    filled
}

/// Isoperimetric ratio `4πA / P²` after filling holes below `a_thres`.
pub fn shape_score<T: Scalar>(component: &PixelMask, pixel_size: T, a_thres: T) -> T {
    let filled = fill_small_holes(component, pixel_size, a_thres);
    let area = filled.count_ones();
    let edges = filled.perimeter_edges();
    if area == 0 || edges == 0 {
        return T::one();
    }
    let e = T::from_count(edges);
    (T::lit(4.0) * T::PI() * T::from_count(area) / (e * e)).min(T::lit(SCORE_CAP))
}

/// Compactness of the covered and uncovered regions of a coverage mask.
#[derive(Debug, Clone, PartialEq)]
pub struct MorphologyReport<T> {
    pub cov_convex: T,
    pub uncov_convex: T,
    pub cov_shape: T,
    pub uncov_shape: T,
    pub largest_cov_area: T,
    pub largest_uncov_area: T,
    /// Areas of all uncovered components, m², largest first.
    pub uncov_component_areas: Vec<T>,
}

impl<T: Scalar> MorphologyReport<T> {
    /// Product of the four compactness scores.
    pub fn regularity(&self) -> T {
        self.cov_convex * self.uncov_convex * self.cov_shape * self.uncov_shape
    }

    /// True if two or more uncovered components exceed `a_thres`.
    pub fn is_split(&self, a_thres: T) -> bool {
        self.uncov_component_areas.iter().filter(|&&a| a > a_thres).count() >= 2
    }
}

fn region_scores<T: Scalar>(lab: &Labeling, w: usize, h: usize, pixel_size: T, a_thres: T) -> (T, T, T) {
    match lab.largest() {
        None => (T::one(), T::one(), T::zero()),
        Some(id) => {
            let convex = convexity_from_runs(lab.component_runs(id));
            let mask = lab.component_mask(id, w, h);
            let shape = shape_score(&mask, pixel_size, a_thres);
            let area = T::from_count(lab.components[id].area_px) * pixel_size * pixel_size;
            (convex, shape, area)
        }
    }
}

/// Scores the largest covered and largest uncovered components. An empty
/// region scores 1 on both metrics.
pub fn morphology_report<T: Scalar>(covered: &PixelMask, pixel_size: T, a_thres: T) -> MorphologyReport<T> {
    let (w, h) = (covered.width(), covered.height());
    let cov = label(covered, true);
    let uncov = label(covered, false);
    let (cov_convex, cov_shape, largest_cov_area) = region_scores(&cov, w, h, pixel_size, a_thres);
    let (uncov_convex, uncov_shape, largest_uncov_area) = region_scores(&uncov, w, h, pixel_size, a_thres);
    let pixel_area = pixel_size * pixel_size;
    MorphologyReport {
        cov_convex,
        uncov_convex,
        cov_shape,
        uncov_shape,
        largest_cov_area,
        largest_uncov_area,
        uncov_component_areas: uncov.areas_desc().into_iter().map(|a| T::from_count(a) * pixel_area).collect(),
    }
}

/// True if the uncovered pixels of `covered` form two or more components
/// larger than `a_thres` (m²).
pub fn is_split_mask<T: Scalar>(covered: &PixelMask, pixel_size: T, a_thres: T) -> bool {
    let pixel_area = pixel_size * pixel_size;
    label(covered, false)
        .components
        .iter()
        .filter(|c| T::from_count(c.area_px) * pixel_area > a_thres)
        .count()
        >= 2
}
