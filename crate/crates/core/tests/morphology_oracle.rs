mod oracles;

use oracles::{random_blob, Bitmap};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use sailcover::morphology::{convexity_score, label, morphology_report, shape_score};

const TOL: f64 = 1e-9;

#[test]
fn convexity_and_shape_match_brute_force_on_random_blobs() {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    for case in 0..1000 {
        let blob = random_blob(&mut rng);
        let mask = blob.to_mask();
        let a_thres = [0.0, 12.0, 60.0, 3000.0][case % 4];

        let conv: f64 = convexity_score(&mask);
        let want = oracles::convexity(&blob.ones());
        assert!((conv - want).abs() <= TOL, "case {case}: convexity {conv} vs {want}");

        let shp: f64 = shape_score(&mask, 1.0, a_thres);
        let want = oracles::shape(&blob, 1.0, a_thres);
        assert!((shp - want).abs() <= TOL, "case {case}: shape {shp} vs {want}");
        assert!(conv <= 1.05 && shp <= 1.05);
    }
}

#[test]
fn report_matches_brute_force_on_largest_components() {
    let mut rng = ChaCha8Rng::seed_from_u64(77);
    for case in 0..300 {
        let blob = random_blob(&mut rng);
        let ps = [1.0, 5.0][case % 2];
        let a_thres = rng.gen_range(0.0..400.0) * ps * ps;
        let rep = morphology_report::<f64>(&blob.to_mask(), ps, a_thres);
        let (cc, cs) = oracles::region_scores(&blob, true, ps, a_thres);
        let (uc, us) = oracles::region_scores(&blob, false, ps, a_thres);
        for (got, want, what) in [(rep.cov_convex, cc, "cov convex"), (rep.cov_shape, cs, "cov shape"), (rep.uncov_convex, uc, "uncov convex"), (rep.uncov_shape, us, "uncov shape")] {
            assert!((got - want).abs() <= TOL, "case {case}: {what} {got} vs {want}");
        }
        assert_eq!(rep.is_split(a_thres), oracles::is_split(&blob, ps, a_thres), "case {case}");
        let mut areas: Vec<f64> = oracles::components(&blob, false).iter().map(|c| c.len() as f64 * ps * ps).collect();
        areas.sort_by(|a, b| b.total_cmp(a));
        assert_eq!(rep.uncov_component_areas, areas, "case {case}");
    }
}

#[test]
fn labeling_matches_flood_fill() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..300 {
        let blob = random_blob(&mut rng);
        for value in [true, false] {
            let lab = label(&blob.to_mask(), value);
            let comps = oracles::components(&blob, value);
            assert_eq!(lab.components.len(), comps.len());
            for (k, c) in comps.iter().enumerate() {
                assert_eq!(lab.components[k].area_px, c.len());
                let m = Bitmap::from_mask(&lab.component_mask(k, blob.w, blob.h));
                assert_eq!(m, Bitmap::from_pixels(blob.w, blob.h, c));
            }
        }
    }
}

#[test]
fn square_shape_is_quarter_pi_at_one_metre() {
    for n in [10usize, 37, 64] {
        let mut b = Bitmap::new(n + 6, n + 6);
        for y in 3..3 + n {
            for x in 3..3 + n {
                b.set(x, y, true);
            }
        }
        let s: f64 = shape_score(&b.to_mask(), 1.0, 3000.0);
        assert!((s - std::f64::consts::FRAC_PI_4).abs() <= 0.02, "n {n}: {s}");
    }
}

#[test]
fn l_shape_convexity_below_one() {
    let mut b = Bitmap::new(40, 40);
    for y in 0..40 {
        for x in 0..40 {
            if x < 10 || y >= 30 {
                b.set(x, y, true);
            }
        }
    }
    let c: f64 = convexity_score(&b.to_mask());
    assert!((c - oracles::convexity(&b.ones())).abs() <= TOL);
    assert!(c < 0.75, "{c}");
}
