//! Region similarity (mask IoU) and contour accuracy (boundary F-measure),
//! with optional solid-angle weighting.

use super::sphere::SphericalWeights;
use crate::error::{Error, Result};
use crate::geom::ErpSize;
use crate::mask::Mask;

fn check(gt: &Mask, tr: &Mask, weights: Option<&SphericalWeights>) -> Result<()> {
    gt.check_dims(tr)?;
    if let Some(w) = weights {
        let s = w.size();
        if (s.width(), s.height()) != gt.dims() {
            return Err(Error::DimensionMismatch {
                expected: (s.width(), s.height()),
                found: gt.dims(),
            });
        }
    }
    Ok(())
}

#[inline]
fn row_weight(weights: Option<&SphericalWeights>, j: usize) -> f64 {
    weights.map_or(1.0, |w| w.row(j))
}

/// IoU of two masks; both empty gives 1, exactly one empty gives 0.
pub fn region_similarity(gt: &Mask, tr: &Mask, weights: Option<&SphericalWeights>) -> Result<f64> {
    check(gt, tr, weights)?;
    let w = gt.width();
    let (mut inter, mut union) = (0.0, 0.0);
    for (j, (rg, rt)) in gt
        .as_slice()
        .chunks_exact(w)
        .zip(tr.as_slice().chunks_exact(w))
        .enumerate()
    {
        let (mut i, mut u) = (0usize, 0usize);
        for (a, b) in rg.iter().zip(rt) {
            i += (*a && *b) as usize;
            u += (*a || *b) as usize;
        }
        let rw = row_weight(weights, j);
        inter += i as f64 * rw;
        union += u as f64 * rw;
    }
    if union == 0.0 {
        return Ok(1.0);
    }
    Ok(inter / union)
}

/// `ceil(0.008 * diagonal)` pixels.
pub fn default_contour_tolerance(size: ErpSize) -> usize {
    (0.008 * size.w().hypot(size.h())).ceil() as usize
}

/// Boundary F-measure. Contours are wrap-aware 8-connected boundary pixels;
/// a contour pixel counts as matched when a contour pixel of the other mask
/// lies within `tol` pixels (disc, wrap-aware).
pub fn contour_accuracy(gt: &Mask, tr: &Mask, weights: Option<&SphericalWeights>, tol: usize) -> Result<f64> {
    check(gt, tr, weights)?;
    let cg = gt.boundary(true);
    let ct = tr.boundary(true);
    match (cg.is_empty(), ct.is_empty()) {
        (true, true) => return Ok(1.0),
        (true, false) | (false, true) => return Ok(0.0),
        _ => {}
    }
    let near_g = cg.dilate(tol, true);
    let near_t = ct.dilate(tol, true);
    let weigh = |c: &Mask, near: &Mask| -> (f64, f64) {
        let (mut hit, mut all) = (0.0, 0.0);
        for (i, j) in c.iter_set() {
            let rw = row_weight(weights, j);
            all += rw;
            if near.get(i, j) {
                hit += rw;
            }
        }
        (hit, all)
    };
    let (tp_t, n_t) = weigh(&ct, &near_g);
    let (tp_g, n_g) = weigh(&cg, &near_t);
    let precision = tp_t / n_t;
    let recall = tp_g / n_g;
    if precision + recall == 0.0 {
        return Ok(0.0);
    }
    Ok(2.0 * precision * recall / (precision + recall))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geom::LonLat;
    use crate::synth::{cap_mask, CapSpec};

    fn rect(w: usize, h: usize, x0: usize, y0: usize, sx: usize, sy: usize) -> Mask {
        Mask::from_fn(w, h, |i, j| (x0..x0 + sx).contains(&i) && (y0..y0 + sy).contains(&j))
    }

    #[test]
    fn similarity_examples() {
        let size = ErpSize::new(200, 100).unwrap();
        let sw = SphericalWeights::new(size);
        let a = rect(200, 100, 10, 10, 30, 20);
        assert_eq!(region_similarity(&a, &a, None).unwrap(), 1.0);
        assert_eq!(region_similarity(&a, &a, Some(&sw)).unwrap(), 1.0);
        let b = rect(200, 100, 100, 60, 30, 20);
        assert_eq!(region_similarity(&a, &b, None).unwrap(), 0.0);
        let e = Mask::new(200, 100);
        assert_eq!(region_similarity(&e, &e, None).unwrap(), 1.0);
        assert_eq!(region_similarity(&a, &e, Some(&sw)).unwrap(), 0.0);
        assert!(region_similarity(&a, &Mask::new(20, 10), None).is_err());
    }

    #[test]
    fn weighted_similarity_discounts_polar_area() {
        let size = ErpSize::new(1920, 960).unwrap();
        let sw = SphericalWeights::new(size);
        let rho = 20f64.to_radians();
        let pole = cap_mask(
            &CapSpec::new(LonLat::from_degrees(0.0, 90.0).unwrap(), rho).unwrap(),
            size,
        );
        let eq = cap_mask(
            &CapSpec::new(LonLat::from_degrees(0.0, 0.0).unwrap(), rho).unwrap(),
            size,
        );
        let gt = pole.union(&eq).unwrap();
        let j = region_similarity(&gt, &eq, None).unwrap();
        let js = region_similarity(&gt, &eq, Some(&sw)).unwrap();
        // brute-force weighted count over the union
        let (mut wi, mut wu) = (0.0, 0.0);
        for (i, jj) in gt.iter_set() {
            wu += sw.row(jj);
            if eq.get(i, jj) {
                wi += sw.row(jj);
            }
        }
        assert!((js - wi / wu).abs() < 1e-12);
        assert!(js > j, "J_sphere {js} <= J {j}");
    }

    #[test]
    fn single_row_masks_weights_cancel() {
        let size = ErpSize::new(200, 100).unwrap();
        let sw = SphericalWeights::new(size);
        let a = Mask::from_fn(200, 100, |i, j| j == 7 && (10..60).contains(&i));
        let b = Mask::from_fn(200, 100, |i, j| j == 7 && (40..90).contains(&i));
        let j = region_similarity(&a, &b, None).unwrap();
        let js = region_similarity(&a, &b, Some(&sw)).unwrap();
        assert!((j - js).abs() < 1e-15);
    }

    #[test]
    fn contour_examples() {
        let size = ErpSize::new(400, 200).unwrap();
        let sw = SphericalWeights::new(size);
        let tol = 2;
        let a = rect(400, 200, 100, 50, 120, 80);
        assert_eq!(contour_accuracy(&a, &a, None, tol).unwrap(), 1.0);
        assert_eq!(contour_accuracy(&a, &a, Some(&sw), tol).unwrap(), 1.0);
        let half = rect(400, 200, 101, 51, 120, 80);
        assert_eq!(contour_accuracy(&a, &half, None, tol).unwrap(), 1.0);
        assert_eq!(contour_accuracy(&a, &half, Some(&sw), tol).unwrap(), 1.0);
        let far = rect(400, 200, 106, 56, 120, 80);
        assert!(contour_accuracy(&a, &far, None, tol).unwrap() < 0.1);
        let small = rect(400, 200, 10, 10, 3, 3);
        let small_far = rect(400, 200, 16, 10, 3, 3);
        assert_eq!(contour_accuracy(&small, &small_far, None, tol).unwrap(), 0.0);
        let e = Mask::new(400, 200);
        assert_eq!(contour_accuracy(&e, &e, None, tol).unwrap(), 1.0);
        assert_eq!(contour_accuracy(&a, &e, None, tol).unwrap(), 0.0);
    }

    #[test]
    fn seam_crossing_mask_has_no_seam_contour() {
        let m = Mask::from_fn(400, 200, |i, j| !(20..380).contains(&i) && (50..90).contains(&j));
        let c = m.boundary(true);
        for j in 51..89 {
            assert!(!c.get(0, j) && !c.get(399, j));
        }
        let shifted = m.roll_columns(200);
        let fa = contour_accuracy(&m, &m, None, 3).unwrap();
        let fb = contour_accuracy(&shifted, &shifted, None, 3).unwrap();
        assert_eq!((fa, fb), (1.0, 1.0));
        assert_eq!(c.count(), shifted.boundary(true).count());
    }

    #[test]
    fn default_tolerance() {
        assert_eq!(default_contour_tolerance(ErpSize::new(1920, 960).unwrap()), 18);
    }
}
