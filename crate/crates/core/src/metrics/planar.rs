//! Box overlap and centre-distance metrics on the ERP image plane,
//! including the dual (border-aware) variants.

use crate::error::{Error, Result};
use crate::geom::{wrap_mod, ErpSize, PixelCoord};
use crate::regions::planar::{clip_convex, polygon_area};
use crate::regions::RBBox;

/// IoU of two (rotated) boxes. Zero-area boxes give 0.
pub fn iou_planar(a: &RBBox, b: &RBBox) -> f64 {
    let (aa, ab) = (a.area(), b.area());
    if !(aa > 0.0) || !(ab > 0.0) {
        return 0.0;
    }
    let inter = if a.gamma == 0.0 && b.gamma == 0.0 {
        let ix = (a.cx + a.w / 2.0).min(b.cx + b.w / 2.0) - (a.cx - a.w / 2.0).max(b.cx - b.w / 2.0);
        let iy = (a.cy + a.h / 2.0).min(b.cy + b.h / 2.0) - (a.cy - a.h / 2.0).max(b.cy - b.h / 2.0);
        ix.max(0.0) * iy.max(0.0)
    } else {
        polygon_area(&clip_convex(&a.corners(), &b.corners()))
    };
    let union = aa + ab - inter;
    if union <= 0.0 {
        return 0.0;
    }
    (inter / union).clamp(0.0, 1.0)
}

fn normalized_x(b: &RBBox, size: ErpSize) -> RBBox {
    RBBox {
        cx: wrap_mod(b.cx, size.w()),
        ..*b
    }
}

/// `max(IoU(gt - W, tr), IoU(gt, tr), IoU(gt + W, tr))`.
pub fn dual_success(gt: &RBBox, tr: &RBBox, size: ErpSize) -> f64 {
    let gt = normalized_x(gt, size);
    let tr = normalized_x(tr, size);
    [-size.w(), 0.0, size.w()]
        .iter()
        .map(|&dx| iou_planar(&gt.shifted(dx), &tr))
        .fold(0.0, f64::max)
}

/// Centre distance minimized over the three horizontal copies of the
/// ground truth. With `normalized`, the offset is scaled per axis by the
/// ground-truth box size `(w, h)`.
pub fn dual_precision(
    gt: PixelCoord,
    tr: PixelCoord,
    size: ErpSize,
    gt_extent: Option<(f64, f64)>,
    normalized: bool,
) -> Result<f64> {
    let (sx, sy) = if normalized {
        let (w, h) = gt_extent.ok_or_else(|| Error::domain("normalized precision needs the ground-truth box"))?;
        if !(w > 0.0 && h > 0.0) {
            return Err(Error::domain("ground-truth box must have positive size"));
        }
        (1.0 / w, 1.0 / h)
    } else {
        (1.0, 1.0)
    };
    let gu = wrap_mod(gt.u, size.w());
    let tu = wrap_mod(tr.u, size.w());
    let dy = (gt.v - tr.v) * sy;
    Ok([-size.w(), 0.0, size.w()]
        .iter()
        .map(|&dx| ((gu + dx - tu) * sx).hypot(dy))
        .fold(f64::INFINITY, f64::min))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::regions::BBox;
    use proptest::prelude::*;

    fn bx(cx: f64, cy: f64, w: f64, h: f64) -> RBBox {
        BBox::new(cx, cy, w, h).unwrap().to_rbbox()
    }

    fn size() -> ErpSize {
        ErpSize::new(3840, 1920).unwrap()
    }

    #[test]
    fn iou_examples() {
        let a = bx(0.5, 0.5, 1.0, 1.0);
        assert_eq!(iou_planar(&a, &a), 1.0);
        assert_eq!(iou_planar(&a, &bx(5.0, 5.0, 1.0, 1.0)), 0.0);
        let b = bx(1.0, 0.5, 1.0, 1.0);
        assert!((iou_planar(&a, &b) - 1.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn rotated_iou_uses_polygon_clipping() {
        let a = RBBox::new(0.0, 0.0, 2.0, 2.0, 0.0).unwrap();
        let b = RBBox::new(0.0, 0.0, 2.0, 2.0, std::f64::consts::FRAC_PI_4).unwrap();
        // square and its 45-degree copy: intersection is a regular octagon
        let oct = 8.0 * (2f64.sqrt() - 1.0);
        let expected = oct / (8.0 - oct);
        assert!((iou_planar(&a, &b) - expected).abs() < 1e-12);
        assert_eq!(iou_planar(&b, &b.shifted(10.0)), 0.0);
    }

    #[test]
    fn dual_success_across_border() {
        let gt = bx(10.0, 100.0, 40.0, 40.0);
        let tr = bx(3830.0, 100.0, 40.0, 40.0);
        assert_eq!(dual_success(&gt, &tr, size()), 1.0 / 3.0);
        assert_eq!(iou_planar(&gt, &tr), 0.0);
        let far = bx(1900.0, 900.0, 40.0, 40.0);
        assert_eq!(dual_success(&gt, &far, size()), 0.0);
        let mid = bx(1000.0, 500.0, 80.0, 60.0);
        let moved = bx(1010.0, 505.0, 80.0, 60.0);
        assert_eq!(dual_success(&mid, &moved, size()), iou_planar(&mid, &moved));
    }

    #[test]
    fn dual_precision_examples() {
        let s = size();
        let p = |u, v| PixelCoord::new(u, v);
        assert_eq!(dual_precision(p(5.0, 5.0), p(5.0, 5.0), s, None, false).unwrap(), 0.0);
        assert_eq!(
            dual_precision(p(10.0, 100.0), p(3830.0, 100.0), s, None, false).unwrap(),
            20.0
        );
        let n = dual_precision(p(100.0, 100.0), p(140.0, 100.0), s, Some((40.0, 10.0)), true).unwrap();
        assert_eq!(n, 1.0);
        assert!(dual_precision(p(0.0, 0.0), p(1.0, 1.0), s, None, true).is_err());
    }

    proptest! {
        #[test]
        fn dual_dominates_plain(
            gx in 0.0..3840.0f64, gy in 0.0..1920.0f64, tx in 0.0..3840.0f64, ty in 0.0..1920.0f64,
            gw in 1.0..400.0f64, gh in 1.0..400.0f64, tw in 1.0..400.0f64, th in 1.0..400.0f64,
        ) {
            let (g, t) = (bx(gx, gy, gw, gh), bx(tx, ty, tw, th));
            prop_assert!(dual_success(&g, &t, size()) >= iou_planar(&g, &t));
            let plain = (gx - tx).hypot(gy - ty);
            let dual = dual_precision(PixelCoord::new(gx, gy), PixelCoord::new(tx, ty), size(), None, false).unwrap();
            prop_assert!(dual <= plain + 1e-9);
        }

        #[test]
        fn dual_success_translation_invariant(
            gx in 0.0..3840.0f64, tx in 0.0..3840.0f64, k in 0.0..3840.0f64,
            gw in 1.0..600.0f64, tw in 1.0..600.0f64,
        ) {
            let (g, t) = (bx(gx, 500.0, gw, 50.0), bx(tx, 510.0, tw, 40.0));
            let a = dual_success(&g, &t, size());
            let b = dual_success(&g.shifted(k), &t.shifted(k), size());
            prop_assert!((a - b).abs() < 1e-9);
        }
    }
}
