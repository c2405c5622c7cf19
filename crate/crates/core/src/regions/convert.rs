//! Ground-truth conversion: masks or point sets to BBox, rBBox, BFoV and
//! rBFoV. All conversions are aware of the longitude wrap of the ERP frame.

use std::f64::consts::PI;

use nalgebra::Vector3;

use super::planar::{convex_hull, min_area_rect, Point2};
use super::{BBox, Bfov, RBBox};
use crate::error::{Error, Result};
use crate::geom::{bfov_rotation, pixel_to_lonlat, vec_to_lonlat, wrap_mod, ErpSize, PixelCoord};
use crate::mask::Mask;

/// Occupied horizontal intervals `[start, end)` on a circle of `period`,
/// sorted by start and non-overlapping. Returns `(start, width)` of the
/// shortest arc covering all of them, obtained by cutting at the widest
/// empty gap. Ties prefer the gap containing the seam (so non-crossing
/// targets stay non-crossing), then the leftmost gap.
fn wrap_extent(intervals: &[(f64, f64)], period: f64) -> (f64, f64) {
    debug_assert!(!intervals.is_empty());
    let first = intervals[0];
    let last = intervals[intervals.len() - 1];
    // seam gap first so it wins ties
    let mut best_gap = first.0 + period - last.1;
    let mut cut_start = first.0;
    for w in intervals.windows(2) {
        let gap = w[1].0 - w[0].1;
        if gap > best_gap {
            best_gap = gap;
            cut_start = w[1].0;
        }
    }
    if best_gap <= 0.0 {
        return (0.0, period);
    }
    (wrap_mod(cut_start, period), period - best_gap)
}

fn column_runs(mask: &Mask) -> Vec<(f64, f64)> {
    let (w, h) = mask.dims();
    let mut occupied = vec![false; w];
    for j in 0..h {
        for (i, o) in occupied.iter_mut().enumerate() {
            *o |= mask.get(i, j);
        }
    }
    let mut runs = Vec::new();
    let mut i = 0;
    while i < w {
        if occupied[i] {
            let s = i;
            while i < w && occupied[i] {
                i += 1;
            }
            runs.push((s as f64, i as f64));
        } else {
            i += 1;
        }
    }
    runs
}

fn check_erp_mask(m: &Mask) -> Result<()> {
    if m.is_empty() {
        return Err(Error::EmptyMask);
    }
    Ok(())
}

/// Narrowest axis-aligned box holding every mask pixel under longitude wrap.
pub fn mask_to_bbox(m: &Mask) -> Result<BBox> {
    check_erp_mask(m)?;
    let w = m.width() as f64;
    let (start, width) = wrap_extent(&column_runs(m), w);
    let (_, j0, _, j1) = m.pixel_bounds().expect("non-empty");
    BBox::new(
        wrap_mod(start + width / 2.0, w),
        (j0 + j1 + 1) as f64 / 2.0,
        width,
        (j1 - j0 + 1) as f64,
    )
}

fn rect_from_points(points: &[Point2], shift: f64, period: f64) -> Result<RBBox> {
    let r = min_area_rect(&convex_hull(points));
    RBBox::new(
        wrap_mod(r.center.0 + shift, period),
        r.center.1,
        r.w.max(1e-6),
        r.h.max(1e-6),
        r.angle,
    )
}

/// Minimum-area rotated rectangle of the mask, computed on the outline
/// pixels' corners after unwrapping the mask at its widest empty column gap.
pub fn mask_to_rbbox(m: &Mask) -> Result<RBBox> {
    check_erp_mask(m)?;
    let w = m.width();
    let (start, _) = wrap_extent(&column_runs(m), w as f64);
    let start = start as usize;
    let mut corners: Vec<Point2> = Vec::new();
    for (i, j) in m.outline(true).iter_set() {
        let x = ((i + w - start) % w) as f64;
        let y = j as f64;
        corners.extend([(x, y), (x + 1.0, y), (x, y + 1.0), (x + 1.0, y + 1.0)]);
    }
    rect_from_points(&corners, start as f64, w as f64)
}

/// Axis-aligned box of a continuous point set on the ERP image.
pub fn bbox_of_points(points: &[PixelCoord], size: ErpSize) -> Result<BBox> {
    if points.is_empty() {
        return Err(Error::Empty("point set"));
    }
    let mut us: Vec<f64> = points.iter().map(|p| wrap_mod(p.u, size.w())).collect();
    us.sort_by(f64::total_cmp);
    let intervals: Vec<(f64, f64)> = us.iter().map(|&u| (u, u)).collect();
    let (start, width) = wrap_extent(&intervals, size.w());
    let (v0, v1) = points
        .iter()
        .fold((f64::MAX, f64::MIN), |(a, b), p| (a.min(p.v), b.max(p.v)));
    BBox::new(
        wrap_mod(start + width / 2.0, size.w()),
        (v0 + v1) / 2.0,
        width.max(1e-6),
        (v1 - v0).max(1e-6),
    )
}

/// Minimum-area rotated rectangle of a continuous point set.
pub fn rbbox_of_points(points: &[PixelCoord], size: ErpSize) -> Result<RBBox> {
    if points.is_empty() {
        return Err(Error::Empty("point set"));
    }
    let mut us: Vec<f64> = points.iter().map(|p| wrap_mod(p.u, size.w())).collect();
    us.sort_by(f64::total_cmp);
    let intervals: Vec<(f64, f64)> = us.iter().map(|&u| (u, u)).collect();
    let (start, _) = wrap_extent(&intervals, size.w());
    let shifted: Vec<Point2> = points.iter().map(|p| (wrap_mod(p.u - start, size.w()), p.v)).collect();
    rect_from_points(&shifted, start, size.w())
}

/// Fits a (r)BFoV: centre from the normalized `mean` direction, extents
/// from the largest viewport-frame longitude and latitude among
/// `extent_points`. With `rotated`, roll is searched on a
/// 1 degree grid over `[0, 180)` minimizing `theta * phi` (ties keep the
/// smallest roll).
fn fit_bfov(mean: Vector3<f64>, extent_points: &[Vector3<f64>], rotated: bool, min_extent: (f64, f64)) -> Result<Bfov> {
    if extent_points.is_empty() {
        return Err(Error::EmptyMask);
    }
    let norm = mean.norm();
    if norm < 1e-6 {
        return Err(Error::DegenerateCentroid(norm));
    }
    let center = vec_to_lonlat(&mean)?;
    let inv = bfov_rotation(center.lon, center.lat, 0.0).inverse();
    let local: Vec<Vector3<f64>> = extent_points.iter().map(|v| inv.apply(v)).collect();

    let extents = |gamma: f64| {
        let (s, c) = gamma.sin_cos();
        let (mut lon, mut lat) = (0.0f64, 0.0f64);
        for p in &local {
            // R_z(gamma)^T p
            let x = c * p.x + s * p.y;
            let y = -s * p.x + c * p.y;
            lon = lon.max(x.atan2(p.z).abs());
            lat = lat.max((-y).atan2(x.hypot(p.z)).abs());
        }
        (
            (2.0 * lon).clamp(min_extent.0, 2.0 * PI),
            (2.0 * lat).clamp(min_extent.1, PI),
        )
    };

    let mut gamma = 0.0;
    let (mut theta, mut phi) = extents(0.0);
    if rotated {
        for step in 1..180 {
            let g = (step as f64).to_radians();
            let (t, p) = extents(g);
            if t * p < theta * phi {
                gamma = g;
                theta = t;
                phi = p;
            }
        }
    }
    Bfov::new(center.lon, center.lat, theta, phi, gamma)
}

/// (r)BFoV of a mask. The centre is the mean direction of all mask pixels,
/// each weighted by its solid angle (ERP pixels crowd towards the poles, so
/// an unweighted mean drifts poleward). Extents are measured on the outline
/// pixels, where the extremes are attained.
pub fn mask_to_bfov(m: &Mask, size: ErpSize, rotated: bool) -> Result<Bfov> {
    check_erp_mask(m)?;
    if m.dims() != (size.width(), size.height()) {
        return Err(Error::DimensionMismatch {
            expected: (size.width(), size.height()),
            found: m.dims(),
        });
    }
    let dirs = PixelDirections::new(size);
    let mut sum = Vector3::zeros();
    let mut total = 0.0;
    for (i, j) in m.iter_set() {
        let w = dirs.lat[j].1;
        sum += dirs.at(i, j) * w;
        total += w;
    }
    let extent: Vec<Vector3<f64>> = m.outline(true).iter_set().map(|(i, j)| dirs.at(i, j)).collect();
    fit_bfov(sum / total, &extent, rotated, pixel_extent(size))
}

/// (r)BFoV of a continuous set of sphere directions.
pub fn bfov_of_points(points: &[Vector3<f64>], size: ErpSize, rotated: bool) -> Result<Bfov> {
    if points.is_empty() {
        return Err(Error::EmptyMask);
    }
    let sum = points.iter().fold(Vector3::zeros(), |acc, p| acc + p);
    fit_bfov(sum / points.len() as f64, points, rotated, pixel_extent(size))
}

/// Smallest representable extent: one ERP pixel in each direction.
fn pixel_extent(size: ErpSize) -> (f64, f64) {
    (2.0 * PI / size.w(), PI / size.h())
}

/// Cached sin/cos tables for pixel-centre directions of an ERP raster.
pub(crate) struct PixelDirections {
    lon: Vec<(f64, f64)>,
    lat: Vec<(f64, f64)>,
}

impl PixelDirections {
    pub(crate) fn new(size: ErpSize) -> Self {
        let lon = (0..size.width())
            .map(|i| {
                let s = pixel_to_lonlat(PixelCoord::pixel_center(i, 0), size).expect("in range");
                s.lon.sin_cos()
            })
            .collect();
        let lat = (0..size.height())
            .map(|j| {
                let s = pixel_to_lonlat(PixelCoord::pixel_center(0, j), size).expect("in range");
                s.lat.sin_cos()
            })
            .collect();
        Self { lon, lat }
    }

    #[inline]
    pub(crate) fn at(&self, i: usize, j: usize) -> Vector3<f64> {
        let (slon, clon) = self.lon[i];
        let (slat, clat) = self.lat[j];
        Vector3::new(clat * slon, -slat, clat * clon)
    }
}
