//! Spherical metrics: per-pixel solid angles, spherical IoU of BFoV
//! regions and angular centre precision.

use std::f64::consts::PI;

use rayon::prelude::*;

use crate::geom::{geodesic_angle, wrap_angle, ErpSize, LonLat};
use crate::mask::Mask;
use crate::regions::{rasterize_bfov, Bfov};

/// Solid angle (steradians) of every pixel of an ERP raster. Weights are
/// constant along a row.
#[derive(Debug, Clone, PartialEq)]
pub struct SphericalWeights {
    size: ErpSize,
    rows: Vec<f64>,
}

impl SphericalWeights {
    pub fn new(size: ErpSize) -> Self {
        spherical_weights(size)
    }

    pub fn size(&self) -> ErpSize {
        self.size
    }

    #[inline]
    pub fn row(&self, j: usize) -> f64 {
        self.rows[j]
    }

    pub fn rows(&self) -> &[f64] {
        &self.rows
    }

    pub fn total(&self) -> f64 {
        self.rows.iter().sum::<f64>() * self.size.w()
    }

    /// Weighted area of the set pixels.
    pub fn mask_area(&self, m: &Mask) -> f64 {
        let w = m.width();
        m.as_slice()
            .chunks_exact(w)
            .enumerate()
            .map(|(j, row)| row.iter().filter(|&&b| b).count() as f64 * self.rows[j])
            .sum()
    }
}

/// `dlon * (cos(colat - dcolat/2) - cos(colat + dcolat/2))` per row, with
/// `colat` the pixel-centre colatitude.
pub fn spherical_weights(size: ErpSize) -> SphericalWeights {
    let dtheta = PI / size.h();
    let dphi = 2.0 * PI / size.w();
    let rows = (0..size.height())
        .map(|j| {
            let colat = (j as f64 + 0.5) * dtheta;
            dphi * ((colat - dtheta / 2.0).cos() - (colat + dtheta / 2.0).cos())
        })
        .collect();
    SphericalWeights { size, rows }
}

/// Spherical IoU of two BFoV regions by solid-angle weighted rasterization.
pub fn sphere_iou(a: &Bfov, b: &Bfov, raster: ErpSize) -> f64 {
    sphere_iou_weighted(a, b, &spherical_weights(raster))
}

pub fn sphere_iou_weighted(a: &Bfov, b: &Bfov, weights: &SphericalWeights) -> f64 {
    let size = weights.size();
    let ma = rasterize_bfov(a, size);
    let mb = rasterize_bfov(b, size);
    let w = size.width();
    let (inter, union) = ma
        .as_slice()
        .par_chunks(w)
        .zip(mb.as_slice().par_chunks(w))
        .enumerate()
        .map(|(j, (ra, rb))| {
            let (mut i, mut u) = (0usize, 0usize);
            for (x, y) in ra.iter().zip(rb) {
                i += (*x && *y) as usize;
                u += (*x || *y) as usize;
            }
            (i as f64 * weights.row(j), u as f64 * weights.row(j))
        })
        .reduce(|| (0.0, 0.0), |p, q| (p.0 + q.0, p.1 + q.1));
    if union <= 0.0 {
        return 0.0;
    }
    inter / union
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum AngleMode {
    /// Central angle between the two centre directions.
    #[default]
    Geodesic,
    /// Euclidean norm of the (wrapped) longitude and latitude differences.
    Literal,
}

/// Angular distance between two centres, in degrees.
pub fn angle_precision(gt: LonLat, tr: LonLat, mode: AngleMode) -> f64 {
    match mode {
        AngleMode::Geodesic => geodesic_angle(gt, tr).to_degrees(),
        AngleMode::Literal => wrap_angle(gt.lon - tr.lon).hypot(gt.lat - tr.lat).to_degrees(),
    }
}
