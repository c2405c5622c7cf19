//! Viewport surfaces (tangent plane and spherical patch), the sampling grid
//! they induce on the ERP frame, and region boundaries / rasterization.

use std::f64::consts::{FRAC_PI_2, PI};

use nalgebra::Vector3;
use rayon::prelude::*;

use super::Bfov;
use crate::error::{Error, Result};
use crate::geom::{vec_to_pixel, ErpSize, PixelCoord, Rotation3, UnitVec3};
use crate::mask::Mask;

pub const DEFAULT_BOUNDARY_SAMPLES: usize = 256;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SurfaceKind {
    Tangent,
    Spherical,
}

impl SurfaceKind {
    /// Tangent plane only while both extents are strictly below 90 degrees.
    pub fn for_extent(theta: f64, phi: f64) -> Self {
        if theta < FRAC_PI_2 && phi < FRAC_PI_2 {
            SurfaceKind::Tangent
        } else {
            SurfaceKind::Spherical
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            SurfaceKind::Tangent => "tangent",
            SurfaceKind::Spherical => "spherical",
        }
    }

    /// Membership of a direction expressed in the viewport frame.
    pub(crate) fn contains_local(&self, v: &Vector3<f64>, theta: f64, phi: f64) -> bool {
        match self {
            SurfaceKind::Tangent => {
                v.z > 0.0 && v.x.abs() <= (theta / 2.0).tan() * v.z && v.y.abs() <= (phi / 2.0).tan() * v.z
            }
            SurfaceKind::Spherical => {
                v.x.atan2(v.z).abs() <= theta / 2.0 && (-v.y).atan2(v.x.hypot(v.z)).abs() <= phi / 2.0
            }
        }
    }
}

/// A sampled viewport surface with `nx` columns and `ny` rows. Index
/// coordinates `(a, b)` run over `[0, nx-1] x [0, ny-1]`; row 0 is the top
/// of the viewport and column 0 its left edge.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Surface {
    pub kind: SurfaceKind,
    pub theta: f64,
    pub phi: f64,
    pub nx: usize,
    pub ny: usize,
}

impl Surface {
    pub fn new(kind: SurfaceKind, theta: f64, phi: f64, nx: usize, ny: usize) -> Result<Self> {
        if nx < 2 || ny < 2 {
            return Err(Error::domain(format!(
                "surface needs at least 2x2 samples, got {nx}x{ny}"
            )));
        }
        if !theta.is_finite() || !phi.is_finite() || theta < 0.0 || phi < 0.0 {
            return Err(Error::domain("surface extents must be finite and non-negative"));
        }
        if kind == SurfaceKind::Tangent && (theta >= PI || phi >= PI) {
            return Err(Error::domain("tangent plane undefined for extents >= 180 degrees"));
        }
        Ok(Self {
            kind,
            theta,
            phi,
            nx,
            ny,
        })
    }

    fn fractions(&self, a: f64, b: f64) -> (f64, f64) {
        (a / (self.nx - 1) as f64, b / (self.ny - 1) as f64)
    }

    /// Unit direction (viewport frame) at index coordinates `(a, b)`.
    pub fn point(&self, a: f64, b: f64) -> Vector3<f64> {
        let (fa, fb) = self.fractions(a, b);
        match self.kind {
            SurfaceKind::Tangent => {
                let tx = (self.theta / 2.0).tan();
                let ty = (self.phi / 2.0).tan();
                let v = Vector3::new(-tx + 2.0 * tx * fa, -ty + 2.0 * ty * fb, 1.0);
                v / v.norm()
            }
            SurfaceKind::Spherical => {
                let lon = -self.theta / 2.0 + self.theta * fa;
                let lat = self.phi / 2.0 - self.phi * fb;
                let (sl, cl) = lon.sin_cos();
                let (sp, cp) = lat.sin_cos();
                Vector3::new(cp * sl, -sp, cp * cl)
            }
        }
    }

    /// Inverse of [`Surface::point`]; `None` behind a tangent plane.
    pub fn index_of(&self, v: &Vector3<f64>) -> Option<(f64, f64)> {
        match self.kind {
            SurfaceKind::Tangent => {
                if v.z <= 0.0 {
                    return None;
                }
                let tx = (self.theta / 2.0).tan();
                let ty = (self.phi / 2.0).tan();
                let fa = if tx > 0.0 { (v.x / v.z + tx) / (2.0 * tx) } else { 0.5 };
                let fb = if ty > 0.0 { (v.y / v.z + ty) / (2.0 * ty) } else { 0.5 };
                Some((fa * (self.nx - 1) as f64, fb * (self.ny - 1) as f64))
            }
            SurfaceKind::Spherical => {
                let lon = v.x.atan2(v.z);
                let lat = (-v.y).atan2(v.x.hypot(v.z));
                let fa = (lon + self.theta / 2.0) / self.theta;
                let fb = (self.phi / 2.0 - lat) / self.phi;
                Some((fa * (self.nx - 1) as f64, fb * (self.ny - 1) as f64))
            }
        }
    }

    /// All sample directions, row-major.
    pub fn points(&self) -> Vec<UnitVec3> {
        let mut out = Vec::with_capacity(self.nx * self.ny);
        for j in 0..self.ny {
            for i in 0..self.nx {
                out.push(UnitVec3::new_unchecked(self.point(i as f64, j as f64)));
            }
        }
        out
    }
}

/// Tangent-plane samples normalized onto the sphere, row-major `ny x nx`.
pub fn tangent_surface(theta: f64, phi: f64, nx: usize, ny: usize) -> Result<Vec<UnitVec3>> {
    Ok(Surface::new(SurfaceKind::Tangent, theta, phi, nx, ny)?.points())
}

/// Spherical-patch samples, row-major `ny x nx`.
pub fn spherical_surface(theta: f64, phi: f64, nx: usize, ny: usize) -> Result<Vec<UnitVec3>> {
    if !(theta > 0.0 && theta <= 2.0 * PI + 1e-12 && phi > 0.0 && phi <= PI + 1e-12) {
        return Err(Error::domain("spherical surface needs 0 < theta <= 2pi, 0 < phi <= pi"));
    }
    Ok(Surface::new(SurfaceKind::Spherical, theta, phi, nx, ny)?.points())
}

/// Per-output-pixel ERP coordinates for the region of a BFoV.
#[derive(Debug, Clone, PartialEq)]
pub struct SamplingGrid {
    cols: usize,
    rows: usize,
    coords: Vec<PixelCoord>,
    size: ErpSize,
    bfov: Bfov,
    surface: Surface,
    rotation: Rotation3,
}

impl SamplingGrid {
    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn erp_size(&self) -> ErpSize {
        self.size
    }

    pub fn bfov(&self) -> &Bfov {
        &self.bfov
    }

    pub fn surface(&self) -> &Surface {
        &self.surface
    }

    pub fn coords(&self) -> &[PixelCoord] {
        &self.coords
    }

    #[inline]
    pub fn get(&self, col: usize, row: usize) -> PixelCoord {
        self.coords[row * self.cols + col]
    }

    pub fn center_entry(&self) -> PixelCoord {
        self.get(self.cols / 2, self.rows / 2)
    }

    /// Sphere direction for a continuous local-image coordinate. Local
    /// pixel `(i, j)` has its centre at `(i + 0.5, j + 0.5)` and samples
    /// grid entry `(i, j)`.
    pub fn local_to_dir(&self, x: f64, y: f64) -> Vector3<f64> {
        self.rotation.apply(&self.surface.point(x - 0.5, y - 0.5))
    }

    pub fn local_to_pixel(&self, x: f64, y: f64) -> PixelCoord {
        vec_to_pixel(&self.local_to_dir(x, y), self.size)
    }

    /// Continuous local-image coordinate of a sphere direction, if it lies in
    /// front of the viewport surface (not necessarily inside the image).
    pub fn dir_to_local(&self, v: &Vector3<f64>) -> Option<(f64, f64)> {
        let local = self.rotation.inverse().apply(v);
        self.surface.index_of(&local).map(|(a, b)| (a + 0.5, b + 0.5))
    }
}

/// Region of `b` sampled at `out_w x out_h`: tangent plane below 90 degrees
/// on both axes, spherical patch otherwise.
pub fn ebfov_grid(b: &Bfov, out_w: usize, out_h: usize, size: ErpSize) -> Result<SamplingGrid> {
    let surface = Surface::new(b.surface_kind(), b.theta, b.phi, out_w, out_h)?;
    let rotation = b.rotation();
    let mut coords = vec![PixelCoord::new(0.0, 0.0); out_w * out_h];
    coords.par_chunks_mut(out_w).enumerate().for_each(|(j, row)| {
        for (i, c) in row.iter_mut().enumerate() {
            let v = rotation.apply(&surface.point(i as f64, j as f64));
            *c = vec_to_pixel(&v, size);
        }
    });
    Ok(SamplingGrid {
        cols: out_w,
        rows: out_h,
        coords,
        size,
        bfov: *b,
        surface,
        rotation,
    })
}

/// Region outline on the ERP image, split into pieces wherever it wraps
/// across the left/right border.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundaryPolygon {
    pub segments: Vec<Vec<PixelCoord>>,
}

impl BoundaryPolygon {
    pub fn points(&self) -> impl Iterator<Item = &PixelCoord> {
        self.segments.iter().flatten()
    }

    pub fn wraps(&self) -> bool {
        self.segments.len() > 1
    }
}

/// Projects the four edges of the viewport surface of `b`, walking
/// clockwise from the top-left corner back to it.
pub fn bfov_boundary(b: &Bfov, samples_per_edge: usize, size: ErpSize) -> Result<BoundaryPolygon> {
    let n = samples_per_edge;
    let surface = Surface::new(b.surface_kind(), b.theta, b.phi, n, n)?;
    let last = (n - 1) as f64;
    let mut params: Vec<(f64, f64)> = Vec::with_capacity(4 * n);
    params.extend((0..n).map(|k| (k as f64, 0.0)));
    params.extend((1..n).map(|k| (last, k as f64)));
    params.extend((1..n).map(|k| (last - k as f64, last)));
    params.extend((1..n).map(|k| (0.0, last - k as f64)));

    let rotation = b.rotation();
    let pts: Vec<PixelCoord> = params
        .iter()
        .map(|&(a, bb)| vec_to_pixel(&rotation.apply(&surface.point(a, bb)), size))
        .collect();

    let half = size.w() / 2.0;
    let mut segments: Vec<Vec<PixelCoord>> = vec![vec![pts[0]]];
    for w in pts.windows(2) {
        if (w[1].u - w[0].u).abs() > half {
            segments.push(Vec::new());
        }
        segments.last_mut().expect("non-empty").push(w[1]);
    }
    if segments.len() > 1 {
        // the walk ends where it started, so the last piece continues the first
        let tail = segments.pop().expect("len > 1");
        let head = std::mem::replace(&mut segments[0], tail);
        segments[0].extend(head.into_iter().skip(1));
    }
    Ok(BoundaryPolygon { segments })
}

/// Mask of all ERP pixels whose centre lies inside the region of `b`.
pub fn rasterize_bfov(b: &Bfov, size: ErpSize) -> Mask {
    let (w, h) = (size.width(), size.height());
    let test = b.region_test();
    let lons: Vec<(f64, f64)> = (0..w)
        .map(|i| (((i as f64 + 0.5) / size.w() - 0.5) * 2.0 * PI).sin_cos())
        .collect();
    let mut data = vec![false; w * h];
    data.par_chunks_mut(w).enumerate().for_each(|(j, row)| {
        let lat = (0.5 - (j as f64 + 0.5) / size.h()) * PI;
        let (slat, clat) = lat.sin_cos();
        for (i, px) in row.iter_mut().enumerate() {
            let (slon, clon) = lons[i];
            *px = test(&Vector3::new(clat * slon, -slat, clat * clon));
        }
    });
    Mask::from_vec(w, h, data).expect("sized buffer")
}
