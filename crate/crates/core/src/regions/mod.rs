//! Target representations on the ERP image plane (BBox, rBBox) and on the
//! sphere (BFoV, rBFoV), their image regions, and mask conversions.

mod convert;
pub mod planar;
mod surface;

use std::f64::consts::{FRAC_PI_2, PI, TAU};

use nalgebra::Vector3;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geom::{bfov_rotation, wrap_angle, LonLat, Rotation3};

pub use convert::{bbox_of_points, bfov_of_points, mask_to_bbox, mask_to_bfov, mask_to_rbbox, rbbox_of_points};
pub use surface::{
    bfov_boundary, ebfov_grid, rasterize_bfov, spherical_surface, tangent_surface, BoundaryPolygon, SamplingGrid,
    Surface, SurfaceKind, DEFAULT_BOUNDARY_SAMPLES,
};

/// Axis-aligned box on the ERP image. `cx` is taken modulo the image width,
/// so a box may straddle the left/right border.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BBox {
    pub cx: f64,
    pub cy: f64,
    pub w: f64,
    pub h: f64,
}

impl BBox {
    pub fn new(cx: f64, cy: f64, w: f64, h: f64) -> Result<Self> {
        if ![cx, cy, w, h].iter().all(|x| x.is_finite()) {
            return Err(Error::domain("non-finite box field"));
        }
        if w <= 0.0 || h <= 0.0 {
            return Err(Error::domain(format!("box size {w}x{h} must be positive")));
        }
        Ok(Self { cx, cy, w, h })
    }

    pub fn area(&self) -> f64 {
        self.w * self.h
    }

    pub fn to_rbbox(self) -> RBBox {
        RBBox {
            cx: self.cx,
            cy: self.cy,
            w: self.w,
            h: self.h,
            gamma: 0.0,
        }
    }
}

/// Rotated box: `w` runs along direction `gamma` (image coordinates, `y`
/// down), `h` perpendicular to it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RBBox {
    pub cx: f64,
    pub cy: f64,
    pub w: f64,
    pub h: f64,
    pub gamma: f64,
}

impl RBBox {
    /// Canonicalizes to `w >= h` and `gamma` in `[0, pi)` (`[0, pi/2)` for
    /// squares, whose orientation is only defined modulo a quarter turn).
    pub fn new(cx: f64, cy: f64, w: f64, h: f64, gamma: f64) -> Result<Self> {
        if ![cx, cy, w, h, gamma].iter().all(|x| x.is_finite()) {
            return Err(Error::domain("non-finite box field"));
        }
        if w <= 0.0 || h <= 0.0 {
            return Err(Error::domain(format!("box size {w}x{h} must be positive")));
        }
        let (w, h, gamma) = if h > w {
            (h, w, gamma + FRAC_PI_2)
        } else {
            (w, h, gamma)
        };
        let period = if w == h { FRAC_PI_2 } else { PI };
        let mut gamma = gamma.rem_euclid(period);
        if gamma >= period {
            gamma = 0.0;
        }
        Ok(Self { cx, cy, w, h, gamma })
    }

    pub fn area(&self) -> f64 {
        self.w * self.h
    }

    /// Corner points in order around the box.
    pub fn corners(&self) -> [(f64, f64); 4] {
        let (s, c) = self.gamma.sin_cos();
        let (a, b) = (self.w / 2.0, self.h / 2.0);
        let at = |p: f64, q: f64| (self.cx + p * c - q * s, self.cy + p * s + q * c);
        [at(-a, -b), at(a, -b), at(a, b), at(-a, b)]
    }

    /// Same box shifted horizontally by `dx` pixels.
    pub fn shifted(&self, dx: f64) -> Self {
        Self {
            cx: self.cx + dx,
            ..*self
        }
    }
}

impl From<BBox> for RBBox {
    fn from(b: BBox) -> Self {
        b.to_rbbox()
    }
}

/// Bounding field-of-view on the unit sphere. A plain BFoV has `gamma = 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Bfov {
    pub clon: f64,
    pub clat: f64,
    pub theta: f64,
    pub phi: f64,
    pub gamma: f64,
}

impl Bfov {
    /// Validates extents (`0 < theta <= 2pi`, `0 < phi <= pi`) and the
    /// centre latitude; `clon` is wrapped into `[-pi, pi)`.
    pub fn new(clon: f64, clat: f64, theta: f64, phi: f64, gamma: f64) -> Result<Self> {
        if ![clon, clat, theta, phi, gamma].iter().all(|x| x.is_finite()) {
            return Err(Error::domain("non-finite BFoV field"));
        }
        if !(theta > 0.0 && theta <= TAU + 1e-12) {
            return Err(Error::domain(format!("theta {theta} outside (0, 2pi]")));
        }
        if !(phi > 0.0 && phi <= PI + 1e-12) {
            return Err(Error::domain(format!("phi {phi} outside (0, pi]")));
        }
        if clat.abs() > FRAC_PI_2 {
            return Err(Error::domain(format!("clat {clat} outside [-pi/2, pi/2]")));
        }
        Ok(Self {
            clon: wrap_angle(clon),
            clat,
            theta: theta.min(TAU),
            phi: phi.min(PI),
            gamma,
        })
    }

    pub fn from_degrees(clon: f64, clat: f64, theta: f64, phi: f64, gamma: f64) -> Result<Self> {
        Self::new(
            clon.to_radians(),
            clat.to_radians(),
            theta.to_radians(),
            phi.to_radians(),
            gamma.to_radians(),
        )
    }

    pub fn center(&self) -> LonLat {
        LonLat {
            lon: self.clon,
            lat: self.clat,
        }
    }

    pub fn rotation(&self) -> Rotation3 {
        bfov_rotation(self.clon, self.clat, self.gamma)
    }

    pub fn surface_kind(&self) -> SurfaceKind {
        SurfaceKind::for_extent(self.theta, self.phi)
    }

    /// Whether direction `v` (unit) lies inside the region this BFoV covers.
    pub fn contains(&self, v: &Vector3<f64>) -> bool {
        let local = self.rotation().inverse().apply(v);
        self.surface_kind().contains_local(&local, self.theta, self.phi)
    }

    /// Builds a containment test with the rotation precomputed.
    pub fn region_test(&self) -> impl Fn(&Vector3<f64>) -> bool + Sync + '_ {
        let inv = self.rotation().inverse();
        let kind = self.surface_kind();
        move |v| kind.contains_local(&inv.apply(v), self.theta, self.phi)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RepresentationKind {
    BBox,
    RBBox,
    Bfov,
    RBfov,
}

impl RepresentationKind {
    pub const ALL: [RepresentationKind; 4] = [Self::BBox, Self::RBBox, Self::Bfov, Self::RBfov];

    pub fn name(&self) -> &'static str {
        match self {
            Self::BBox => "bbox",
            Self::RBBox => "rbbox",
            Self::Bfov => "bfov",
            Self::RBfov => "rbfov",
        }
    }
}

/// A target location in any of the four representations.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Region {
    BBox(BBox),
    RBBox(RBBox),
    Bfov(Bfov),
}
