//! Spherical camera model for equirectangular (ERP) frames.
//!
//! Conventions: longitude grows to the right of the image, latitude grows
//! upwards, and the camera frame has `z` on the optical axis (image centre),
//! `x` to the right and `y` pointing down.

use std::f64::consts::{FRAC_PI_2, PI, TAU};

use nalgebra::{Matrix3, Vector3};

use crate::error::{Error, Result};

/// Wraps an angle into `[-pi, pi)`.
pub fn wrap_angle(a: f64) -> f64 {
    let w = a - TAU * ((a + PI) / TAU).floor();
    if w >= PI {
        w - TAU
    } else {
        w
    }
}

/// Wraps `x` into `[0, period)`.
pub fn wrap_mod(x: f64, period: f64) -> f64 {
    let w = x.rem_euclid(period);
    if w >= period {
        0.0
    } else {
        w
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LonLat {
    pub lon: f64,
    pub lat: f64,
}

impl LonLat {
    /// Longitude is normalized into `[-pi, pi)`; latitude outside
    /// `[-pi/2, pi/2]` is rejected.
    pub fn new(lon: f64, lat: f64) -> Result<Self> {
        if !lon.is_finite() || !lat.is_finite() {
            return Err(Error::domain("non-finite lon/lat"));
        }
        if lat.abs() > FRAC_PI_2 {
            return Err(Error::domain(format!("latitude {lat} outside [-pi/2, pi/2]")));
        }
        Ok(Self {
            lon: wrap_angle(lon),
            lat,
        })
    }

    pub fn from_degrees(lon: f64, lat: f64) -> Result<Self> {
        Self::new(lon.to_radians(), lat.to_radians())
    }

    pub fn to_vec(self) -> UnitVec3 {
        lonlat_to_vec(self)
    }
}

/// Continuous ERP pixel coordinate. Pixel `(i, j)` covers `[i, i+1) x [j, j+1)`
/// and is sampled at its centre `(i + 0.5, j + 0.5)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PixelCoord {
    pub u: f64,
    pub v: f64,
}

impl PixelCoord {
    pub fn new(u: f64, v: f64) -> Self {
        Self { u, v }
    }

    pub fn pixel_center(i: usize, j: usize) -> Self {
        Self {
            u: i as f64 + 0.5,
            v: j as f64 + 0.5,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UnitVec3(Vector3<f64>);

impl UnitVec3 {
    /// Normalizes `v`; fails on a (near) zero vector.
    pub fn new_normalize(v: Vector3<f64>) -> Result<Self> {
        let n = v.norm();
        if !(n > 1e-300) || !n.is_finite() {
            return Err(Error::domain("zero or non-finite direction vector"));
        }
        Ok(Self(v / n))
    }

    pub(crate) fn new_unchecked(v: Vector3<f64>) -> Self {
        Self(v)
    }

    pub fn x(&self) -> f64 {
        self.0.x
    }
    pub fn y(&self) -> f64 {
        self.0.y
    }
    pub fn z(&self) -> f64 {
        self.0.z
    }

    pub fn as_vector(&self) -> &Vector3<f64> {
        &self.0
    }

    pub fn into_inner(self) -> Vector3<f64> {
        self.0
    }
}

/// Proper rotation of the unit sphere.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Rotation3(Matrix3<f64>);

impl Rotation3 {
    pub fn identity() -> Self {
        Self(Matrix3::identity())
    }

    pub fn matrix(&self) -> &Matrix3<f64> {
        &self.0
    }

    pub fn inverse(&self) -> Self {
        Self(self.0.transpose())
    }

    pub fn apply(&self, v: &Vector3<f64>) -> Vector3<f64> {
        self.0 * v
    }

    /// Rotates a unit vector; the result is unit up to rounding.
    pub fn rotate(&self, v: UnitVec3) -> UnitVec3 {
        UnitVec3(self.0 * v.0)
    }
}

impl std::ops::Mul for Rotation3 {
    type Output = Rotation3;
    fn mul(self, rhs: Self) -> Self {
        Self(self.0 * rhs.0)
    }
}

/// ERP raster size. Width is always twice the height.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct ErpSize {
    width: usize,
    height: usize,
}

impl ErpSize {
    pub fn new(width: usize, height: usize) -> Result<Self> {
        if width < 2 || width != 2 * height {
            return Err(Error::domain(format!(
                "ERP size {width}x{height} must satisfy W = 2H, W >= 2"
            )));
        }
        Ok(Self { width, height })
    }

    pub fn from_height(height: usize) -> Result<Self> {
        Self::new(2 * height, height)
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn w(&self) -> f64 {
        self.width as f64
    }

    pub fn h(&self) -> f64 {
        self.height as f64
    }

    pub fn pixel_count(&self) -> usize {
        self.width * self.height
    }
}

impl std::fmt::Display for ErpSize {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}x{}", self.width, self.height)
    }
}

impl std::str::FromStr for ErpSize {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (w, h) = s
            .split_once(['x', 'X'])
            .ok_or_else(|| Error::domain(format!("expected WxH, got {s:?}")))?;
        let parse = |t: &str| {
            t.trim()
                .parse::<usize>()
                .map_err(|_| Error::domain(format!("bad raster dimension {t:?}")))
        };
        ErpSize::new(parse(w)?, parse(h)?)
    }
}

/// `u` wraps modulo W; `v` must lie in `[0, H]`.
pub fn pixel_to_lonlat(p: PixelCoord, size: ErpSize) -> Result<LonLat> {
    if !p.u.is_finite() || !p.v.is_finite() {
        return Err(Error::domain("non-finite pixel coordinate"));
    }
    if p.v < 0.0 || p.v > size.h() {
        return Err(Error::domain(format!("v = {} outside [0, {}]", p.v, size.height())));
    }
    let u = wrap_mod(p.u, size.w());
    let lon = (u / size.w() - 0.5) * TAU;
    let lat = (0.5 - p.v / size.h()) * PI;
    Ok(LonLat {
        lon: wrap_angle(lon),
        lat: lat.clamp(-FRAC_PI_2, FRAC_PI_2),
    })
}

pub fn lonlat_to_pixel(s: LonLat, size: ErpSize) -> PixelCoord {
    let u = (s.lon / TAU + 0.5) * size.w();
    let v = (-s.lat / PI + 0.5) * size.h();
    PixelCoord {
        u: wrap_mod(u, size.w()),
        v,
    }
}

/// Projects a direction straight to ERP pixels. A zero vector maps to the
/// image centre.
pub fn vec_to_pixel(v: &Vector3<f64>, size: ErpSize) -> PixelCoord {
    let s = vec_to_lonlat(v).unwrap_or(LonLat { lon: 0.0, lat: 0.0 });
    lonlat_to_pixel(s, size)
}

pub fn lonlat_to_vec(s: LonLat) -> UnitVec3 {
    let (slon, clon) = s.lon.sin_cos();
    let (slat, clat) = s.lat.sin_cos();
    UnitVec3(Vector3::new(clat * slon, -slat, clat * clon))
}

/// Inverse of [`lonlat_to_vec`]. Longitude is pinned to 0 at the poles.
pub fn vec_to_lonlat(v: &Vector3<f64>) -> Result<LonLat> {
    let n = v.norm();
    if !(n > 1e-300) || !n.is_finite() {
        return Err(Error::domain("zero or non-finite direction vector"));
    }
    let (x, y, z) = (v.x / n, v.y / n, v.z / n);
    let horiz = x.hypot(z);
    let lon = if horiz < 1e-15 { 0.0 } else { x.atan2(z) };
    let lat = (-y).atan2(horiz);
    Ok(LonLat {
        lon: wrap_angle(lon),
        lat,
    })
}

pub fn rot_y(a: f64) -> Rotation3 {
    let (s, c) = a.sin_cos();
    Rotation3(Matrix3::new(c, 0.0, s, 0.0, 1.0, 0.0, -s, 0.0, c))
}

pub fn rot_x(a: f64) -> Rotation3 {
    let (s, c) = a.sin_cos();
    Rotation3(Matrix3::new(1.0, 0.0, 0.0, 0.0, c, -s, 0.0, s, c))
}

pub fn rot_z(a: f64) -> Rotation3 {
    let (s, c) = a.sin_cos();
    Rotation3(Matrix3::new(c, -s, 0.0, s, c, 0.0, 0.0, 0.0, 1.0))
}

/// `R_y(clon) * R_x(clat) * R_z(gamma)`: maps the local viewport frame
/// (optical axis `+z`) onto the sphere so that `+z` lands on `(clon, clat)`.
pub fn bfov_rotation(clon: f64, clat: f64, gamma: f64) -> Rotation3 {
    rot_y(clon) * rot_x(clat) * rot_z(gamma)
}

/// Central angle between two directions, in `[0, pi]`.
///
/// Evaluated as `atan2(|a x b|, a . b)`, which equals
/// `acos(clamp(a . b))` but keeps full precision for nearly (anti)parallel
/// vectors and returns exactly zero for identical inputs.
pub fn geodesic_angle(a: LonLat, b: LonLat) -> f64 {
    angle_between(lonlat_to_vec(a).as_vector(), lonlat_to_vec(b).as_vector())
}

pub fn angle_between(a: &Vector3<f64>, b: &Vector3<f64>) -> f64 {
    a.cross(b).norm().atan2(a.dot(b))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    const EPS: f64 = 1e-12;

    fn size4k() -> ErpSize {
        ErpSize::new(3840, 1920).unwrap()
    }

    fn assert_vec(v: UnitVec3, e: [f64; 3]) {
        assert!((v.x() - e[0]).abs() < EPS, "{v:?} vs {e:?}");
        assert!((v.y() - e[1]).abs() < EPS, "{v:?} vs {e:?}");
        assert!((v.z() - e[2]).abs() < EPS, "{v:?} vs {e:?}");
    }

    #[test]
    fn erp_size_validation() {
        assert!(ErpSize::new(1000, 600).is_err());
        assert!(ErpSize::new(0, 0).is_err());
        assert!(ErpSize::new(2, 1).is_ok());
        assert_eq!("1920x960".parse::<ErpSize>().unwrap(), ErpSize::new(1920, 960).unwrap());
        assert!("1920x961".parse::<ErpSize>().is_err());
    }

    #[test]
    fn lonlat_normalization() {
        let s = LonLat::new(PI, 0.0).unwrap();
        assert_eq!(s.lon, -PI);
        let s = LonLat::new(3.0 * PI + 0.25, 0.1).unwrap();
        assert!((s.lon - (-PI + 0.25)).abs() < 1e-12);
        assert!(LonLat::new(0.0, FRAC_PI_2 + 1e-9).is_err());
        assert!(LonLat::new(f64::NAN, 0.0).is_err());
    }

    #[test]
    fn pixel_to_lonlat_examples() {
        let s = pixel_to_lonlat(PixelCoord::new(1920.0, 960.0), size4k()).unwrap();
        assert!(s.lon.abs() < EPS && s.lat.abs() < EPS);
        let s = pixel_to_lonlat(PixelCoord::new(0.0, 0.0), size4k()).unwrap();
        assert!((s.lon + PI).abs() < EPS && (s.lat - FRAC_PI_2).abs() < EPS);
        let s = pixel_to_lonlat(PixelCoord::new(2880.0, 480.0), size4k()).unwrap();
        assert!((s.lon - FRAC_PI_2).abs() < EPS && (s.lat - PI / 4.0).abs() < EPS);
        assert!(pixel_to_lonlat(PixelCoord::new(10.0, -0.5), size4k()).is_err());
        assert!(pixel_to_lonlat(PixelCoord::new(10.0, 1920.5), size4k()).is_err());
    }

    #[test]
    fn lonlat_to_pixel_examples() {
        let p = lonlat_to_pixel(LonLat::new(0.0, 0.0).unwrap(), size4k());
        assert_eq!((p.u, p.v), (1920.0, 960.0));
        let p = lonlat_to_pixel(LonLat::new(-PI, FRAC_PI_2).unwrap(), size4k());
        assert!(p.u.abs() < EPS && p.v.abs() < EPS);
    }

    #[test]
    fn lonlat_to_vec_examples() {
        assert_vec(lonlat_to_vec(LonLat::new(0.0, 0.0).unwrap()), [0.0, 0.0, 1.0]);
        assert_vec(lonlat_to_vec(LonLat::new(FRAC_PI_2, 0.0).unwrap()), [1.0, 0.0, 0.0]);
        assert_vec(lonlat_to_vec(LonLat::new(0.0, FRAC_PI_2).unwrap()), [0.0, -1.0, 0.0]);
    }

    #[test]
    fn vec_to_lonlat_examples() {
        let s = vec_to_lonlat(&Vector3::new(0.0, 0.0, 1.0)).unwrap();
        assert_eq!((s.lon, s.lat), (0.0, 0.0));
        let s = vec_to_lonlat(&Vector3::new(0.0, 0.0, -1.0)).unwrap();
        assert_eq!(s.lon, -PI);
        assert!(s.lat.abs() < EPS);
        let s = vec_to_lonlat(&Vector3::new(0.0, -1.0, 0.0)).unwrap();
        assert_eq!(s.lon, 0.0);
        assert!((s.lat - FRAC_PI_2).abs() < EPS);
        // not unit: renormalized
        let s = vec_to_lonlat(&Vector3::new(0.0, 0.0, 5.0)).unwrap();
        assert_eq!((s.lon, s.lat), (0.0, 0.0));
        assert!(vec_to_lonlat(&Vector3::zeros()).is_err());
    }

    #[test]
    fn bfov_rotation_examples() {
        let r = bfov_rotation(0.0, 0.0, 0.0);
        assert!((r.matrix() - Matrix3::identity()).norm() < EPS);
        let v = bfov_rotation(FRAC_PI_2, 0.0, 0.0).apply(&Vector3::z());
        assert!((v - Vector3::x()).norm() < EPS);
        let v = bfov_rotation(0.0, 0.0, FRAC_PI_2).apply(&Vector3::x());
        assert!((v - Vector3::y()).norm() < EPS);
    }

    #[test]
    fn bfov_rotation_points_axis_at_center() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..1000 {
            let lon = rng.gen_range(-PI..PI);
            let lat = rng.gen_range(-FRAC_PI_2..FRAC_PI_2);
            let g = rng.gen_range(-PI..PI);
            let v = bfov_rotation(lon, lat, g).apply(&Vector3::z());
            let e = lonlat_to_vec(LonLat::new(lon, lat).unwrap());
            assert!((v - e.as_vector()).norm() < 1e-12);
        }
    }

    #[test]
    fn bfov_rotation_is_orthonormal() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..10_000 {
            let r = bfov_rotation(
                rng.gen_range(-10.0..10.0),
                rng.gen_range(-10.0..10.0),
                rng.gen_range(-10.0..10.0),
            );
            let m = r.matrix();
            assert!((m.transpose() * m - Matrix3::identity()).abs().max() < 1e-10);
            assert!((m.determinant() - 1.0).abs() < 1e-10);
        }
    }

    #[test]
    fn geodesic_examples() {
        let a = LonLat::new(0.3, 0.2).unwrap();
        assert_eq!(geodesic_angle(a, a), 0.0);
        let d = geodesic_angle(LonLat::new(0.0, 0.0).unwrap(), LonLat::new(FRAC_PI_2, 0.0).unwrap());
        assert!((d - FRAC_PI_2).abs() < EPS);
        // law of cosines: cos s = sin^2(89) - cos^2(89) = cos(2 deg)
        let d = geodesic_angle(
            LonLat::from_degrees(0.0, 89.0).unwrap(),
            LonLat::from_degrees(180.0, 89.0).unwrap(),
        );
        let oracle = (89f64.to_radians().sin().powi(2) - 89f64.to_radians().cos().powi(2)).acos();
        assert!((d - oracle).abs() < 1e-9);
        assert!((d.to_degrees() - 2.0).abs() < 1e-9);
    }

    #[test]
    fn geodesic_properties() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let mut sample = || LonLat::new(rng.gen_range(-PI..PI), rng.gen_range(-FRAC_PI_2..FRAC_PI_2)).unwrap();
        for _ in 0..10_000 {
            let (a, b, c) = (sample(), sample(), sample());
            let ab = geodesic_angle(a, b);
            assert!((ab - geodesic_angle(b, a)).abs() < 1e-15);
            assert!((0.0..=PI).contains(&ab));
            assert!(ab <= geodesic_angle(a, c) + geodesic_angle(c, b) + 1e-9);
        }
    }

    #[test]
    fn geodesic_on_equator_is_wrapped_lon_difference() {
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        for _ in 0..10_000 {
            let l1 = rng.gen_range(-PI..PI);
            let l2 = rng.gen_range(-PI..PI);
            let d = geodesic_angle(LonLat::new(l1, 0.0).unwrap(), LonLat::new(l2, 0.0).unwrap());
            let expected = wrap_angle(l1 - l2).abs();
            assert!((d - expected).abs() < 1e-9, "{l1} {l2}");
        }
    }

    #[test]
    fn round_trips() {
        let size = size4k();
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        for _ in 0..100_000 {
            let s = LonLat::new(rng.gen_range(-PI..PI), rng.gen_range(-FRAC_PI_2..FRAC_PI_2)).unwrap();
            let back = pixel_to_lonlat(lonlat_to_pixel(s, size), size).unwrap();
            assert!(wrap_angle(back.lon - s.lon).abs() < 1e-9);
            assert!((back.lat - s.lat).abs() < 1e-9);
            let back = vec_to_lonlat(lonlat_to_vec(s).as_vector()).unwrap();
            assert!(wrap_angle(back.lon - s.lon).abs() < 1e-9);
            assert!((back.lat - s.lat).abs() < 1e-9);
        }
    }
}
