//! Synthetic ERP sequences: a shaded spherical cap moving over a noise
//! background, with exact ground truth in every representation.

use std::f64::consts::{FRAC_PI_2, PI};
use std::fmt;
use std::path::Path;
use std::str::FromStr;

use nalgebra::Vector3;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::annotation::AnnotationRecord;
use crate::dataset::{self, SequenceManifest};
use crate::error::{Error, Result};
use crate::geom::{geodesic_angle, lonlat_to_vec, pixel_to_lonlat, vec_to_lonlat, ErpSize, LonLat, PixelCoord};
use crate::mask::Mask;
use crate::metrics::attributes::compute_attributes_from_records;
use crate::regions::{mask_to_bbox, mask_to_bfov, mask_to_rbbox};
use crate::remap::ErpImage;

/// Spherical cap target and its rendering colours.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CapSpec {
    pub center: LonLat,
    pub rho: f64,
    pub color: [u8; 3],
    pub background: u8,
    pub noise: u8,
}

impl CapSpec {
    pub fn new(center: LonLat, rho: f64) -> Result<Self> {
        if !(rho > 0.0 && rho < FRAC_PI_2) {
            return Err(Error::domain(format!("cap radius {rho} outside (0, pi/2)")));
        }
        Ok(Self {
            center,
            rho,
            color: [230, 70, 40],
            background: 90,
            noise: 24,
        })
    }

    pub fn at(&self, center: LonLat) -> Self {
        Self { center, ..*self }
    }
}

/// Pixels whose centre lies within `rho` of the cap centre.
pub fn cap_mask(c: &CapSpec, size: ErpSize) -> Mask {
    let (w, h) = (size.width(), size.height());
    let lat_hi = c.center.lat + c.rho;
    let lat_lo = c.center.lat - c.rho;
    let center = c.center.to_vec().into_inner();
    let cos_rho = c.rho.cos();
    let mut data = vec![false; w * h];
    data.par_chunks_mut(w).enumerate().for_each(|(j, row)| {
        let lat = pixel_to_lonlat(PixelCoord::pixel_center(0, j), size)
            .expect("in range")
            .lat;
        // half a row of slack so boundary rows are always tested exactly
        let slack = PI / size.h();
        if lat > lat_hi + slack || lat < lat_lo - slack {
            return;
        }
        for (i, px) in row.iter_mut().enumerate() {
            let s = pixel_to_lonlat(PixelCoord::pixel_center(i, j), size).expect("in range");
            let v = s.to_vec().into_inner();
            // cheap reject well outside the radius, exact test otherwise
            if v.dot(&center) < cos_rho - 1e-3 {
                continue;
            }
            *px = geodesic_angle(s, c.center) <= c.rho;
        }
    });
    Mask::from_vec(w, h, data).expect("sized")
}

fn hash_noise(seed: u64, i: usize, j: usize) -> u64 {
    let mut z = seed ^ ((i as u64) << 32 | j as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// RGB frame with the cap drawn over a static per-pixel noise texture.
/// The cap is shaded radially so its interior also carries structure.
pub fn render_frame(c: &CapSpec, size: ErpSize, seed: u64) -> ErpImage {
    let (w, h) = (size.width(), size.height());
    let mask = cap_mask(c, size);
    let center = c.center.to_vec().into_inner();
    let amp = c.noise as i32;
    let mut data = vec![0u8; w * h * 3];
    data.par_chunks_mut(w * 3).enumerate().for_each(|(j, row)| {
        for i in 0..w {
            let px = &mut row[i * 3..i * 3 + 3];
            if mask.get(i, j) {
                let s = pixel_to_lonlat(PixelCoord::pixel_center(i, j), size).expect("in range");
                let d = s.to_vec().into_inner().dot(&center).clamp(-1.0, 1.0).acos();
                let shade = 1.0 - 0.4 * (d / c.rho).min(1.0);
                for (p, &col) in px.iter_mut().zip(&c.color) {
                    *p = (col as f64 * shade).round() as u8;
                }
            } else {
                let n = hash_noise(seed, i, j);
                for (k, p) in px.iter_mut().enumerate() {
                    let r = ((n >> (16 * k)) & 0xFFFF) as i32 % (2 * amp + 1) - amp;
                    *p = (c.background as i32 + r).clamp(0, 255) as u8;
                }
            }
        }
    });
    ErpImage::new(w, h, 3, data).expect("sized")
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TrajectoryKind {
    Static,
    GreatCircle,
    PoleCross,
    BorderCross,
}

impl TrajectoryKind {
    pub const ALL: [TrajectoryKind; 4] = [Self::Static, Self::GreatCircle, Self::PoleCross, Self::BorderCross];

    pub fn name(&self) -> &'static str {
        match self {
            Self::Static => "static",
            Self::GreatCircle => "great_circle",
            Self::PoleCross => "pole_cross",
            Self::BorderCross => "border_cross",
        }
    }
}

impl fmt::Display for TrajectoryKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for TrajectoryKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| Error::domain(format!("unknown trajectory kind {s:?}")))
    }
}

/// Per-frame cap centres.
///
/// * `static`: fixed at (0°, 0°).
/// * `border_cross`: along the equator from 150° to 210° (through the seam).
/// * `pole_cross`: meridian 0°, latitude 0° up to 85° and back.
/// * `great_circle`: a quarter turn on a great circle inclined 45° to the
///   equator, starting at (-60°, 0°).
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub kind: TrajectoryKind,
    centers: Vec<LonLat>,
}

impl Trajectory {
    pub fn new(kind: TrajectoryKind, frames: usize) -> Result<Self> {
        if frames == 0 {
            return Err(Error::domain("trajectory needs at least one frame"));
        }
        let t = |k: usize| {
            if frames == 1 {
                0.0
            } else {
                k as f64 / (frames - 1) as f64
            }
        };
        let deg = |lon: f64, lat: f64| LonLat::from_degrees(lon, lat).expect("valid");
        let centers = (0..frames)
            .map(|k| match kind {
                TrajectoryKind::Static => deg(0.0, 0.0),
                TrajectoryKind::BorderCross => deg(150.0 + 60.0 * t(k), 0.0),
                TrajectoryKind::PoleCross => deg(0.0, 85.0 * (1.0 - (2.0 * t(k) - 1.0).abs())),
                TrajectoryKind::GreatCircle => {
                    let a = lonlat_to_vec(deg(-60.0, 0.0)).into_inner();
                    let east = Vector3::new(a.z, 0.0, -a.x);
                    let north = Vector3::new(0.0, -1.0, 0.0);
                    let b = (east + north).normalize();
                    let ang = FRAC_PI_2 * t(k);
                    vec_to_lonlat(&(a * ang.cos() + b * ang.sin())).expect("unit")
                }
            })
            .collect();
        Ok(Self { kind, centers })
    }

    pub fn frames(&self) -> usize {
        self.centers.len()
    }

    pub fn center(&self, k: usize) -> LonLat {
        self.centers[k]
    }

    pub fn centers(&self) -> &[LonLat] {
        &self.centers
    }
}

/// Ground truth of one frame, derived from the rendered cap mask.
pub fn annotate(frame: usize, mask: Mask, size: ErpSize) -> Result<AnnotationRecord> {
    Ok(AnnotationRecord {
        frame,
        bbox: Some(mask_to_bbox(&mask)?),
        rbbox: Some(mask_to_rbbox(&mask)?),
        bfov: Some(mask_to_bfov(&mask, size, false)?),
        rbfov: Some(mask_to_bfov(&mask, size, true)?),
        mask: Some(mask),
    })
}

/// Renders and writes a full sequence directory, then loads it back.
pub fn generate_sequence(
    t: &Trajectory,
    c: &CapSpec,
    size: ErpSize,
    out: &Path,
    seed: u64,
) -> Result<SequenceManifest> {
    dataset::create_layout(out, true)?;
    let mut records: Vec<AnnotationRecord> = (0..t.frames())
        .into_par_iter()
        .map(|k| -> Result<AnnotationRecord> {
            let cap = c.at(t.center(k));
            let img = render_frame(&cap, size, seed);
            dataset::write_frame(&img, &dataset::frame_path(out, k))?;
            let mask = cap_mask(&cap, size);
            dataset::write_mask(&mask, &dataset::mask_path(out, k))?;
            annotate(k, mask, size)
        })
        .collect::<Result<_>>()?;
    let flags = compute_attributes_from_records(&records, size)?;
    for r in &mut records {
        r.mask = None;
    }
    dataset::write_annotations(&records, out)?;
    dataset::write_attributes(&out.join(dataset::ATTRIBUTES_FILE), &flags, None)?;
    Ok(dataset::load_sequence(out)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metrics::sphere::SphericalWeights;

    fn size() -> ErpSize {
        ErpSize::new(1920, 960).unwrap()
    }

    fn cap(lon: f64, lat: f64, rho: f64) -> CapSpec {
        CapSpec::new(LonLat::from_degrees(lon, lat).unwrap(), rho.to_radians()).unwrap()
    }

    #[test]
    fn radius_bounds() {
        let c = LonLat::from_degrees(0.0, 0.0).unwrap();
        assert!(CapSpec::new(c, 0.0).is_err());
        assert!(CapSpec::new(c, FRAC_PI_2).is_err());
        assert!(CapSpec::new(c, 0.2).is_ok());
    }

    #[test]
    fn centre_pixel_set_and_far_pixel_unset() {
        let s = size();
        // centre on a pixel centre
        let centre = pixel_to_lonlat(PixelCoord::pixel_center(700, 300), s).unwrap();
        let c = CapSpec::new(centre, 5f64.to_radians()).unwrap();
        let m = cap_mask(&c, s);
        assert!(m.get(700, 300));
        let step = PI / s.h();
        for j in 0..s.height() {
            for i in (0..s.width()).step_by(7) {
                let p = pixel_to_lonlat(PixelCoord::pixel_center(i, j), s).unwrap();
                if geodesic_angle(p, centre) >= c.rho + 2.0 * step {
                    assert!(!m.get(i, j));
                }
            }
        }
    }

    #[test]
    fn mask_matches_brute_force() {
        let s = ErpSize::new(360, 180).unwrap();
        let c = cap(170.0, 60.0, 25.0);
        let m = cap_mask(&c, s);
        for j in 0..180 {
            for i in 0..360 {
                let p = pixel_to_lonlat(PixelCoord::pixel_center(i, j), s).unwrap();
                assert_eq!(m.get(i, j), geodesic_angle(p, c.center) <= c.rho, "({i},{j})");
            }
        }
    }

    #[test]
    fn weighted_area_matches_closed_form() {
        let w = SphericalWeights::new(size());
        for rho in [5.0, 10.0, 20.0, 40.0] {
            let c = cap(33.0, -20.0, rho);
            let area = w.mask_area(&cap_mask(&c, size()));
            let exact = 2.0 * PI * (1.0 - c.rho.cos());
            assert!((area / exact - 1.0).abs() < 0.005, "rho {rho}: {area} vs {exact}");
        }
    }

    #[test]
    fn pixel_count_monotone_in_radius() {
        let s = ErpSize::new(480, 240).unwrap();
        let mut last = 0;
        for rho in [2.0, 5.0, 10.0, 20.0, 40.0, 80.0] {
            let n = cap_mask(&cap(-100.0, 30.0, rho), s).count();
            assert!(n >= last);
            last = n;
        }
    }

    #[test]
    fn bfov_recovers_cap() {
        let s = size();
        for rho in [5.0, 10.0, 20.0, 40.0] {
            for lat in [0.0, 45.0, 80.0] {
                let c = cap(60.0, lat, rho);
                let b = mask_to_bfov(&cap_mask(&c, s), s, false).unwrap();
                assert!(
                    geodesic_angle(b.center(), c.center).to_degrees() < 0.5,
                    "rho {rho} lat {lat}"
                );
                assert!(
                    (b.theta.to_degrees() - 2.0 * rho).abs() < 1.0,
                    "theta {} rho {rho} lat {lat}",
                    b.theta.to_degrees()
                );
                assert!(
                    (b.phi.to_degrees() - 2.0 * rho).abs() < 1.0,
                    "phi {} rho {rho} lat {lat}",
                    b.phi.to_degrees()
                );
            }
        }
    }

    #[test]
    fn trajectories() {
        for kind in TrajectoryKind::ALL {
            assert_eq!(kind.name().parse::<TrajectoryKind>().unwrap(), kind);
            let t = Trajectory::new(kind, 60).unwrap();
            assert_eq!(t.frames(), 60);
            assert!(t
                .centers()
                .iter()
                .all(|c| c.lat.abs() <= FRAC_PI_2 && c.lon.is_finite()));
        }
        let p = Trajectory::new(TrajectoryKind::PoleCross, 61).unwrap();
        assert!((p.center(30).lat.to_degrees() - 85.0).abs() < 1e-9);
        assert!(p.center(60).lat.abs() < 1e-12);
        let b = Trajectory::new(TrajectoryKind::BorderCross, 61).unwrap();
        assert!((b.center(30).lon.abs().to_degrees() - 180.0).abs() < 1e-9);
        let g = Trajectory::new(TrajectoryKind::GreatCircle, 11).unwrap();
        let steps: Vec<f64> = (1..11).map(|k| geodesic_angle(g.center(k - 1), g.center(k))).collect();
        assert!(steps.iter().all(|s| (s - FRAC_PI_2 / 10.0).abs() < 1e-9));
        assert!(Trajectory::new(TrajectoryKind::Static, 0).is_err());
    }

    #[test]
    fn rendering_is_deterministic() {
        let s = ErpSize::new(240, 120).unwrap();
        let c = cap(0.0, 0.0, 15.0);
        assert_eq!(render_frame(&c, s, 7), render_frame(&c, s, 7));
        assert_ne!(render_frame(&c, s, 7), render_frame(&c, s, 8));
    }

    #[test]
    fn generated_static_sequence() {
        let dir = tempfile::tempdir().unwrap();
        let s = ErpSize::new(480, 240).unwrap();
        let t = Trajectory::new(TrajectoryKind::Static, 10).unwrap();
        let m = generate_sequence(&t, &cap(0.0, 0.0, 10.0), s, dir.path(), 1).unwrap();
        assert_eq!(m.len(), 10);
        let first = m.load_mask(0).unwrap();
        for k in 1..10 {
            assert_eq!(m.load_mask(k).unwrap(), first);
        }
    }
}
