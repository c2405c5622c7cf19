//! Sequence attributes derived from ground-truth annotations.

use serde::{Deserialize, Serialize};

use crate::annotation::AnnotationRecord;
use crate::error::{Error, Result};
use crate::geom::{geodesic_angle, ErpSize};
use crate::mask::Mask;
use crate::regions::{BBox, Bfov};

pub const BORDER_BAND_PX: usize = 2;
pub const LOW_RES_AREA: f64 = 1000.0;
pub const HIGH_RES_AREA: f64 = 500.0 * 500.0;
const RATIO_RANGE: (f64, f64) = (0.5, 2.0);
const LARGE_FOV: f64 = std::f64::consts::FRAC_PI_2;
const LATITUDE_SPAN: f64 = 50.0 * std::f64::consts::PI / 180.0;
const FRIGID_LAT: f64 = 60.0 * std::f64::consts::PI / 180.0;

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub struct AttributeFlags {
    pub arc: bool,
    pub sv: bool,
    pub fm: bool,
    pub lr: bool,
    pub hr: bool,
    pub cb: bool,
    pub fms: bool,
    #[serde(rename = "LFoV")]
    pub lfov: bool,
    pub lv: bool,
    pub hl: bool,
}

impl AttributeFlags {
    pub fn entries(&self) -> [(&'static str, bool); 10] {
        [
            ("ARC", self.arc),
            ("SV", self.sv),
            ("FM", self.fm),
            ("LR", self.lr),
            ("HR", self.hr),
            ("CB", self.cb),
            ("FMS", self.fms),
            ("LFoV", self.lfov),
            ("LV", self.lv),
            ("HL", self.hl),
        ]
    }
}

/// Per-frame quantities the attribute rules need; lets callers drop masks
/// after each frame.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FrameSummary {
    pub bbox: Option<BBox>,
    pub bfov: Option<Bfov>,
    pub mask_area: Option<usize>,
    pub touches_both_bands: bool,
}

fn touches_both_bands(m: &Mask) -> bool {
    let w = m.width();
    if w < 2 * BORDER_BAND_PX {
        return !m.is_empty();
    }
    let mut left = false;
    let mut right = false;
    for (i, _) in m.iter_set() {
        left |= i < BORDER_BAND_PX;
        right |= i >= w - BORDER_BAND_PX;
        if left && right {
            return true;
        }
    }
    false
}

impl FrameSummary {
    pub fn from_record(r: &AnnotationRecord, size: ErpSize) -> Self {
        let touches = match (&r.mask, r.bbox) {
            (Some(m), _) => touches_both_bands(m),
            (None, Some(b)) => b.cx - b.w / 2.0 < 0.0 || b.cx + b.w / 2.0 > size.w(),
            (None, None) => false,
        };
        Self {
            bbox: r.bbox,
            bfov: r.bfov,
            mask_area: r.mask.as_ref().map(Mask::count),
            touches_both_bands: touches,
        }
    }

    fn area(&self) -> Option<f64> {
        self.mask_area.map(|a| a as f64).or_else(|| self.bbox.map(|b| b.area()))
    }
}

fn outside_ratio(a: f64, b: f64) -> bool {
    let r = a / b;
    r < RATIO_RANGE.0 || r > RATIO_RANGE.1
}

/// Sequence flags: each is set when its condition holds in at least one frame.
pub fn compute_attributes(frames: &[FrameSummary], size: ErpSize) -> Result<AttributeFlags> {
    if frames.is_empty() {
        return Err(Error::Empty("annotation stream"));
    }
    let mut f = AttributeFlags::default();
    let first_box = frames.iter().find_map(|s| s.bbox);
    let (mut lat_min, mut lat_max) = (f64::INFINITY, f64::NEG_INFINITY);
    let width = size.w();

    for (k, s) in frames.iter().enumerate() {
        if let (Some(b0), Some(b)) = (first_box, s.bbox) {
            f.arc |= outside_ratio(b.w / b.h, b0.w / b0.h);
            f.sv |= outside_ratio(b.area(), b0.area());
        }
        if let Some(a) = s.area() {
            f.lr |= a < LOW_RES_AREA;
            f.hr |= a > HIGH_RES_AREA;
        }
        f.cb |= s.touches_both_bands;
        if let Some(v) = s.bfov {
            f.lfov |= v.theta > LARGE_FOV || v.phi > LARGE_FOV;
            f.hl |= v.clat.abs() > FRIGID_LAT;
            lat_min = lat_min.min(v.clat);
            lat_max = lat_max.max(v.clat);
        }
        if k == 0 {
            continue;
        }
        let prev = &frames[k - 1];
        if let (Some(p), Some(b)) = (prev.bbox, s.bbox) {
            let dx = (b.cx - p.cx).rem_euclid(width);
            let dx = dx.min(width - dx);
            let dy = b.cy - p.cy;
            f.fm |= dx.hypot(dy) > (p.w * p.h).sqrt();
        }
        if let (Some(p), Some(v)) = (prev.bfov, s.bfov) {
            f.fms |= geodesic_angle(p.center(), v.center()) > p.theta.max(p.phi);
        }
    }
    f.lv = lat_max - lat_min > LATITUDE_SPAN;
    Ok(f)
}

pub fn compute_attributes_from_records(gt: &[AnnotationRecord], size: ErpSize) -> Result<AttributeFlags> {
    let frames: Vec<FrameSummary> = gt.iter().map(|r| FrameSummary::from_record(r, size)).collect();
    compute_attributes(&frames, size)
}
