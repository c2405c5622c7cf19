//! The 360 tracking loop: extract a less-distorted search region, run a
//! local tracker on it, lift its prediction back to the sphere and move the
//! search region.

mod ncc;
mod oracle;

use std::f64::consts::{PI, TAU};

use log::debug;

pub use ncc::NccTracker;
pub use oracle::OracleTracker;

use crate::annotation::AnnotationRecord;
use crate::error::{Error, Result};
use crate::geom::ErpSize;
use crate::mask::Mask;
use crate::regions::{
    mask_to_bbox, mask_to_bfov, mask_to_rbbox, rasterize_bfov, BBox, Bfov, RBBox, Region, RepresentationKind, Surface,
};
use crate::remap::{
    default_dilation_radius, extract_region, lift_box, lift_mask, sample_mask, ErpImage, LocalImage, DEFAULT_LOCAL_SIZE,
};

/// Initial target handed to a local tracker, in local image coordinates.
#[derive(Debug, Clone, PartialEq)]
pub enum LocalTarget {
    Box(RBBox),
    Mask(Mask),
}

/// Local prediction for one frame.
#[derive(Debug, Clone, PartialEq)]
pub enum LocalOutput {
    Box(RBBox),
    Mask(Mask),
}

#[derive(Debug, Clone, PartialEq)]
pub enum TrackerUpdate {
    Prediction { output: LocalOutput, confidence: f64 },
    Lost,
}

/// Any perspective-image tracker. It only ever sees local views.
pub trait LocalTracker: Send {
    fn name(&self) -> &str;
    fn init(&mut self, image: &LocalImage, target: &LocalTarget) -> Result<()>;
    fn update(&mut self, image: &LocalImage) -> Result<TrackerUpdate>;
}

/// Sizing of the search region around the current target.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SearchPolicy {
    pub expand_factor: f64,
    pub min_fov: f64,
    pub max_theta: f64,
    pub max_phi: f64,
    pub local_size: usize,
}

impl Default for SearchPolicy {
    fn default() -> Self {
        Self {
            expand_factor: 2.0,
            min_fov: 30f64.to_radians(),
            max_theta: TAU,
            max_phi: PI,
            local_size: DEFAULT_LOCAL_SIZE,
        }
    }
}

/// Search region for the next frame: the target BFoV scaled by the expand
/// factor, clamped to the policy limits, with zero roll.
pub fn next_search_region(prev: &Bfov, policy: &SearchPolicy) -> Bfov {
    let clamp = |x: f64, hi: f64| (x * policy.expand_factor).clamp(policy.min_fov.min(hi), hi);
    Bfov::new(
        prev.clon,
        prev.clat,
        clamp(prev.theta, policy.max_theta),
        clamp(prev.phi, policy.max_phi),
        0.0,
    )
    .expect("clamped extents stay valid")
}

#[derive(Debug, Clone, PartialEq)]
pub enum InitTarget {
    Bfov(Bfov),
    Mask(Mask),
}

/// Target location for one frame in every representation.
#[derive(Debug, Clone, PartialEq)]
pub struct FrameResult {
    pub bbox: BBox,
    pub rbbox: RBBox,
    pub bfov: Bfov,
    pub rbfov: Bfov,
    pub mask: Option<Mask>,
    pub confidence: f64,
    /// Search region the frame was processed with.
    pub search: Bfov,
}

impl FrameResult {
    pub fn to_record(&self, frame: usize) -> AnnotationRecord {
        AnnotationRecord {
            frame,
            bbox: Some(self.bbox),
            rbbox: Some(self.rbbox),
            bfov: Some(self.bfov),
            rbfov: Some(self.rbfov),
            mask: self.mask.clone(),
        }
    }

    fn from_mask(mask: Mask, size: ErpSize, confidence: f64, search: Bfov) -> Result<Self> {
        Ok(Self {
            bbox: mask_to_bbox(&mask)?,
            rbbox: mask_to_rbbox(&mask)?,
            bfov: mask_to_bfov(&mask, size, false)?,
            rbfov: mask_to_bfov(&mask, size, true)?,
            mask: Some(mask),
            confidence,
            search,
        })
    }
}

fn unrolled(b: &Bfov) -> Bfov {
    Bfov { gamma: 0.0, ..*b }
}

/// Axis-aligned local box around a BFoV, from its boundary directions.
fn local_box_of(b: &Bfov, image: &LocalImage) -> Result<RBBox> {
    let grid = image.grid();
    let (mut x0, mut y0, mut x1, mut y1) = (f64::INFINITY, f64::INFINITY, f64::NEG_INFINITY, f64::NEG_INFINITY);
    let rot = b.rotation();
    let surf = Surface::new(b.surface_kind(), b.theta, b.phi, 33, 33)?;
    // edge points of the target surface, pushed through the search grid
    for a in 0..33 {
        for c in [0usize, 32] {
            for (p, q) in [(a as f64, c as f64), (c as f64, a as f64)] {
                let v = rot.apply(&surf.point(p, q));
                if let Some((x, y)) = grid.dir_to_local(&v) {
                    x0 = x0.min(x);
                    y0 = y0.min(y);
                    x1 = x1.max(x);
                    y1 = y1.max(y);
                }
            }
        }
    }
    let (w, h) = (image.width() as f64, image.height() as f64);
    let (x0, y0, x1, y1) = (x0.max(0.0), y0.max(0.0), x1.min(w), y1.min(h));
    if !(x1 > x0 && y1 > y0) {
        return Err(Error::BoxOutside);
    }
    RBBox::new((x0 + x1) / 2.0, (y0 + y1) / 2.0, x1 - x0, y1 - y0, 0.0)
}

fn lift_output(
    output: LocalOutput,
    image: &LocalImage,
    size: ErpSize,
    confidence: f64,
    search: Bfov,
) -> Result<Option<FrameResult>> {
    let grid = image.grid();
    match output {
        LocalOutput::Mask(local) => {
            let radius = default_dilation_radius(size, grid.cols());
            let mask = lift_mask(&local, grid, size, radius)?;
            if mask.is_empty() {
                return Ok(None);
            }
            FrameResult::from_mask(mask, size, confidence, search).map(Some)
        }
        LocalOutput::Box(b) => {
            let mut lifted = [None; 4];
            for (slot, kind) in lifted.iter_mut().zip(RepresentationKind::ALL) {
                match lift_box(&b, grid, kind) {
                    Ok(r) => *slot = Some(r),
                    Err(Error::BoxOutside) => return Ok(None),
                    Err(e) => return Err(e),
                }
            }
            let [Some(Region::BBox(bbox)), Some(Region::RBBox(rbbox)), Some(Region::Bfov(bfov)), Some(Region::Bfov(rbfov))] =
                lifted
            else {
                unreachable!("lift_box returns the requested kind")
            };
            Ok(Some(FrameResult {
                bbox,
                rbbox,
                bfov,
                rbfov,
                mask: None,
                confidence,
                search,
            }))
        }
    }
}

/// Runs `tracker` over a frame stream. Frame 0 echoes the initial target;
/// later frames are tracked inside the search region derived from the
/// previous result. A lost target keeps the search region and repeats the
/// previous result with confidence 0.
pub fn track_sequence<I>(
    frames: I,
    init: &InitTarget,
    tracker: &mut dyn LocalTracker,
    policy: &SearchPolicy,
) -> Result<Vec<FrameResult>>
where
    I: IntoIterator<Item = Result<ErpImage>>,
{
    let mut out = Vec::new();
    track_stream(frames, init, tracker, policy, |_, r| {
        out.push(r.clone());
        Ok(())
    })?;
    Ok(out)
}

/// Like [`track_sequence`] but hands each result to `sink` as it is produced.
pub fn track_stream<I, F>(
    frames: I,
    init: &InitTarget,
    tracker: &mut dyn LocalTracker,
    policy: &SearchPolicy,
    mut sink: F,
) -> Result<usize>
where
    I: IntoIterator<Item = Result<ErpImage>>,
    F: FnMut(usize, &FrameResult) -> Result<()>,
{
    let mut frames = frames.into_iter();
    let first = frames.next().ok_or(Error::Empty("frame stream"))??;
    let size = first.size();
    let n = policy.local_size;

    let mut current = match init {
        InitTarget::Bfov(b) => {
            let region = rasterize_bfov(b, size);
            FrameResult {
                bbox: mask_to_bbox(&region)?,
                rbbox: mask_to_rbbox(&region)?,
                bfov: unrolled(b),
                rbfov: *b,
                mask: None,
                confidence: 1.0,
                search: next_search_region(b, policy),
            }
        }
        InitTarget::Mask(m) => {
            let bfov = mask_to_bfov(m, size, false)?;
            FrameResult::from_mask(m.clone(), size, 1.0, next_search_region(&bfov, policy))?
        }
    };
    let local = extract_region(&first, &current.search, n, n)?;
    let target = match init {
        InitTarget::Bfov(b) => LocalTarget::Box(local_box_of(b, &local)?),
        InitTarget::Mask(m) => LocalTarget::Mask(sample_mask(m, local.grid())?),
    };
    tracker.init(&local, &target)?;
    sink(0, &current)?;

    let mut search = next_search_region(&current.bfov, policy);
    let mut count = 1;
    for (k, frame) in frames.enumerate() {
        let k = k + 1;
        let frame = frame?;
        if frame.size() != size {
            return Err(Error::DimensionMismatch {
                expected: (size.width(), size.height()),
                found: (frame.width(), frame.height()),
            });
        }
        let local = extract_region(&frame, &search, n, n)?;
        let lifted = match tracker.update(&local)? {
            TrackerUpdate::Prediction { output, confidence } => lift_output(output, &local, size, confidence, search)?,
            TrackerUpdate::Lost => None,
        };
        match lifted {
            Some(r) => {
                search = next_search_region(&r.bfov, policy);
                current = r;
            }
            None => {
                debug!("frame {k}: target lost, keeping search region");
                current = FrameResult {
                    confidence: 0.0,
                    search,
                    ..current
                };
            }
        }
        sink(k, &current)?;
        count += 1;
    }
    Ok(count)
}
