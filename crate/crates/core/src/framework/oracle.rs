use super::{LocalOutput, LocalTarget, LocalTracker, TrackerUpdate};
use crate::error::Result;
use crate::mask::Mask;
use crate::remap::{sample_mask, LocalImage};

type MaskSource = Box<dyn FnMut(usize) -> Result<Mask> + Send>;

/// Reports the ground-truth mask of each frame, resampled into the current
/// search region. Isolates the framework's own geometric error.
pub struct OracleTracker {
    source: MaskSource,
    frame: usize,
}

impl OracleTracker {
    /// `source(k)` returns the ERP ground-truth mask of frame `k`.
    pub fn new(source: impl FnMut(usize) -> Result<Mask> + Send + 'static) -> Self {
        Self {
            source: Box::new(source),
            frame: 0,
        }
    }

    pub fn from_masks(masks: Vec<Mask>) -> Self {
        Self::new(move |k| Ok(masks[k].clone()))
    }
}

impl LocalTracker for OracleTracker {
    fn name(&self) -> &str {
        "oracle"
    }

    fn init(&mut self, _image: &LocalImage, _target: &LocalTarget) -> Result<()> {
        self.frame = 0;
        Ok(())
    }

    fn update(&mut self, image: &LocalImage) -> Result<TrackerUpdate> {
        self.frame += 1;
        let gt = (self.source)(self.frame)?;
        let local = sample_mask(&gt, image.grid())?;
        if local.is_empty() {
            return Ok(TrackerUpdate::Lost);
        }
        Ok(TrackerUpdate::Prediction {
            output: LocalOutput::Mask(local),
            confidence: 1.0,
        })
    }
}
