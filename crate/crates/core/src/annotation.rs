use crate::mask::Mask;
use crate::regions::{BBox, Bfov, RBBox};

/// Target location of one frame in every representation available.
/// Used both for ground truth and for tracker output; a `None` field means
/// the representation is absent (or the prediction is missing).
#[derive(Debug, Clone, Default, PartialEq)]
pub struct AnnotationRecord {
    pub frame: usize,
    pub bbox: Option<BBox>,
    pub rbbox: Option<RBBox>,
    pub bfov: Option<Bfov>,
    pub rbfov: Option<Bfov>,
    pub mask: Option<Mask>,
}

impl AnnotationRecord {
    pub fn empty(frame: usize) -> Self {
        Self {
            frame,
            ..Default::default()
        }
    }
}
