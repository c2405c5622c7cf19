//! Geometry, tracking framework and evaluation for omnidirectional
//! (equirectangular) single-object tracking.
//!
//! * [`geom`]: ERP pixel / longitude-latitude / unit-vector conversions.
//! * [`regions`]: BBox, rBBox, BFoV, rBFoV, their image regions and mask fits.
//! * [`remap`]: search-region extraction and lifting of local predictions.
//! * [`framework`]: the tracking loop around a pluggable local tracker.
//! * [`metrics`]: dual and spherical tracking metrics, segmentation metrics,
//!   one-pass evaluation and attributes.
//! * [`dataset`]: on-disk sequences, results and reports.
//! * [`synth`]: synthetic spherical-cap sequences.

pub mod annotation;
pub mod dataset;
pub mod error;
pub mod framework;
pub mod geom;
pub mod mask;
pub mod metrics;
pub mod regions;
pub mod remap;
pub mod synth;

pub use annotation::AnnotationRecord;
pub use error::{Error, Result};
pub use geom::{ErpSize, LonLat, PixelCoord, Rotation3, UnitVec3};
pub use mask::Mask;
pub use regions::{BBox, Bfov, RBBox, Region, RepresentationKind};
pub use remap::{ErpImage, LocalImage};
