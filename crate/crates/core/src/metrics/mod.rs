//! Tracking and segmentation metrics, OPE aggregation and attributes.

pub mod attributes;
pub mod ope;
pub mod planar;
pub mod segmentation;
pub mod sphere;

pub use attributes::{compute_attributes, compute_attributes_from_records, AttributeFlags, FrameSummary};
pub use ope::{
    build_report, mean_summary, ope_evaluate, EvalConfig, EvalReport, EvaluatedSequence, MetricSummary,
    RepresentationMetrics, SequenceEvaluator, SequenceReport, SequenceResult, SuccessCurve,
};
pub use planar::{dual_precision, dual_success, iou_planar};
pub use segmentation::{contour_accuracy, default_contour_tolerance, region_similarity};
pub use sphere::{angle_precision, sphere_iou, sphere_iou_weighted, spherical_weights, AngleMode, SphericalWeights};
