//! One-pass evaluation: per-frame scoring, threshold curves and
//! aggregation over sequences.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::attributes::AttributeFlags;
use super::planar::{dual_precision, dual_success};
use super::segmentation::{contour_accuracy, default_contour_tolerance, region_similarity};
use super::sphere::{angle_precision, sphere_iou_weighted, AngleMode, SphericalWeights};
use crate::annotation::AnnotationRecord;
use crate::error::{Error, Result};
use crate::geom::{pixel_to_lonlat, ErpSize, LonLat, PixelCoord};
use crate::mask::Mask;
use crate::regions::{RBBox, RepresentationKind};

pub const REPORT_SCHEMA: u32 = 1;
pub const PRECISION_RANK_PX: f64 = 20.0;
pub const ANGLE_RANK_DEG: f64 = 3.0;
/// Slack on threshold comparisons so exact matches survive float rounding
/// (e.g. polygon clipping of identical rotated boxes).
const THRESHOLD_EPS: f64 = 1e-9;

/// Sampled threshold grid and the fraction of frames passing each threshold.
#[derive(Debug, Clone, PartialEq)]
pub struct SuccessCurve {
    pub thresholds: Vec<f64>,
    pub rates: Vec<f64>,
    pub auc: f64,
}

fn grid(count: usize, step: f64) -> Vec<f64> {
    (0..count).map(|i| i as f64 * step).collect()
}

impl SuccessCurve {
    fn build(thresholds: Vec<f64>, pass: impl Fn(f64) -> usize, n: usize) -> Self {
        let rates: Vec<f64> = thresholds
            .iter()
            .map(|&t| if n == 0 { 0.0 } else { pass(t) as f64 / n as f64 })
            .collect();
        let auc = rates.iter().sum::<f64>() / rates.len() as f64;
        Self { thresholds, rates, auc }
    }

    /// Overlap thresholds `0:0.01:1`. A frame passes when its overlap is
    /// non-zero and at least the threshold.
    pub fn success(overlaps: &[f64]) -> Self {
        let pass = |t: f64| overlaps.iter().filter(|&&o| o > 0.0 && o >= t - THRESHOLD_EPS).count();
        Self::build(grid(101, 0.01), pass, overlaps.len())
    }

    fn within(distances: &[f64], thresholds: Vec<f64>) -> Self {
        let pass = |t: f64| distances.iter().filter(|&&d| d <= t + THRESHOLD_EPS).count();
        Self::build(thresholds, pass, distances.len())
    }

    /// Pixel thresholds `0:1:50`.
    pub fn precision(distances: &[f64]) -> Self {
        Self::within(distances, grid(51, 1.0))
    }

    /// Normalized-distance thresholds `0:0.01:0.5`.
    pub fn normalized_precision(distances: &[f64]) -> Self {
        Self::within(distances, grid(51, 0.01))
    }

    /// Degree thresholds `0:0.1:20`.
    pub fn angle(distances: &[f64]) -> Self {
        Self::within(distances, grid(201, 0.1))
    }

    pub fn rate_at(&self, threshold: f64) -> f64 {
        self.thresholds
            .iter()
            .position(|&t| (t - threshold).abs() < 1e-9)
            .map(|k| self.rates[k])
            .unwrap_or(f64::NAN)
    }

    pub fn samples(&self) -> Vec<[f64; 2]> {
        self.thresholds.iter().zip(&self.rates).map(|(&t, &r)| [t, r]).collect()
    }
}

#[derive(Debug, Clone)]
pub struct EvalConfig {
    pub size: ErpSize,
    /// Raster used for spherical IoU of BFoV regions.
    pub raster: ErpSize,
    pub contour_tol: usize,
    pub masks: bool,
    pub angle_mode: AngleMode,
}

impl EvalConfig {
    pub fn new(size: ErpSize) -> Self {
        Self {
            size,
            raster: ErpSize::new(1920, 960).expect("valid"),
            contour_tol: default_contour_tolerance(size),
            masks: true,
            angle_mode: AngleMode::Geodesic,
        }
    }
}

#[derive(Debug, Default, Clone)]
struct PlanarScores {
    overlap: Vec<f64>,
    distance: Vec<f64>,
    normalized: Vec<f64>,
    angle: Vec<f64>,
}

#[derive(Debug, Default, Clone)]
struct SphereScores {
    overlap: Vec<f64>,
    angle: Vec<f64>,
}

#[derive(Debug, Default, Clone)]
struct MaskScores {
    j: Vec<f64>,
    f: Vec<f64>,
    j_sphere: Vec<f64>,
    f_sphere: Vec<f64>,
}

/// Streaming per-sequence scorer. Frames are pushed in order; the first
/// pushed frame is the initialization frame and is not scored.
pub struct SequenceEvaluator<'a> {
    cfg: &'a EvalConfig,
    frame_weights: SphericalWeights,
    raster_weights: SphericalWeights,
    pushed: usize,
    bbox: PlanarScores,
    rbbox: PlanarScores,
    bfov: SphereScores,
    rbfov: SphereScores,
    masks: MaskScores,
}

fn center_lonlat(p: PixelCoord, size: ErpSize) -> LonLat {
    let v = p.v.clamp(0.0, size.h());
    pixel_to_lonlat(PixelCoord::new(p.u, v), size).expect("clamped")
}

impl<'a> SequenceEvaluator<'a> {
    pub fn new(cfg: &'a EvalConfig) -> Self {
        Self {
            cfg,
            frame_weights: SphericalWeights::new(cfg.size),
            raster_weights: SphericalWeights::new(cfg.raster),
            pushed: 0,
            bbox: PlanarScores::default(),
            rbbox: PlanarScores::default(),
            bfov: SphereScores::default(),
            rbfov: SphereScores::default(),
            masks: MaskScores::default(),
        }
    }

    fn score_planar(&self, out: &mut PlanarScores, gt: Option<RBBox>, tr: Option<RBBox>) {
        let Some(gt) = gt else { return };
        let size = self.cfg.size;
        match tr {
            Some(tr) => {
                let gc = PixelCoord::new(gt.cx, gt.cy);
                let tc = PixelCoord::new(tr.cx, tr.cy);
                out.overlap.push(dual_success(&gt, &tr, size));
                out.distance
                    .push(dual_precision(gc, tc, size, None, false).expect("plain"));
                out.normalized
                    .push(dual_precision(gc, tc, size, Some((gt.w, gt.h)), true).expect("valid gt"));
                out.angle.push(angle_precision(
                    center_lonlat(gc, size),
                    center_lonlat(tc, size),
                    self.cfg.angle_mode,
                ));
            }
            None => {
                out.overlap.push(0.0);
                out.distance.push(f64::INFINITY);
                out.normalized.push(f64::INFINITY);
                out.angle.push(f64::INFINITY);
            }
        }
    }

    pub fn push(&mut self, gt: &AnnotationRecord, tr: &AnnotationRecord) -> Result<()> {
        self.pushed += 1;
        if self.pushed == 1 {
            return Ok(());
        }
        let mut bbox = std::mem::take(&mut self.bbox);
        self.score_planar(&mut bbox, gt.bbox.map(RBBox::from), tr.bbox.map(RBBox::from));
        self.bbox = bbox;
        let mut rbbox = std::mem::take(&mut self.rbbox);
        self.score_planar(&mut rbbox, gt.rbbox, tr.rbbox);
        self.rbbox = rbbox;

        for (slot, g, t) in [(0, gt.bfov, tr.bfov), (1, gt.rbfov, tr.rbfov)] {
            let Some(g) = g else { continue };
            let (o, a) = match t {
                Some(t) => (
                    sphere_iou_weighted(&g, &t, &self.raster_weights),
                    angle_precision(g.center(), t.center(), self.cfg.angle_mode),
                ),
                None => (0.0, f64::INFINITY),
            };
            let s = if slot == 0 { &mut self.bfov } else { &mut self.rbfov };
            s.overlap.push(o);
            s.angle.push(a);
        }

        if self.cfg.masks {
            if let Some(g) = &gt.mask {
                let empty;
                let t = match &tr.mask {
                    Some(t) => t,
                    None => {
                        empty = Mask::new(g.width(), g.height());
                        &empty
                    }
                };
                let w = Some(&self.frame_weights);
                let tol = self.cfg.contour_tol;
                self.masks.j.push(region_similarity(g, t, None)?);
                self.masks.j_sphere.push(region_similarity(g, t, w)?);
                self.masks.f.push(contour_accuracy(g, t, None, tol)?);
                self.masks.f_sphere.push(contour_accuracy(g, t, w, tol)?);
            }
        }
        Ok(())
    }

    pub fn finish(self) -> SequenceResult {
        let planar = |s: &PlanarScores| {
            (!s.overlap.is_empty()).then(|| PlanarCurves {
                success: SuccessCurve::success(&s.overlap),
                precision: SuccessCurve::precision(&s.distance),
                normalized: SuccessCurve::normalized_precision(&s.normalized),
                angle: SuccessCurve::angle(&s.angle),
            })
        };
        let sphere = |s: &SphereScores| {
            (!s.overlap.is_empty()).then(|| SphereCurves {
                success: SuccessCurve::success(&s.overlap),
                angle: SuccessCurve::angle(&s.angle),
            })
        };
        let mean = |v: &[f64]| (!v.is_empty()).then(|| v.iter().sum::<f64>() / v.len() as f64);
        SequenceResult {
            scored_frames: self.pushed.saturating_sub(1),
            bbox: planar(&self.bbox),
            rbbox: planar(&self.rbbox),
            bfov: sphere(&self.bfov),
            rbfov: sphere(&self.rbfov),
            j: mean(&self.masks.j),
            f: mean(&self.masks.f),
            j_sphere: mean(&self.masks.j_sphere),
            f_sphere: mean(&self.masks.f_sphere),
        }
    }
}

#[derive(Debug, Clone)]
pub struct PlanarCurves {
    pub success: SuccessCurve,
    pub precision: SuccessCurve,
    pub normalized: SuccessCurve,
    pub angle: SuccessCurve,
}

#[derive(Debug, Clone)]
pub struct SphereCurves {
    pub success: SuccessCurve,
    pub angle: SuccessCurve,
}

/// Curves and per-frame means of one evaluated sequence.
#[derive(Debug, Clone)]
pub struct SequenceResult {
    pub scored_frames: usize,
    pub bbox: Option<PlanarCurves>,
    pub rbbox: Option<PlanarCurves>,
    pub bfov: Option<SphereCurves>,
    pub rbfov: Option<SphereCurves>,
    pub j: Option<f64>,
    pub f: Option<f64>,
    pub j_sphere: Option<f64>,
    pub f_sphere: Option<f64>,
}

impl SequenceResult {
    pub fn summary(&self) -> MetricSummary {
        let planar = |c: &Option<PlanarCurves>| {
            c.as_ref().map(|c| RepresentationMetrics {
                success_auc: Some(c.success.auc),
                precision_20: Some(c.precision.rate_at(PRECISION_RANK_PX)),
                norm_precision_auc: Some(c.normalized.auc),
                angle_3: Some(c.angle.rate_at(ANGLE_RANK_DEG)),
            })
        };
        let sphere = |c: &Option<SphereCurves>| {
            c.as_ref().map(|c| RepresentationMetrics {
                success_auc: Some(c.success.auc),
                precision_20: None,
                norm_precision_auc: None,
                angle_3: Some(c.angle.rate_at(ANGLE_RANK_DEG)),
            })
        };
        let mut reps = BTreeMap::new();
        for (kind, m) in [
            (RepresentationKind::BBox, planar(&self.bbox)),
            (RepresentationKind::RBBox, planar(&self.rbbox)),
            (RepresentationKind::Bfov, sphere(&self.bfov)),
            (RepresentationKind::RBfov, sphere(&self.rbfov)),
        ] {
            if let Some(m) = m {
                reps.insert(kind.name().to_string(), m);
            }
        }
        let bbox = reps.get("bbox").cloned();
        let bfov = reps.get("bfov").cloned();
        MetricSummary {
            s_dual_auc: bbox.as_ref().and_then(|m| m.success_auc),
            p_dual_20: bbox.as_ref().and_then(|m| m.precision_20),
            pnorm_dual_auc: bbox.as_ref().and_then(|m| m.norm_precision_auc),
            p_angle_3: bfov
                .as_ref()
                .and_then(|m| m.angle_3)
                .or_else(|| bbox.as_ref().and_then(|m| m.angle_3)),
            s_sphere_auc: bfov.as_ref().and_then(|m| m.success_auc),
            j: self.j,
            f: self.f,
            j_sphere: self.j_sphere,
            f_sphere: self.f_sphere,
            representations: reps,
        }
    }

    /// Curve samples keyed by metric name; the unprefixed keys refer to the
    /// BBox (planar) and BFoV (spherical) representations.
    pub fn curves(&self) -> BTreeMap<String, SuccessCurve> {
        let mut out = BTreeMap::new();
        let mut put_planar = |prefix: &str, c: &Option<PlanarCurves>| {
            if let Some(c) = c {
                out.insert(format!("{prefix}S_dual"), c.success.clone());
                out.insert(format!("{prefix}P_dual"), c.precision.clone());
                out.insert(format!("{prefix}Pnorm_dual"), c.normalized.clone());
                out.insert(format!("{prefix}P_angle"), c.angle.clone());
            }
        };
        put_planar("bbox.", &self.bbox);
        put_planar("rbbox.", &self.rbbox);
        for (prefix, c) in [("bfov.", &self.bfov), ("rbfov.", &self.rbfov)] {
            if let Some(c) = c {
                out.insert(format!("{prefix}S_sphere"), c.success.clone());
                out.insert(format!("{prefix}P_angle"), c.angle.clone());
            }
        }
        for (alias, key) in [
            ("S_dual", "bbox.S_dual"),
            ("P_dual", "bbox.P_dual"),
            ("Pnorm_dual", "bbox.Pnorm_dual"),
            ("S_sphere", "bfov.S_sphere"),
        ] {
            if let Some(c) = out.get(key).cloned() {
                out.insert(alias.to_string(), c);
            }
        }
        if let Some(c) = out.get("bfov.P_angle").or_else(|| out.get("bbox.P_angle")).cloned() {
            out.insert("P_angle".to_string(), c);
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RepresentationMetrics {
    pub success_auc: Option<f64>,
    pub precision_20: Option<f64>,
    pub norm_precision_auc: Option<f64>,
    pub angle_3: Option<f64>,
}

/// Ranking values of one sequence, or their mean over sequences.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricSummary {
    #[serde(rename = "S_dual_auc")]
    pub s_dual_auc: Option<f64>,
    #[serde(rename = "P_dual_20")]
    pub p_dual_20: Option<f64>,
    #[serde(rename = "Pnorm_dual_auc")]
    pub pnorm_dual_auc: Option<f64>,
    #[serde(rename = "P_angle_3")]
    pub p_angle_3: Option<f64>,
    #[serde(rename = "S_sphere_auc")]
    pub s_sphere_auc: Option<f64>,
    #[serde(rename = "J")]
    pub j: Option<f64>,
    #[serde(rename = "F")]
    pub f: Option<f64>,
    #[serde(rename = "J_sphere")]
    pub j_sphere: Option<f64>,
    #[serde(rename = "F_sphere")]
    pub f_sphere: Option<f64>,
    pub representations: BTreeMap<String, RepresentationMetrics>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SequenceReport {
    pub frames: usize,
    pub metrics: MetricSummary,
    pub attributes: Option<AttributeFlags>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub schema: u32,
    pub tracker: String,
    pub raster: String,
    pub per_sequence: BTreeMap<String, SequenceReport>,
    pub aggregate: MetricSummary,
    /// Mean metrics over the sequences carrying each attribute.
    pub by_attribute: BTreeMap<String, MetricSummary>,
    pub curves: BTreeMap<String, Vec<[f64; 2]>>,
}

fn mean_opt(values: impl Iterator<Item = Option<f64>>) -> Option<f64> {
    let v: Vec<f64> = values.flatten().collect();
    (!v.is_empty()).then(|| v.iter().sum::<f64>() / v.len() as f64)
}

/// Unweighted mean across sequences of per-sequence values.
pub fn mean_summary(items: &[&MetricSummary]) -> MetricSummary {
    macro_rules! m {
        ($f:ident) => {
            mean_opt(items.iter().map(|s| s.$f))
        };
    }
    let mut reps = BTreeMap::new();
    for kind in RepresentationKind::ALL {
        let name = kind.name();
        let present: Vec<&RepresentationMetrics> = items.iter().filter_map(|s| s.representations.get(name)).collect();
        if present.is_empty() {
            continue;
        }
        reps.insert(
            name.to_string(),
            RepresentationMetrics {
                success_auc: mean_opt(present.iter().map(|r| r.success_auc)),
                precision_20: mean_opt(present.iter().map(|r| r.precision_20)),
                norm_precision_auc: mean_opt(present.iter().map(|r| r.norm_precision_auc)),
                angle_3: mean_opt(present.iter().map(|r| r.angle_3)),
            },
        );
    }
    MetricSummary {
        s_dual_auc: m!(s_dual_auc),
        p_dual_20: m!(p_dual_20),
        pnorm_dual_auc: m!(pnorm_dual_auc),
        p_angle_3: m!(p_angle_3),
        s_sphere_auc: m!(s_sphere_auc),
        j: m!(j),
        f: m!(f),
        j_sphere: m!(j_sphere),
        f_sphere: m!(f_sphere),
        representations: reps,
    }
}

/// Everything measured for one sequence, ready for aggregation.
#[derive(Debug, Clone)]
pub struct EvaluatedSequence {
    pub name: String,
    pub result: SequenceResult,
    pub attributes: Option<AttributeFlags>,
}

/// Aggregates sequences into a report. Curves are averaged rate-wise over
/// the sequences that have them, so curve AUCs match the aggregate AUCs.
pub fn build_report(tracker: &str, cfg: &EvalConfig, sequences: &[EvaluatedSequence]) -> EvalReport {
    let mut per_sequence = BTreeMap::new();
    let mut summaries = Vec::new();
    for s in sequences {
        let summary = s.result.summary();
        per_sequence.insert(
            s.name.clone(),
            SequenceReport {
                frames: s.result.scored_frames,
                metrics: summary.clone(),
                attributes: s.attributes,
            },
        );
        summaries.push(summary);
    }
    let aggregate = mean_summary(&summaries.iter().collect::<Vec<_>>());

    let mut by_attr: BTreeMap<String, Vec<&MetricSummary>> = BTreeMap::new();
    for (s, summary) in sequences.iter().zip(&summaries) {
        if let Some(flags) = &s.attributes {
            for (name, on) in flags.entries() {
                if on {
                    by_attr.entry(name.to_string()).or_default().push(summary);
                }
            }
        }
    }
    let by_attribute = by_attr.into_iter().map(|(k, v)| (k, mean_summary(&v))).collect();

    let mut pooled: BTreeMap<String, (Vec<f64>, Vec<f64>, usize)> = BTreeMap::new();
    for s in sequences {
        for (key, c) in s.result.curves() {
            let e = pooled
                .entry(key)
                .or_insert_with(|| (c.thresholds.clone(), vec![0.0; c.rates.len()], 0));
            for (acc, r) in e.1.iter_mut().zip(&c.rates) {
                *acc += r;
            }
            e.2 += 1;
        }
    }
    let curves = pooled
        .into_iter()
        .map(|(k, (t, sum, n))| {
            let pts = t.iter().zip(&sum).map(|(&t, &s)| [t, s / n as f64]).collect();
            (k, pts)
        })
        .collect();

    EvalReport {
        schema: REPORT_SCHEMA,
        tracker: tracker.to_string(),
        raster: cfg.raster.to_string(),
        per_sequence,
        aggregate,
        by_attribute,
        curves,
    }
}

/// Scores a whole result stream against its ground truth.
pub fn ope_evaluate(results: &[AnnotationRecord], gt: &[AnnotationRecord], cfg: &EvalConfig) -> Result<SequenceResult> {
    if results.len() != gt.len() {
        return Err(Error::LengthMismatch {
            gt: gt.len(),
            results: results.len(),
        });
    }
    let mut ev = SequenceEvaluator::new(cfg);
    for (g, t) in gt.iter().zip(results) {
        ev.push(g, t)?;
    }
    Ok(ev.finish())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::regions::{BBox, Bfov};

    fn size() -> ErpSize {
        ErpSize::new(720, 360).unwrap()
    }

    fn cfg() -> EvalConfig {
        let mut c = EvalConfig::new(size());
        c.raster = ErpSize::new(360, 180).unwrap();
        c
    }

    fn gt_stream(n: usize) -> Vec<AnnotationRecord> {
        (0..n)
            .map(|f| {
                let cx = 100.0 + 5.0 * f as f64;
                let mask = Mask::from_fn(720, 360, |i, j| {
                    (i as f64 - cx).abs() < 15.0 && (j as f64 - 150.0).abs() < 10.0
                });
                AnnotationRecord {
                    frame: f,
                    bbox: Some(BBox::new(cx, 150.0, 30.0, 20.0).unwrap()),
                    rbbox: Some(RBBox::new(cx, 150.0, 30.0, 20.0, 0.2).unwrap()),
                    bfov: Some(Bfov::from_degrees(-130.0 + 2.5 * f as f64, 15.0, 15.0, 10.0, 0.0).unwrap()),
                    rbfov: Some(Bfov::from_degrees(-130.0 + 2.5 * f as f64, 15.0, 15.0, 10.0, 10.0).unwrap()),
                    mask: Some(mask),
                }
            })
            .collect()
    }

    #[test]
    fn curve_grids() {
        assert_eq!(SuccessCurve::success(&[1.0]).thresholds.len(), 101);
        assert_eq!(SuccessCurve::precision(&[1.0]).thresholds.len(), 51);
        assert_eq!(SuccessCurve::normalized_precision(&[1.0]).thresholds.len(), 51);
        let a = SuccessCurve::angle(&[1.0]);
        assert_eq!(a.thresholds.len(), 201);
        assert_eq!(a.thresholds[30], 3.0);
        assert_eq!(a.thresholds[200], 20.0);
    }

    #[test]
    fn success_curve_non_increasing() {
        let c = SuccessCurve::success(&[0.1, 0.5, 0.75, 0.9, 0.0, 1.0]);
        assert!(c.rates.windows(2).all(|w| w[1] <= w[0]));
        assert!((0.0..=1.0).contains(&c.auc));
    }

    #[test]
    fn perfect_predictions() {
        let gt = gt_stream(5);
        let r = ope_evaluate(&gt, &gt, &cfg()).unwrap().summary();
        assert_eq!(r.s_dual_auc, Some(1.0));
        assert_eq!(r.p_dual_20, Some(1.0));
        assert_eq!(r.pnorm_dual_auc, Some(1.0));
        assert_eq!(r.p_angle_3, Some(1.0));
        assert_eq!(r.s_sphere_auc, Some(1.0));
        assert_eq!(
            (r.j, r.f, r.j_sphere, r.f_sphere),
            (Some(1.0), Some(1.0), Some(1.0), Some(1.0))
        );
        for m in r.representations.values() {
            assert_eq!(m.success_auc, Some(1.0));
            assert_eq!(m.angle_3, Some(1.0));
        }
    }

    #[test]
    fn empty_predictions() {
        let gt = gt_stream(5);
        let empty: Vec<_> = (0..5).map(AnnotationRecord::empty).collect();
        let r = ope_evaluate(&empty, &gt, &cfg()).unwrap().summary();
        assert_eq!(r.s_dual_auc, Some(0.0));
        assert_eq!(r.p_dual_20, Some(0.0));
        assert_eq!(r.pnorm_dual_auc, Some(0.0));
        assert_eq!(r.p_angle_3, Some(0.0));
        assert_eq!(r.s_sphere_auc, Some(0.0));
        assert_eq!(
            (r.j, r.f, r.j_sphere, r.f_sphere),
            (Some(0.0), Some(0.0), Some(0.0), Some(0.0))
        );
    }

    #[test]
    fn half_exact_half_empty() {
        let gt = gt_stream(5);
        let mut tr = gt.clone();
        // frame 0 is the init frame; of the four scored, blank two
        tr[1] = AnnotationRecord::empty(1);
        tr[3] = AnnotationRecord::empty(3);
        let r = ope_evaluate(&tr, &gt, &cfg()).unwrap().summary();
        assert_eq!(r.s_dual_auc, Some(0.5));
        assert_eq!(r.j, Some(0.5));
    }

    #[test]
    fn init_frame_is_not_scored() {
        let gt = gt_stream(3);
        let mut tr = gt.clone();
        tr[0] = AnnotationRecord::empty(0);
        let r = ope_evaluate(&tr, &gt, &cfg()).unwrap();
        assert_eq!(r.scored_frames, 2);
        assert_eq!(r.summary().s_dual_auc, Some(1.0));
    }

    #[test]
    fn length_mismatch() {
        let gt = gt_stream(3);
        assert!(matches!(
            ope_evaluate(&gt[..2], &gt, &cfg()),
            Err(Error::LengthMismatch { .. })
        ));
    }

    #[test]
    fn precision_ranking_survives_scaling() {
        let a = [1.0, 3.0, 8.0, 12.0, 30.0];
        let b = [2.0, 2.5, 9.0, 25.0, 40.0];
        let ca = SuccessCurve::precision(&a);
        let cb = SuccessCurve::precision(&b);
        let scale = |v: &[f64]| v.iter().map(|x| x * 2.0).collect::<Vec<_>>();
        let sa = SuccessCurve::within(&scale(&a), grid(51, 2.0));
        let sb = SuccessCurve::within(&scale(&b), grid(51, 2.0));
        for k in 0..51 {
            assert_eq!(ca.rates[k].total_cmp(&cb.rates[k]), sa.rates[k].total_cmp(&sb.rates[k]));
        }
    }

    #[test]
    fn report_aggregates_unweighted() {
        let gt = gt_stream(5);
        let empty: Vec<_> = (0..5).map(AnnotationRecord::empty).collect();
        let c = cfg();
        let seqs = vec![
            EvaluatedSequence {
                name: "a".into(),
                result: ope_evaluate(&gt, &gt, &c).unwrap(),
                attributes: None,
            },
            EvaluatedSequence {
                name: "b".into(),
                result: ope_evaluate(&empty, &gt, &c).unwrap(),
                attributes: None,
            },
        ];
        let rep = build_report("test", &c, &seqs);
        assert_eq!(rep.aggregate.s_dual_auc, Some(0.5));
        assert_eq!(rep.curves["S_dual"].len(), 101);
        let auc = rep.curves["S_dual"].iter().map(|p| p[1]).sum::<f64>() / 101.0;
        assert!((auc - 0.5).abs() < 1e-12);
        assert_eq!(rep.raster, "360x180");
    }
}
