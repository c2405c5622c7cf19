//! Sequence directories, annotation text formats, mask and frame PNGs,
//! and report serialization.
//!
//! Layout of a sequence (and, minus `frames/`, of a result directory):
//!
//! ```text
//! frames/000000.png ...   ERP frames, W = 2H
//! mask/000000.png ...     optional 8-bit masks, 0 background / 255 target
//! bbox.txt                cx,cy,w,h                       (pixels)
//! rbbox.txt               cx,cy,w,h,gamma                 (pixels, degrees)
//! bfov.txt, rbfov.txt     clon,clat,theta,phi,gamma       (degrees)
//! attributes.json         {"computed": {...}, "manual": ...}
//! ```
//!
//! One line per frame. An empty line marks a missing annotation.

use std::fmt::Write as _;
use std::fs;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::annotation::AnnotationRecord;
use crate::framework::FrameResult;
use crate::geom::ErpSize;
use crate::mask::Mask;
use crate::metrics::{AttributeFlags, EvalReport};
use crate::regions::{BBox, Bfov, RBBox, Region, RepresentationKind};
use crate::remap::{ErpImage, LocalImage};

pub const FRAMES_DIR: &str = "frames";
pub const MASK_DIR: &str = "mask";
pub const ATTRIBUTES_FILE: &str = "attributes.json";

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ParseError {
    #[error("line is not valid UTF-8")]
    Encoding,
    #[error("expected {expected} fields, found {found}")]
    FieldCount { expected: usize, found: usize },
    #[error("field {field}: cannot parse {text:?} as a number")]
    Number { field: usize, text: String },
    #[error("field {field}: non-finite value")]
    NonFinite { field: usize },
    #[error("field {field}: value {value} out of range")]
    OutOfRange { field: usize, value: f64 },
}

#[derive(Debug, Error)]
pub enum DatasetError {
    #[error("{0}: missing frames directory")]
    MissingFrames(PathBuf),
    #[error("{0}: no frames found")]
    NoFrames(PathBuf),
    #[error("{path}: expected {expected} entries, found {found}")]
    CountMismatch {
        path: PathBuf,
        expected: usize,
        found: usize,
    },
    #[error("{path}: {width}x{height} is not an equirectangular (2:1) frame")]
    AspectRatio { path: PathBuf, width: u32, height: u32 },
    #[error("{path}: {width}x{height} differs from the sequence size {expected}")]
    SizeMismatch {
        path: PathBuf,
        width: u32,
        height: u32,
        expected: ErpSize,
    },
    #[error("{path}: unexpected file name (want a zero-padded index)")]
    BadFileName { path: PathBuf },
    #[error("{path}:{line}: {source}")]
    Parse {
        path: PathBuf,
        line: usize,
        #[source]
        source: ParseError,
    },
    #[error("{path}: {message}")]
    Image { path: PathBuf, message: String },
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}: {source}")]
    Json {
        path: PathBuf,
        #[source]
        source: serde_json::Error,
    },
    #[error("no results to write")]
    EmptyResults,
}

pub type Result<T> = std::result::Result<T, DatasetError>;

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> DatasetError + '_ {
    move |source| DatasetError::Io {
        path: path.to_path_buf(),
        source,
    }
}

pub fn frame_path(root: &Path, k: usize) -> PathBuf {
    root.join(FRAMES_DIR).join(format!("{k:06}.png"))
}

pub fn mask_path(root: &Path, k: usize) -> PathBuf {
    root.join(MASK_DIR).join(format!("{k:06}.png"))
}

pub fn annotation_path(root: &Path, kind: RepresentationKind) -> PathBuf {
    root.join(format!("{}.txt", kind.name()))
}

pub fn create_layout(root: &Path, with_masks: bool) -> Result<()> {
    let frames = root.join(FRAMES_DIR);
    fs::create_dir_all(&frames).map_err(io_err(&frames))?;
    if with_masks {
        let masks = root.join(MASK_DIR);
        fs::create_dir_all(&masks).map_err(io_err(&masks))?;
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// Line formats

fn field_count(kind: RepresentationKind) -> usize {
    match kind {
        RepresentationKind::BBox => 4,
        _ => 5,
    }
}

fn parse_fields(line: &str, expected: usize) -> std::result::Result<Vec<f64>, ParseError> {
    let parts: Vec<&str> = line.split(',').collect();
    if parts.len() != expected {
        return Err(ParseError::FieldCount {
            expected,
            found: parts.len(),
        });
    }
    parts
        .iter()
        .enumerate()
        .map(|(field, p)| {
            let t = p.trim();
            let v: f64 = t.parse().map_err(|_| ParseError::Number {
                field,
                text: t.chars().take(32).collect(),
            })?;
            if !v.is_finite() {
                return Err(ParseError::NonFinite { field });
            }
            Ok(v)
        })
        .collect()
}

fn check_range(v: &[f64], field: usize, ok: impl Fn(f64) -> bool) -> std::result::Result<(), ParseError> {
    if ok(v[field]) {
        Ok(())
    } else {
        Err(ParseError::OutOfRange { field, value: v[field] })
    }
}

/// Parses one annotation line. Distances stay in pixels; angles are read
/// in degrees and returned in radians.
pub fn parse_annotation_line(line: &str, kind: RepresentationKind) -> std::result::Result<Region, ParseError> {
    let v = parse_fields(line.trim(), field_count(kind))?;
    let positive = |x: f64| x > 0.0;
    match kind {
        RepresentationKind::BBox | RepresentationKind::RBBox => {
            check_range(&v, 2, positive)?;
            check_range(&v, 3, positive)?;
            if kind == RepresentationKind::BBox {
                let b =
                    BBox::new(v[0], v[1], v[2], v[3]).map_err(|_| ParseError::OutOfRange { field: 2, value: v[2] })?;
                Ok(Region::BBox(b))
            } else {
                check_range(&v, 4, |g| g.abs() <= 360.0)?;
                let b = RBBox::new(v[0], v[1], v[2], v[3], v[4].to_radians())
                    .map_err(|_| ParseError::OutOfRange { field: 2, value: v[2] })?;
                Ok(Region::RBBox(b))
            }
        }
        RepresentationKind::Bfov | RepresentationKind::RBfov => {
            check_range(&v, 0, |x| x.abs() <= 360.0)?;
            check_range(&v, 1, |x| x.abs() <= 90.0)?;
            check_range(&v, 2, |x| x > 0.0 && x <= 360.0)?;
            check_range(&v, 3, |x| x > 0.0 && x <= 180.0)?;
            check_range(&v, 4, |x| x.abs() <= 360.0)?;
            let b = Bfov::from_degrees(v[0], v[1], v[2], v[3], v[4])
                .map_err(|_| ParseError::OutOfRange { field: 2, value: v[2] })?;
            Ok(Region::Bfov(b))
        }
    }
}

/// Byte-level entry point: rejects non-UTF-8 input before parsing.
pub fn parse_annotation_bytes(line: &[u8], kind: RepresentationKind) -> std::result::Result<Region, ParseError> {
    let s = std::str::from_utf8(line).map_err(|_| ParseError::Encoding)?;
    parse_annotation_line(s, kind)
}

pub fn format_bbox(b: &BBox) -> String {
    format!("{:.6},{:.6},{:.6},{:.6}", b.cx, b.cy, b.w, b.h)
}

pub fn format_rbbox(b: &RBBox) -> String {
    format!(
        "{:.6},{:.6},{:.6},{:.6},{:.6}",
        b.cx,
        b.cy,
        b.w,
        b.h,
        b.gamma.to_degrees()
    )
}

pub fn format_bfov(b: &Bfov) -> String {
    format!(
        "{:.6},{:.6},{:.6},{:.6},{:.6}",
        b.clon.to_degrees(),
        b.clat.to_degrees(),
        b.theta.to_degrees(),
        b.phi.to_degrees(),
        b.gamma.to_degrees()
    )
}

fn record_line(r: &AnnotationRecord, kind: RepresentationKind) -> Option<String> {
    match kind {
        RepresentationKind::BBox => r.bbox.as_ref().map(format_bbox),
        RepresentationKind::RBBox => r.rbbox.as_ref().map(format_rbbox),
        RepresentationKind::Bfov => r.bfov.as_ref().map(format_bfov),
        RepresentationKind::RBfov => r.rbfov.as_ref().map(format_bfov),
    }
}

fn has_kind(r: &AnnotationRecord, kind: RepresentationKind) -> bool {
    record_line(r, kind).is_some()
}

/// Reads one annotation file; empty lines become `None`.
pub fn read_annotation_file(path: &Path, kind: RepresentationKind) -> Result<Vec<Option<Region>>> {
    let text = fs::read(path).map_err(io_err(path))?;
    let mut out = Vec::new();
    for (n, line) in text.split(|&b| b == b'\n').enumerate() {
        let line = line.strip_suffix(b"\r").unwrap_or(line);
        if line.iter().all(u8::is_ascii_whitespace) {
            out.push(None);
            continue;
        }
        let region = parse_annotation_bytes(line, kind).map_err(|source| DatasetError::Parse {
            path: path.to_path_buf(),
            line: n + 1,
            source,
        })?;
        out.push(Some(region));
    }
    // a trailing newline leaves one empty entry behind
    if text.ends_with(b"\n") || text.is_empty() {
        out.pop();
    }
    Ok(out)
}

fn write_text(path: &Path, body: &str) -> Result<()> {
    fs::write(path, body).map_err(io_err(path))
}

/// Writes every representation present in at least one record.
pub fn write_annotations(records: &[AnnotationRecord], dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).map_err(io_err(dir))?;
    for kind in RepresentationKind::ALL {
        if !records.iter().any(|r| has_kind(r, kind)) {
            continue;
        }
        let mut body = String::new();
        for r in records {
            if let Some(line) = record_line(r, kind) {
                body.push_str(&line);
            }
            body.push('\n');
        }
        write_text(&annotation_path(dir, kind), &body)?;
    }
    Ok(())
}

/// Writes tracker output: the four annotation files plus masks when the
/// results carry them.
pub fn write_results(results: &[FrameResult], out_dir: &Path) -> Result<()> {
    if results.is_empty() {
        return Err(DatasetError::EmptyResults);
    }
    let records: Vec<AnnotationRecord> = results
        .iter()
        .enumerate()
        .map(|(k, r)| AnnotationRecord {
            mask: None,
            ..r.to_record(k)
        })
        .collect();
    write_annotations(&records, out_dir)?;
    if results.iter().any(|r| r.mask.is_some()) {
        let dir = out_dir.join(MASK_DIR);
        fs::create_dir_all(&dir).map_err(io_err(&dir))?;
        for (k, r) in results.iter().enumerate() {
            if let Some(m) = &r.mask {
                write_mask(m, &mask_path(out_dir, k))?;
            }
        }
    }
    let mut conf = String::new();
    for r in results {
        let _ = writeln!(conf, "{:.6}", r.confidence);
    }
    write_text(&out_dir.join("confidence.txt"), &conf)
}

// ---------------------------------------------------------------------------
// Images

pub fn write_mask(m: &Mask, path: &Path) -> Result<()> {
    let img = image::GrayImage::from_raw(m.width() as u32, m.height() as u32, m.to_u8()).expect("sized buffer");
    img.save(path).map_err(|e| DatasetError::Image {
        path: path.to_path_buf(),
        message: e.to_string(),
    })
}

pub fn read_mask(path: &Path) -> Result<Mask> {
    let img = open_image(path)?.to_luma8();
    let (w, h) = img.dimensions();
    Ok(Mask::from_u8(w as usize, h as usize, img.as_raw()).expect("sized buffer"))
}

fn open_image(path: &Path) -> Result<image::DynamicImage> {
    image::open(path).map_err(|e| DatasetError::Image {
        path: path.to_path_buf(),
        message: e.to_string(),
    })
}

pub fn write_frame(img: &ErpImage, path: &Path) -> Result<()> {
    let (w, h) = (img.width() as u32, img.height() as u32);
    let res = match img.channels() {
        1 => image::GrayImage::from_raw(w, h, img.data().to_vec())
            .expect("sized")
            .save(path),
        _ => image::RgbImage::from_raw(w, h, img.data().to_vec())
            .expect("sized")
            .save(path),
    };
    res.map_err(|e| DatasetError::Image {
        path: path.to_path_buf(),
        message: e.to_string(),
    })
}

pub fn write_local_image(img: &LocalImage, path: &Path) -> Result<()> {
    let (w, h) = (img.width() as u32, img.height() as u32);
    let res = match img.channels() {
        1 => image::GrayImage::from_raw(w, h, img.data().to_vec())
            .expect("sized")
            .save(path),
        _ => image::RgbImage::from_raw(w, h, img.data().to_vec())
            .expect("sized")
            .save(path),
    };
    res.map_err(|e| DatasetError::Image {
        path: path.to_path_buf(),
        message: e.to_string(),
    })
}

pub fn read_frame(path: &Path) -> Result<ErpImage> {
    let img = open_image(path)?.to_rgb8();
    let (w, h) = img.dimensions();
    ErpImage::new(w as usize, h as usize, 3, img.into_raw()).map_err(|_| DatasetError::AspectRatio {
        path: path.to_path_buf(),
        width: w,
        height: h,
    })
}

// ---------------------------------------------------------------------------
// Sequences

/// Validated sequence directory with its parsed annotations. Masks and
/// frames stay on disk and are loaded per frame.
#[derive(Debug, Clone)]
pub struct SequenceManifest {
    pub name: String,
    pub root: PathBuf,
    pub size: ErpSize,
    pub frames: Vec<PathBuf>,
    pub masks: Option<Vec<PathBuf>>,
    pub annotation_files: Vec<(RepresentationKind, PathBuf)>,
    pub attributes: Option<PathBuf>,
    pub annotations: Vec<AnnotationRecord>,
}

impl SequenceManifest {
    pub fn len(&self) -> usize {
        self.frames.len()
    }

    pub fn is_empty(&self) -> bool {
        self.frames.is_empty()
    }

    pub fn load_frame(&self, k: usize) -> Result<ErpImage> {
        read_frame(&self.frames[k])
    }

    pub fn load_mask(&self, k: usize) -> Result<Mask> {
        match &self.masks {
            Some(m) => read_mask(&m[k]),
            None => Err(DatasetError::CountMismatch {
                path: self.root.join(MASK_DIR),
                expected: self.len(),
                found: 0,
            }),
        }
    }

    /// Annotation record of frame `k`, with its mask loaded if available.
    pub fn record(&self, k: usize, with_mask: bool) -> Result<AnnotationRecord> {
        let mut r = self.annotations[k].clone();
        if with_mask && self.masks.is_some() {
            r.mask = Some(self.load_mask(k)?);
        }
        Ok(r)
    }
}

fn indexed_pngs(dir: &Path) -> Result<Vec<PathBuf>> {
    let mut items: Vec<(usize, PathBuf)> = Vec::new();
    for entry in fs::read_dir(dir).map_err(io_err(dir))? {
        let path = entry.map_err(io_err(dir))?.path();
        if path.extension().and_then(|e| e.to_str()) != Some("png") {
            continue;
        }
        let idx = path
            .file_stem()
            .and_then(|s| s.to_str())
            .and_then(|s| s.parse::<usize>().ok())
            .ok_or_else(|| DatasetError::BadFileName { path: path.clone() })?;
        items.push((idx, path));
    }
    items.sort();
    for (k, (idx, path)) in items.iter().enumerate() {
        if *idx != k {
            return Err(DatasetError::BadFileName { path: path.clone() });
        }
    }
    Ok(items.into_iter().map(|(_, p)| p).collect())
}

fn image_size(path: &Path) -> Result<(u32, u32)> {
    image::image_dimensions(path).map_err(|e| DatasetError::Image {
        path: path.to_path_buf(),
        message: e.to_string(),
    })
}

fn check_count(path: &Path, expected: usize, found: usize) -> Result<()> {
    if expected == found {
        Ok(())
    } else {
        Err(DatasetError::CountMismatch {
            path: path.to_path_buf(),
            expected,
            found,
        })
    }
}

/// Frame count, parsed records, annotation files and mask paths of a directory.
type AnnotationDir = (
    usize,
    Vec<AnnotationRecord>,
    Vec<(RepresentationKind, PathBuf)>,
    Option<Vec<PathBuf>>,
);

/// Reads the annotation files (and mask paths) under `root`, checking that
/// each has `frames` entries when a count is given.
fn load_annotation_dir(root: &Path, frames: Option<usize>) -> Result<AnnotationDir> {
    let mut files = Vec::new();
    let mut parsed = Vec::new();
    for kind in RepresentationKind::ALL {
        let path = annotation_path(root, kind);
        if path.is_file() {
            parsed.push((kind, read_annotation_file(&path, kind)?));
            files.push((kind, path));
        }
    }
    let mask_dir = root.join(MASK_DIR);
    let masks = if mask_dir.is_dir() {
        Some(indexed_pngs(&mask_dir)?)
    } else {
        None
    };
    let n = frames
        .or_else(|| parsed.first().map(|(_, v)| v.len()))
        .or_else(|| masks.as_ref().map(Vec::len))
        .unwrap_or(0);
    for ((_, path), (_, v)) in files.iter().zip(&parsed) {
        check_count(path, n, v.len())?;
    }
    if let Some(m) = &masks {
        // result directories may hold masks for only some frames
        if frames.is_some() || m.len() > n {
            check_count(&mask_dir, n, m.len())?;
        }
    }
    let mut records: Vec<AnnotationRecord> = (0..n).map(AnnotationRecord::empty).collect();
    for (kind, values) in parsed {
        for (r, v) in records.iter_mut().zip(values) {
            match (kind, v) {
                (RepresentationKind::BBox, Some(Region::BBox(b))) => r.bbox = Some(b),
                (RepresentationKind::RBBox, Some(Region::RBBox(b))) => r.rbbox = Some(b),
                (RepresentationKind::Bfov, Some(Region::Bfov(b))) => r.bfov = Some(b),
                (RepresentationKind::RBfov, Some(Region::Bfov(b))) => r.rbfov = Some(b),
                _ => {}
            }
        }
    }
    Ok((n, records, files, masks))
}

pub fn load_sequence(root: &Path) -> Result<SequenceManifest> {
    let frames_dir = root.join(FRAMES_DIR);
    if !frames_dir.is_dir() {
        return Err(DatasetError::MissingFrames(root.to_path_buf()));
    }
    let frames = indexed_pngs(&frames_dir)?;
    if frames.is_empty() {
        return Err(DatasetError::NoFrames(root.to_path_buf()));
    }
    let (w, h) = image_size(&frames[0])?;
    let size = ErpSize::new(w as usize, h as usize).map_err(|_| DatasetError::AspectRatio {
        path: frames[0].clone(),
        width: w,
        height: h,
    })?;
    let check = |path: &Path| -> Result<()> {
        let (fw, fh) = image_size(path)?;
        if (fw as usize, fh as usize) != (size.width(), size.height()) {
            return Err(DatasetError::SizeMismatch {
                path: path.to_path_buf(),
                width: fw,
                height: fh,
                expected: size,
            });
        }
        Ok(())
    };
    for f in &frames[1..] {
        check(f)?;
    }
    let (_, annotations, annotation_files, masks) = load_annotation_dir(root, Some(frames.len()))?;
    if let Some(m) = &masks {
        for p in m {
            check(p)?;
        }
    }
    let attributes = Some(root.join(ATTRIBUTES_FILE)).filter(|p| p.is_file());
    let name = root
        .file_name()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "sequence".to_string());
    Ok(SequenceManifest {
        name,
        root: root.to_path_buf(),
        size,
        frames,
        masks,
        annotation_files,
        attributes,
        annotations,
    })
}

/// Tracker output read back from a result directory.
#[derive(Debug, Clone)]
pub struct ResultSet {
    pub root: PathBuf,
    pub records: Vec<AnnotationRecord>,
    pub masks: Vec<Option<PathBuf>>,
}

impl ResultSet {
    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn record(&self, k: usize, with_mask: bool) -> Result<AnnotationRecord> {
        let mut r = self.records[k].clone();
        if with_mask {
            if let Some(p) = &self.masks[k] {
                r.mask = Some(read_mask(p)?);
            }
        }
        Ok(r)
    }
}

/// Loads a result directory. `frames` fixes the expected length.
pub fn load_results(root: &Path, frames: Option<usize>) -> Result<ResultSet> {
    if !root.is_dir() {
        return Err(DatasetError::Io {
            path: root.to_path_buf(),
            source: std::io::Error::new(std::io::ErrorKind::NotFound, "result directory not found"),
        });
    }
    let (n, records, _, _) = load_annotation_dir(root, frames)?;
    let masks = (0..n)
        .map(|k| Some(mask_path(root, k)).filter(|p| p.is_file()))
        .collect();
    Ok(ResultSet {
        root: root.to_path_buf(),
        records,
        masks,
    })
}

// ---------------------------------------------------------------------------
// Attributes and reports

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AttributesFile {
    pub computed: AttributeFlags,
    #[serde(default)]
    pub manual: Option<serde_json::Value>,
}

pub fn write_attributes(path: &Path, computed: &AttributeFlags, manual: Option<&serde_json::Value>) -> Result<()> {
    let file = AttributesFile {
        computed: *computed,
        manual: manual.cloned(),
    };
    write_json(path, &file)
}

pub fn read_attributes(path: &Path) -> Result<AttributesFile> {
    read_json(path)
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut body = serde_json::to_string_pretty(value).map_err(|source| DatasetError::Json {
        path: path.to_path_buf(),
        source,
    })?;
    body.push('\n');
    write_text(path, &body)
}

fn read_json<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T> {
    let text = fs::read_to_string(path).map_err(io_err(path))?;
    serde_json::from_str(&text).map_err(|source| DatasetError::Json {
        path: path.to_path_buf(),
        source,
    })
}

pub fn write_report(report: &EvalReport, path: &Path) -> Result<()> {
    write_json(path, report)
}

pub fn read_report(path: &Path) -> Result<EvalReport> {
    read_json(path)
}

/// Writes all curves of `report` as `metric,threshold,rate` rows.
pub fn write_curves_csv(report: &EvalReport, path: &Path) -> Result<()> {
    let file = fs::File::create(path).map_err(io_err(path))?;
    let mut w = BufWriter::new(file);
    let mut emit = || -> std::io::Result<()> {
        writeln!(w, "metric,threshold,rate")?;
        for (name, pts) in &report.curves {
            for [t, r] in pts {
                writeln!(w, "{name},{t},{r}")?;
            }
        }
        w.flush()
    };
    emit().map_err(io_err(path))
}
