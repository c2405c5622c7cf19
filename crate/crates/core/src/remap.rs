//! Viewport extraction from ERP frames and lifting of local predictions
//! back onto the full frame.

use nalgebra::Vector3;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::geom::{vec_to_pixel, ErpSize, PixelCoord};
use crate::mask::Mask;
use crate::regions::planar::{clip_convex, polygon_area};
use crate::regions::{
    bbox_of_points, bfov_of_points, ebfov_grid, rbbox_of_points, Bfov, RBBox, Region, RepresentationKind, SamplingGrid,
};

pub const DEFAULT_LOCAL_SIZE: usize = 512;
pub const DEFAULT_BOX_SAMPLES: usize = 64;

/// 8-bit ERP frame, row-major, interleaved channels.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ErpImage {
    size: ErpSize,
    channels: usize,
    data: Vec<u8>,
}

impl ErpImage {
    pub fn new(width: usize, height: usize, channels: usize, data: Vec<u8>) -> Result<Self> {
        let size = ErpSize::new(width, height)?;
        if channels != 1 && channels != 3 {
            return Err(Error::domain(format!("unsupported channel count {channels}")));
        }
        if data.len() != width * height * channels {
            return Err(Error::domain("image buffer size does not match dimensions"));
        }
        Ok(Self { size, channels, data })
    }

    pub fn filled(size: ErpSize, channels: usize, value: u8) -> Result<Self> {
        Self::new(
            size.width(),
            size.height(),
            channels,
            vec![value; size.pixel_count() * channels],
        )
    }

    pub fn size(&self) -> ErpSize {
        self.size
    }

    pub fn width(&self) -> usize {
        self.size.width()
    }

    pub fn height(&self) -> usize {
        self.size.height()
    }

    pub fn channels(&self) -> usize {
        self.channels
    }

    pub fn data(&self) -> &[u8] {
        &self.data
    }

    pub fn into_data(self) -> Vec<u8> {
        self.data
    }

    #[inline]
    pub fn pixel(&self, i: usize, j: usize) -> &[u8] {
        let k = (j * self.size.width() + i) * self.channels;
        &self.data[k..k + self.channels]
    }

    /// Rolls columns right by `k` (a pure yaw of the panorama).
    pub fn roll_columns(&self, k: isize) -> ErpImage {
        let (w, c) = (self.width(), self.channels);
        let mut data = vec![0u8; self.data.len()];
        for j in 0..self.height() {
            for i in 0..w {
                let src = (i as isize - k).rem_euclid(w as isize) as usize;
                let d = (j * w + i) * c;
                let s = (j * w + src) * c;
                data[d..d + c].copy_from_slice(&self.data[s..s + c]);
            }
        }
        ErpImage {
            size: self.size,
            channels: c,
            data,
        }
    }

    /// Pixel fetch with horizontal wrap and continuation over the poles:
    /// a row above the top (below the bottom) maps to the mirrored row on
    /// the opposite meridian.
    #[inline]
    fn fetch(&self, i: isize, j: isize, ch: usize) -> f64 {
        let (w, h) = (self.width() as isize, self.height() as isize);
        let (mut i, mut j) = (i, j);
        if j < 0 {
            j = -j - 1;
            i += w / 2;
        } else if j >= h {
            j = 2 * h - j - 1;
            i += w / 2;
        }
        let j = j.clamp(0, h - 1) as usize;
        let i = i.rem_euclid(w) as usize;
        self.data[(j * self.width() + i) * self.channels + ch] as f64
    }

    /// Bilinear sample at a continuous pixel coordinate (pixel centres at
    /// half-integers).
    pub fn sample_bilinear(&self, p: PixelCoord, out: &mut [u8]) {
        let x = p.u - 0.5;
        let y = p.v - 0.5;
        let x0 = x.floor();
        let y0 = y.floor();
        let (fx, fy) = (x - x0, y - y0);
        let (x0, y0) = (x0 as isize, y0 as isize);
        for (ch, o) in out.iter_mut().enumerate().take(self.channels) {
            let p00 = self.fetch(x0, y0, ch);
            let p10 = self.fetch(x0 + 1, y0, ch);
            let p01 = self.fetch(x0, y0 + 1, ch);
            let p11 = self.fetch(x0 + 1, y0 + 1, ch);
            let a = p00 + fx * (p10 - p00);
            let b = p01 + fx * (p11 - p01);
            *o = (a + fy * (b - a)).round().clamp(0.0, 255.0) as u8;
        }
    }
}

/// Viewport image together with the grid that produced it.
#[derive(Debug, Clone)]
pub struct LocalImage {
    width: usize,
    height: usize,
    channels: usize,
    data: Vec<u8>,
    grid: SamplingGrid,
}

impl LocalImage {
    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn channels(&self) -> usize {
        self.channels
    }

    pub fn data(&self) -> &[u8] {
        &self.data
    }

    pub fn grid(&self) -> &SamplingGrid {
        &self.grid
    }

    pub fn into_grid(self) -> SamplingGrid {
        self.grid
    }

    /// Luma in `[0, 255]`, row-major.
    pub fn to_gray(&self) -> Vec<f64> {
        match self.channels {
            1 => self.data.iter().map(|&v| v as f64).collect(),
            _ => self
                .data
                .chunks_exact(self.channels)
                .map(|p| 0.299 * p[0] as f64 + 0.587 * p[1] as f64 + 0.114 * p[2] as f64)
                .collect(),
        }
    }
}

/// Samples `img` through `grid` with bilinear interpolation.
pub fn sample_with_grid(img: &ErpImage, grid: &SamplingGrid) -> Result<LocalImage> {
    if img.size() != grid.erp_size() {
        return Err(Error::DimensionMismatch {
            expected: (grid.erp_size().width(), grid.erp_size().height()),
            found: (img.width(), img.height()),
        });
    }
    let (cols, c) = (grid.cols(), img.channels());
    let mut data = vec![0u8; cols * grid.rows() * c];
    data.par_chunks_mut(cols * c).enumerate().for_each(|(j, row)| {
        for i in 0..cols {
            img.sample_bilinear(grid.get(i, j), &mut row[i * c..(i + 1) * c]);
        }
    });
    Ok(LocalImage {
        width: cols,
        height: grid.rows(),
        channels: c,
        data,
        grid: grid.clone(),
    })
}

/// Extracts the less-distorted local view of the region of `b`.
pub fn extract_region(img: &ErpImage, b: &Bfov, out_w: usize, out_h: usize) -> Result<LocalImage> {
    let grid = ebfov_grid(b, out_w, out_h, img.size())?;
    sample_with_grid(img, &grid)
}

#[inline]
fn nearest_pixel(p: PixelCoord, size: ErpSize) -> (usize, usize) {
    let i = (p.u.floor() as isize).rem_euclid(size.width() as isize) as usize;
    let j = (p.v.floor().max(0.0) as usize).min(size.height() - 1);
    (i, j)
}

/// Nearest-neighbour sampling of an ERP mask into the viewport.
pub fn sample_mask(mask: &Mask, grid: &SamplingGrid) -> Result<Mask> {
    let size = grid.erp_size();
    if mask.dims() != (size.width(), size.height()) {
        return Err(Error::DimensionMismatch {
            expected: (size.width(), size.height()),
            found: mask.dims(),
        });
    }
    Ok(Mask::from_fn(grid.cols(), grid.rows(), |i, j| {
        let (u, v) = nearest_pixel(grid.get(i, j), size);
        mask.get(u, v)
    }))
}

/// Worst-case sampling stride of a viewport of `local_width` columns.
pub fn default_dilation_radius(size: ErpSize, local_width: usize) -> usize {
    size.width().div_ceil(local_width.max(1))
}

/// Scatters a local mask onto the ERP frame and closes the scatter holes
/// with a disc of `dilation_radius` (wrap-aware in longitude).
pub fn lift_mask(local: &Mask, grid: &SamplingGrid, size: ErpSize, dilation_radius: usize) -> Result<Mask> {
    if local.dims() != (grid.cols(), grid.rows()) {
        return Err(Error::DimensionMismatch {
            expected: (grid.cols(), grid.rows()),
            found: local.dims(),
        });
    }
    if size != grid.erp_size() {
        return Err(Error::domain("grid was built for a different ERP size"));
    }
    let mut out = Mask::for_erp(size);
    for (i, j) in local.iter_set() {
        let (u, v) = nearest_pixel(grid.get(i, j), size);
        out.set(u, v, true);
    }
    Ok(out.close(dilation_radius, true))
}

/// Maps a local box prediction back onto the full frame as `kind`.
///
/// The box interior is sampled on a dense `DEFAULT_BOX_SAMPLES^2` lattice
/// (clamped to the local image), every sample is pushed through the grid,
/// and the requested representation is fitted to the resulting point set.
pub fn lift_box(local_box: &RBBox, grid: &SamplingGrid, kind: RepresentationKind) -> Result<Region> {
    lift_box_with(local_box, grid, kind, DEFAULT_BOX_SAMPLES)
}

pub fn lift_box_with(
    local_box: &RBBox,
    grid: &SamplingGrid,
    kind: RepresentationKind,
    samples: usize,
) -> Result<Region> {
    let (cols, rows) = (grid.cols() as f64, grid.rows() as f64);
    let frame = [(0.0, 0.0), (cols, 0.0), (cols, rows), (0.0, rows)];
    if polygon_area(&clip_convex(&local_box.corners(), &frame)) <= 0.0 {
        return Err(Error::BoxOutside);
    }
    let n = samples.max(2);
    let (s, c) = local_box.gamma.sin_cos();
    let mut dirs: Vec<Vector3<f64>> = Vec::with_capacity(n * n);
    for b in 0..n {
        let q = (b as f64 / (n - 1) as f64 - 0.5) * local_box.h;
        for a in 0..n {
            let p = (a as f64 / (n - 1) as f64 - 0.5) * local_box.w;
            let x = (local_box.cx + p * c - q * s).clamp(0.0, cols);
            let y = (local_box.cy + p * s + q * c).clamp(0.0, rows);
            dirs.push(grid.local_to_dir(x, y));
        }
    }
    let size = grid.erp_size();
    let pixels = || -> Vec<PixelCoord> { dirs.iter().map(|d| vec_to_pixel(d, size)).collect() };
    Ok(match kind {
        RepresentationKind::BBox => Region::BBox(bbox_of_points(&pixels(), size)?),
        RepresentationKind::RBBox => Region::RBBox(rbbox_of_points(&pixels(), size)?),
        RepresentationKind::Bfov => Region::Bfov(bfov_of_points(&dirs, size, false)?),
        RepresentationKind::RBfov => Region::Bfov(bfov_of_points(&dirs, size, true)?),
    })
}
