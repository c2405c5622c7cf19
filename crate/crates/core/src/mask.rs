//! Binary target masks on ERP frames and local viewports.

use crate::error::{Error, Result};
use crate::geom::ErpSize;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Mask {
    width: usize,
    height: usize,
    data: Vec<bool>,
}

impl Mask {
    pub fn new(width: usize, height: usize) -> Self {
        Self {
            width,
            height,
            data: vec![false; width * height],
        }
    }

    pub fn full(width: usize, height: usize) -> Self {
        Self {
            width,
            height,
            data: vec![true; width * height],
        }
    }

    pub fn for_erp(size: ErpSize) -> Self {
        Self::new(size.width(), size.height())
    }

    pub fn from_vec(width: usize, height: usize, data: Vec<bool>) -> Result<Self> {
        if data.len() != width * height {
            return Err(Error::domain(format!(
                "mask buffer of {} entries does not match {width}x{height}",
                data.len()
            )));
        }
        Ok(Self { width, height, data })
    }

    /// Builds a mask from 8-bit samples; values above 127 are foreground.
    pub fn from_u8(width: usize, height: usize, samples: &[u8]) -> Result<Self> {
        Self::from_vec(width, height, samples.iter().map(|&s| s > 127).collect())
    }

    pub fn from_fn(width: usize, height: usize, mut f: impl FnMut(usize, usize) -> bool) -> Self {
        let mut data = Vec::with_capacity(width * height);
        for j in 0..height {
            for i in 0..width {
                data.push(f(i, j));
            }
        }
        Self { width, height, data }
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn dims(&self) -> (usize, usize) {
        (self.width, self.height)
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> bool {
        self.data[j * self.width + i]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, value: bool) {
        self.data[j * self.width + i] = value;
    }

    pub fn as_slice(&self) -> &[bool] {
        &self.data
    }

    pub fn count(&self) -> usize {
        self.data.iter().filter(|&&b| b).count()
    }

    pub fn is_empty(&self) -> bool {
        !self.data.iter().any(|&b| b)
    }

    /// Set pixels as `(i, j)` pairs in row-major order.
    pub fn iter_set(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        let w = self.width;
        self.data
            .iter()
            .enumerate()
            .filter(|(_, &b)| b)
            .map(move |(k, _)| (k % w, k / w))
    }

    pub fn to_u8(&self) -> Vec<u8> {
        self.data.iter().map(|&b| if b { 255 } else { 0 }).collect()
    }

    pub fn union(&self, other: &Mask) -> Result<Mask> {
        self.check_dims(other)?;
        let data = self.data.iter().zip(&other.data).map(|(a, b)| *a || *b).collect();
        Ok(Mask {
            width: self.width,
            height: self.height,
            data,
        })
    }

    pub fn check_dims(&self, other: &Mask) -> Result<()> {
        if self.dims() != other.dims() {
            return Err(Error::DimensionMismatch {
                expected: self.dims(),
                found: other.dims(),
            });
        }
        Ok(())
    }

    /// Rolls columns right by `k` (negative rolls left), wrapping around.
    pub fn roll_columns(&self, k: isize) -> Mask {
        let w = self.width as isize;
        Mask::from_fn(self.width, self.height, |i, j| {
            let src = (i as isize - k).rem_euclid(w) as usize;
            self.get(src, j)
        })
    }

    /// Plain (non-wrapping) inclusive pixel bounds `(i0, j0, i1, j1)`.
    pub fn pixel_bounds(&self) -> Option<(usize, usize, usize, usize)> {
        let mut b: Option<(usize, usize, usize, usize)> = None;
        for (i, j) in self.iter_set() {
            b = Some(match b {
                None => (i, j, i, j),
                Some((a0, b0, a1, b1)) => (a0.min(i), b0.min(j), a1.max(i), b1.max(j)),
            });
        }
        b
    }

    /// Pixels that are set and have at least one unset 8-neighbour.
    ///
    /// With `wrap_columns` the left and right image edges are adjacent
    /// (longitude wrap). Neighbours beyond the top and bottom rows are
    /// ignored, so rows touching the poles are not boundary by themselves.
    pub fn boundary(&self, wrap_columns: bool) -> Mask {
        self.edge_pixels(wrap_columns, false)
    }

    /// Like [`Mask::boundary`], but pixels on the first and last rows always
    /// count as outline. Used where the outermost pixels must be kept, e.g.
    /// to feed a convex hull.
    pub fn outline(&self, wrap_columns: bool) -> Mask {
        self.edge_pixels(wrap_columns, true)
    }

    fn edge_pixels(&self, wrap_columns: bool, rows_closed: bool) -> Mask {
        let (w, h) = (self.width as isize, self.height as isize);
        let mut out = Mask::new(self.width, self.height);
        for (i, j) in self.iter_set() {
            let (i, j) = (i as isize, j as isize);
            let mut edge = false;
            'scan: for dj in -1..=1 {
                let nj = j + dj;
                if nj < 0 || nj >= h {
                    if rows_closed {
                        edge = true;
                        break 'scan;
                    }
                    continue;
                }
                for di in -1..=1 {
                    if di == 0 && dj == 0 {
                        continue;
                    }
                    let mut ni = i + di;
                    if ni < 0 || ni >= w {
                        if !wrap_columns {
                            edge = true;
                            break 'scan;
                        }
                        ni = ni.rem_euclid(w);
                    }
                    if !self.get(ni as usize, nj as usize) {
                        edge = true;
                        break 'scan;
                    }
                }
            }
            if edge {
                out.set(i as usize, j as usize, true);
            }
        }
        out
    }

    /// Dilation by a disc of `radius` pixels. Columns wrap when requested;
    /// offsets beyond the top/bottom rows are dropped.
    pub fn dilate(&self, radius: usize, wrap_columns: bool) -> Mask {
        let offsets = disc_offsets(radius);
        let (w, h) = (self.width as isize, self.height as isize);
        let mut out = Mask::new(self.width, self.height);
        for (i, j) in self.iter_set() {
            for &(di, dj) in &offsets {
                let nj = j as isize + dj;
                if nj < 0 || nj >= h {
                    continue;
                }
                let mut ni = i as isize + di;
                if ni < 0 || ni >= w {
                    if !wrap_columns {
                        continue;
                    }
                    ni = ni.rem_euclid(w);
                }
                out.set(ni as usize, nj as usize, true);
            }
        }
        out
    }

    /// Erosion by a disc of `radius`, dual to [`Mask::dilate`]: offsets that
    /// leave the image vertically (or horizontally without wrap) do not erode.
    pub fn erode(&self, radius: usize, wrap_columns: bool) -> Mask {
        let offsets = disc_offsets(radius);
        let (w, h) = (self.width as isize, self.height as isize);
        let mut out = Mask::new(self.width, self.height);
        for (i, j) in self.iter_set() {
            let keep = offsets.iter().all(|&(di, dj)| {
                let nj = j as isize + dj;
                if nj < 0 || nj >= h {
                    return true;
                }
                let mut ni = i as isize + di;
                if ni < 0 || ni >= w {
                    if !wrap_columns {
                        return true;
                    }
                    ni = ni.rem_euclid(w);
                }
                self.get(ni as usize, nj as usize)
            });
            if keep {
                out.set(i, j, true);
            }
        }
        out
    }

    /// Morphological closing (dilate then erode with the same disc).
    pub fn close(&self, radius: usize, wrap_columns: bool) -> Mask {
        if radius == 0 {
            return self.clone();
        }
        self.dilate(radius, wrap_columns).erode(radius, wrap_columns)
    }
}

/// Integer offsets `(di, dj)` with `di^2 + dj^2 <= radius^2`.
pub fn disc_offsets(radius: usize) -> Vec<(isize, isize)> {
    let r = radius as isize;
    let mut v = Vec::new();
    for dj in -r..=r {
        for di in -r..=r {
            if di * di + dj * dj <= r * r {
                v.push((di, dj));
            }
        }
    }
    v
}
