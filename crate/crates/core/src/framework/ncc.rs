use std::sync::Arc;

use rustfft::num_complex::Complex;
use rustfft::{Fft, FftPlanner};

use super::{LocalOutput, LocalTarget, LocalTracker, TrackerUpdate};
use crate::error::{Error, Result};
use crate::remap::LocalImage;

/// Scores below this count as a lost target.
pub const DEFAULT_LOST_THRESHOLD: f64 = 0.2;

struct Template {
    w: usize,
    h: usize,
    /// zero-mean template values, row-major
    values: Vec<f64>,
    norm: f64,
}

/// Normalized cross-correlation template matcher. The template is cut from
/// the first local view and searched exhaustively in every later view.
pub struct NccTracker {
    template: Option<Template>,
    pub lost_threshold: f64,
}

impl Default for NccTracker {
    fn default() -> Self {
        Self {
            template: None,
            lost_threshold: DEFAULT_LOST_THRESHOLD,
        }
    }
}

impl NccTracker {
    pub fn new() -> Self {
        Self::default()
    }
}

/// Summed-area table with one row/column of zero padding.
fn integral(values: &[f64], w: usize, h: usize) -> Vec<f64> {
    let mut s = vec![0.0; (w + 1) * (h + 1)];
    for j in 0..h {
        let mut row = 0.0;
        for i in 0..w {
            row += values[j * w + i];
            s[(j + 1) * (w + 1) + i + 1] = s[j * (w + 1) + i + 1] + row;
        }
    }
    s
}

fn window_sum(s: &[f64], w: usize, x: usize, y: usize, tw: usize, th: usize) -> f64 {
    let stride = w + 1;
    s[(y + th) * stride + x + tw] - s[y * stride + x + tw] - s[(y + th) * stride + x] + s[y * stride + x]
}

fn fft2(data: &mut [Complex<f64>], w: usize, h: usize, row: &Arc<dyn Fft<f64>>, col: &Arc<dyn Fft<f64>>) {
    for r in data.chunks_exact_mut(w) {
        row.process(r);
    }
    let mut column = vec![Complex::default(); h];
    for i in 0..w {
        for j in 0..h {
            column[j] = data[j * w + i];
        }
        col.process(&mut column);
        for j in 0..h {
            data[j * w + i] = column[j];
        }
    }
}

/// Correlation `c(x, y) = sum T(a, b) I(x + a, y + b)` for all offsets,
/// computed cyclically over the image size (exact for valid offsets).
fn cross_correlate(image: &[f64], w: usize, h: usize, t: &Template) -> Vec<f64> {
    let mut planner = FftPlanner::new();
    let fw = planner.plan_fft_forward(w);
    let fh = planner.plan_fft_forward(h);
    let iw = planner.plan_fft_inverse(w);
    let ih = planner.plan_fft_inverse(h);
    let mut a: Vec<Complex<f64>> = image.iter().map(|&v| Complex::new(v, 0.0)).collect();
    let mut b = vec![Complex::default(); w * h];
    for j in 0..t.h {
        for i in 0..t.w {
            b[j * w + i] = Complex::new(t.values[j * t.w + i], 0.0);
        }
    }
    fft2(&mut a, w, h, &fw, &fh);
    fft2(&mut b, w, h, &fw, &fh);
    for (x, y) in a.iter_mut().zip(&b) {
        *x *= y.conj();
    }
    fft2(&mut a, w, h, &iw, &ih);
    let scale = 1.0 / (w * h) as f64;
    a.iter().map(|c| c.re * scale).collect()
}

/// Best normalized correlation position `(x, y, score)` of `t` in `image`.
fn best_match(image: &[f64], w: usize, h: usize, t: &Template) -> (usize, usize, f64) {
    let corr = cross_correlate(image, w, h, t);
    let s1 = integral(image, w, h);
    let sq: Vec<f64> = image.iter().map(|v| v * v).collect();
    let s2 = integral(&sq, w, h);
    let n = (t.w * t.h) as f64;
    let mut best = (0, 0, f64::NEG_INFINITY);
    for y in 0..=h - t.h {
        for x in 0..=w - t.w {
            let sum = window_sum(&s1, w, x, y, t.w, t.h);
            let var = window_sum(&s2, w, x, y, t.w, t.h) - sum * sum / n;
            let score = if var <= 1e-9 || t.norm <= 1e-9 {
                0.0
            } else {
                corr[y * w + x] / (t.norm * var.sqrt())
            };
            if score > best.2 {
                best = (x, y, score);
            }
        }
    }
    (best.0, best.1, best.2.clamp(0.0, 1.0))
}

impl LocalTracker for NccTracker {
    fn name(&self) -> &str {
        "ncc"
    }

    fn init(&mut self, image: &LocalImage, target: &LocalTarget) -> Result<()> {
        let (w, h) = (image.width(), image.height());
        let (x0, y0, x1, y1) = match target {
            LocalTarget::Box(b) => {
                let c = b.corners();
                let xs = c.iter().map(|p| p.0);
                let ys = c.iter().map(|p| p.1);
                (
                    xs.clone().fold(f64::INFINITY, f64::min).floor().max(0.0) as usize,
                    ys.clone().fold(f64::INFINITY, f64::min).floor().max(0.0) as usize,
                    (xs.fold(f64::NEG_INFINITY, f64::max).ceil() as usize).min(w),
                    (ys.fold(f64::NEG_INFINITY, f64::max).ceil() as usize).min(h),
                )
            }
            LocalTarget::Mask(m) => {
                let (i0, j0, i1, j1) = m.pixel_bounds().ok_or(Error::EmptyMask)?;
                (i0, j0, i1 + 1, j1 + 1)
            }
        };
        let bw = x1.saturating_sub(x0);
        let bh = y1.saturating_sub(y0);
        if bw == 0 || bh == 0 {
            return Err(Error::BoxOutside);
        }
        if bw > w || bh > h {
            return Err(Error::TemplateTooLarge {
                template: (bw, bh),
                image: (w, h),
            });
        }
        let gray = image.to_gray();
        let mut values: Vec<f64> = (y0..y1)
            .flat_map(|j| (x0..x1).map(move |i| (i, j)))
            .map(|(i, j)| gray[j * w + i])
            .collect();
        let mean = values.iter().sum::<f64>() / values.len() as f64;
        values.iter_mut().for_each(|v| *v -= mean);
        let norm = values.iter().map(|v| v * v).sum::<f64>().sqrt();
        self.template = Some(Template {
            w: bw,
            h: bh,
            values,
            norm,
        });
        Ok(())
    }

    fn update(&mut self, image: &LocalImage) -> Result<TrackerUpdate> {
        let t = self.template.as_ref().ok_or(Error::NotInitialized)?;
        let (w, h) = (image.width(), image.height());
        if t.w > w || t.h > h {
            return Err(Error::TemplateTooLarge {
                template: (t.w, t.h),
                image: (w, h),
            });
        }
        let (x, y, score) = best_match(&image.to_gray(), w, h, t);
        if score < self.lost_threshold {
            return Ok(TrackerUpdate::Lost);
        }
        let b = crate::regions::RBBox::new(
            x as f64 + t.w as f64 / 2.0,
            y as f64 + t.h as f64 / 2.0,
            t.w as f64,
            t.h as f64,
            0.0,
        )?;
        Ok(TrackerUpdate::Prediction {
            output: LocalOutput::Box(b),
            confidence: score,
        })
    }
}
