//! No-reference and paired quality measures.
//!
//! * [`gcf`]: global contrast factor, a weighted sum of mean local contrast
//!   over successively halved resolutions of a gamma-mapped luminance.
//! * [`e_r_scores`]: rate of newly visible edges and geometric-mean gradient
//!   gain on the enhanced image's visible edges. Visibility here is a
//!   thresholded Sobel magnitude, so the numbers are only comparable with
//!   other runs of this crate.
//! * [`mean_luminance`]: a plain darkness proxy.

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::filter::clamp_index;
use crate::image::{intensity, ImageF};

/// Sobel magnitude (in per-pixel intensity units) above which an edge is visible.
pub const EDGE_THRESHOLD: f64 = 0.1;

const GCF_RESOLUTIONS: usize = 9;
const GAMMA: f64 = 2.2;
const GRADIENT_FLOOR: f64 = 1e-4;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MetricsReport {
    /// Global contrast factor of the enhanced image.
    pub gcf: f64,
    /// Absent when the original has no visible edges.
    pub e_score: Option<f64>,
    pub r_score: f64,
    pub mean_luminance_in: f64,
    pub mean_luminance_out: f64,
}

impl MetricsReport {
    pub fn compute(original: &ImageF, enhanced: &ImageF) -> Result<Self> {
        let edges = e_r_scores(original, enhanced)?;
        Ok(Self {
            gcf: gcf(enhanced),
            e_score: edges.e,
            r_score: edges.r,
            mean_luminance_in: mean_luminance(original),
            mean_luminance_out: mean_luminance(enhanced),
        })
    }
}

/// Weight of resolution `r` (1-based) in the contrast sum.
pub fn gcf_weight(r: usize) -> f64 {
    let t = r as f64 / GCF_RESOLUTIONS as f64;
    (-0.406385 * t + 0.334573) * t + 0.0877526
}

/// Global contrast factor. Three-channel images are reduced to luminance.
pub fn gcf(img: &ImageF) -> f64 {
    let base = intensity(img);
    let (mut w, mut h) = base.dims();
    let mut level: Vec<f64> = base.plane(0).iter().map(|&v| v as f64).collect();
    let mut total = 0.0;
    for r in 1..=GCF_RESOLUTIONS {
        if w.min(h) < 2 {
            break;
        }
        let mapped: Vec<f64> = level.iter().map(|v| v.max(0.0).powf(1.0 / GAMMA)).collect();
        total += gcf_weight(r) * mean_local_contrast(&mapped, w, h);
        let (next, nw, nh) = halve(&level, w, h);
        level = next;
        w = nw;
        h = nh;
    }
    total
}

/// Mean over pixels of the mean absolute difference to the existing
/// 4-neighbours.
fn mean_local_contrast(l: &[f64], w: usize, h: usize) -> f64 {
    let mut sum = 0.0;
    for y in 0..h {
        for x in 0..w {
            let v = l[y * w + x];
            let mut acc = 0.0;
            let mut n = 0u32;
            let mut visit = |u: f64| {
                acc += (v - u).abs();
                n += 1;
            };
            if x > 0 {
                visit(l[y * w + x - 1]);
            }
            if x + 1 < w {
                visit(l[y * w + x + 1]);
            }
            if y > 0 {
                visit(l[(y - 1) * w + x]);
            }
            if y + 1 < h {
                visit(l[(y + 1) * w + x]);
            }
            sum += acc / n as f64;
        }
    }
    sum / (w * h) as f64
}

/// Area-weighted reduction to `ceil(n / 2)` samples per axis. For odd sizes
/// each output sample covers 2n/(n+1) input samples, so the reduction
/// commutes with flips.
fn halve(src: &[f64], w: usize, h: usize) -> (Vec<f64>, usize, usize) {
    let (nw, nh) = (w.div_ceil(2), h.div_ceil(2));
    let wx = area_taps(w, nw);
    let wy = area_taps(h, nh);
    let mut rows = vec![0.0; nw * h];
    for y in 0..h {
        for (ox, taps) in wx.iter().enumerate() {
            rows[y * nw + ox] = weighted_sum(taps, |i| src[y * w + i]);
        }
    }
    let mut out = vec![0.0; nw * nh];
    for (oy, taps) in wy.iter().enumerate() {
        for x in 0..nw {
            out[oy * nw + x] = weighted_sum(taps, |i| rows[i * nw + x]);
        }
    }
    (out, nw, nh)
}

/// Sum of tap-weighted samples, offset by the first sample so that flat
/// input reproduces exactly.
fn weighted_sum(taps: &[(usize, f64)], sample: impl Fn(usize) -> f64) -> f64 {
    let base = sample(taps[0].0);
    base + taps.iter().map(|&(i, t)| t * (sample(i) - base)).sum::<f64>()
}

fn area_taps(n: usize, out: usize) -> Vec<Vec<(usize, f64)>> {
    let scale = n as f64 / out as f64;
    (0..out)
        .map(|o| {
            let (lo, hi) = (o as f64 * scale, (o + 1) as f64 * scale);
            (lo.floor() as usize..(hi.ceil() as usize).min(n))
                .filter_map(|i| {
                    let overlap = hi.min(i as f64 + 1.0) - lo.max(i as f64);
                    (overlap > 0.0).then_some((i, overlap / scale))
                })
                .collect()
        })
        .collect()
}

/// Sobel gradient magnitude normalized so a unit step reads 1.
pub fn sobel_magnitude(img: &ImageF) -> Vec<f64> {
    let lum = intensity(img);
    let (w, h) = lum.dims();
    let p = lum.plane(0);
    let at = |x: isize, y: isize| p[clamp_index(y, h) * w + clamp_index(x, w)] as f64;
    let mut out = Vec::with_capacity(w * h);
    for y in 0..h as isize {
        for x in 0..w as isize {
            let gx = (at(x + 1, y - 1) + 2.0 * at(x + 1, y) + at(x + 1, y + 1)
                - at(x - 1, y - 1)
                - 2.0 * at(x - 1, y)
                - at(x - 1, y + 1))
                / 4.0;
            let gy = (at(x - 1, y + 1) + 2.0 * at(x, y + 1) + at(x + 1, y + 1)
                - at(x - 1, y - 1)
                - 2.0 * at(x, y - 1)
                - at(x + 1, y - 1))
                / 4.0;
            out.push((gx * gx + gy * gy).sqrt());
        }
    }
    out
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EdgeScores {
    /// `(n_enhanced - n_original) / n_original`; absent when `n_original == 0`.
    pub e: Option<f64>,
    /// Geometric mean of gradient ratios on the enhanced image's visible
    /// edges; 1 when it has none.
    pub r: f64,
    pub visible_original: usize,
    pub visible_enhanced: usize,
}

pub fn e_r_scores(original: &ImageF, enhanced: &ImageF) -> Result<EdgeScores> {
    original.expect_same_size(enhanced)?;
    let go = sobel_magnitude(original);
    let ge = sobel_magnitude(enhanced);
    let n_o = go.iter().filter(|&&g| g >= EDGE_THRESHOLD).count();
    let mut n_e = 0usize;
    let mut log_sum = 0.0;
    for (&e, &o) in ge.iter().zip(&go) {
        if e >= EDGE_THRESHOLD {
            n_e += 1;
            log_sum += (e / o.max(GRADIENT_FLOOR)).ln();
        }
    }
    let e = (n_o > 0).then(|| (n_e as f64 - n_o as f64) / n_o as f64);
    let r = if n_e > 0 { (log_sum / n_e as f64).exp() } else { 1.0 };
    Ok(EdgeScores {
        e,
        r,
        visible_original: n_o,
        visible_enhanced: n_e,
    })
}

/// Mean of per-pixel luminance.
pub fn mean_luminance(img: &ImageF) -> f64 {
    intensity(img).mean()
}
