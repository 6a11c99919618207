//! Windowed kernels shared by the pipeline stages.
//!
//! Every operator here treats the image border by replicating the edge
//! sample (coordinates are clamped into the image).

use crate::error::{invalid, Result};
use crate::image::ImageF;

/// 1-D binomial taps `[1, 4, 6, 4, 1] / 16`.
pub const BINOMIAL5: [f32; 5] = [1.0 / 16.0, 4.0 / 16.0, 6.0 / 16.0, 4.0 / 16.0, 1.0 / 16.0];

/// `1/8 * [-1 -1 -1; -1 8 -1; -1 -1 -1]`.
pub const LAPLACIAN3: [[f32; 3]; 3] = [
    [-0.125, -0.125, -0.125],
    [-0.125, 1.0, -0.125],
    [-0.125, -0.125, -0.125],
];

/// Normalized Gaussian taps with radius `ceil(3 * sigma)`.
pub fn gaussian_kernel(sigma: f32) -> Vec<f32> {
    let radius = (3.0 * sigma).ceil() as isize;
    let denom = 2.0 * (sigma as f64) * (sigma as f64);
    let taps: Vec<f64> = (-radius..=radius)
        .map(|i| (-((i * i) as f64) / denom).exp())
        .collect();
    let sum: f64 = taps.iter().sum();
    taps.iter().map(|t| (t / sum) as f32).collect()
}

/// Separable Gaussian blur of every channel.
pub fn gaussian_blur(img: &ImageF, sigma: f32) -> Result<ImageF> {
    if !(sigma > 0.0 && sigma.is_finite()) {
        return Err(invalid("sigma", format!("must be positive, got {sigma}")));
    }
    let kernel = gaussian_kernel(sigma);
    Ok(convolve_separable(img, &kernel, &kernel))
}

/// Blur with the separable 5x5 binomial kernel.
pub fn blur_binomial5(img: &ImageF) -> ImageF {
    convolve_separable(img, &BINOMIAL5, &BINOMIAL5)
}

/// Applies `row_kernel` horizontally then `col_kernel` vertically. Both must
/// have odd length.
pub fn convolve_separable(img: &ImageF, row_kernel: &[f32], col_kernel: &[f32]) -> ImageF {
    let (w, h) = img.dims();
    let mut out = Vec::with_capacity(img.data().len());
    for c in 0..img.channels() {
        let rows = convolve_rows(img.plane(c), w, h, row_kernel);
        out.extend(convolve_cols(&rows, w, h, col_kernel));
    }
    ImageF::from_raw(w, h, img.channels(), out)
}

fn convolve_rows(src: &[f32], w: usize, h: usize, kernel: &[f32]) -> Vec<f32> {
    let r = kernel.len() / 2;
    let mut out = vec![0.0; w * h];
    let mut padded = vec![0.0; w + 2 * r];
    for y in 0..h {
        let row = &src[y * w..(y + 1) * w];
        for (i, p) in padded.iter_mut().enumerate() {
            *p = row[clamp_index(i as isize - r as isize, w)];
        }
        for (x, o) in out[y * w..(y + 1) * w].iter_mut().enumerate() {
            *o = kernel
                .iter()
                .zip(&padded[x..x + kernel.len()])
                .map(|(k, v)| k * v)
                .sum();
        }
    }
    out
}

fn convolve_cols(src: &[f32], w: usize, h: usize, kernel: &[f32]) -> Vec<f32> {
    let r = kernel.len() as isize / 2;
    let mut out = vec![0.0; w * h];
    for y in 0..h {
        let dst = &mut out[y * w..(y + 1) * w];
        for (i, &k) in kernel.iter().enumerate() {
            let sy = clamp_index(y as isize + i as isize - r, h);
            let row = &src[sy * w..(sy + 1) * w];
            for (d, &v) in dst.iter_mut().zip(row) {
                *d += k * v;
            }
        }
    }
    out
}

/// Direct 3x3 correlation of a single plane.
pub fn convolve3x3(src: &[f32], w: usize, h: usize, kernel: &[[f32; 3]; 3]) -> Vec<f32> {
    let mut out = vec![0.0; w * h];
    for y in 0..h {
        for x in 0..w {
            let mut acc = 0.0;
            for (dy, krow) in kernel.iter().enumerate() {
                let sy = clamp_index(y as isize + dy as isize - 1, h);
                for (dx, &k) in krow.iter().enumerate() {
                    let sx = clamp_index(x as isize + dx as isize - 1, w);
                    acc += k * src[sy * w + sx];
                }
            }
            out[y * w + x] = acc;
        }
    }
    out
}

#[inline]
pub(crate) fn clamp_index(i: isize, len: usize) -> usize {
    i.clamp(0, len as isize - 1) as usize
}

/// Running min or max over windows of `2 * radius + 1` samples.
///
/// van Herk / Gil-Werman: two passes over blocks of the window length give
/// a constant number of comparisons per sample regardless of radius.
fn running_extreme(src: &[f32], radius: usize, op: fn(f32, f32) -> f32, out: &mut [f32]) {
    let n = src.len();
    if radius == 0 {
        out.copy_from_slice(src);
        return;
    }
    let k = 2 * radius + 1;
    let len = n + 2 * radius;
    let padded: Vec<f32> = (0..len)
        .map(|i| src[clamp_index(i as isize - radius as isize, n)])
        .collect();
    let mut prefix = vec![0.0; len];
    let mut suffix = vec![0.0; len];
    for i in 0..len {
        prefix[i] = if i % k == 0 {
            padded[i]
        } else {
            op(prefix[i - 1], padded[i])
        };
    }
    for i in (0..len).rev() {
        suffix[i] = if i == len - 1 || (i + 1) % k == 0 {
            padded[i]
        } else {
            op(suffix[i + 1], padded[i])
        };
    }
    for (j, o) in out.iter_mut().enumerate() {
        *o = op(suffix[j], prefix[j + k - 1]);
    }
}

fn square_extreme(src: &[f32], w: usize, h: usize, radius: usize, op: fn(f32, f32) -> f32) -> Vec<f32> {
    let mut rows = vec![0.0; w * h];
    for y in 0..h {
        running_extreme(&src[y * w..(y + 1) * w], radius, op, &mut rows[y * w..(y + 1) * w]);
    }
    let mut out = vec![0.0; w * h];
    let mut col = vec![0.0; h];
    let mut col_out = vec![0.0; h];
    for x in 0..w {
        for y in 0..h {
            col[y] = rows[y * w + x];
        }
        running_extreme(&col, radius, op, &mut col_out);
        for y in 0..h {
            out[y * w + x] = col_out[y];
        }
    }
    out
}

/// Minimum over the `(2r+1) x (2r+1)` square around each sample.
pub fn erode_plane(src: &[f32], w: usize, h: usize, radius: usize) -> Vec<f32> {
    square_extreme(src, w, h, radius, f32::min)
}

/// Maximum over the `(2r+1) x (2r+1)` square around each sample.
pub fn dilate_plane(src: &[f32], w: usize, h: usize, radius: usize) -> Vec<f32> {
    square_extreme(src, w, h, radius, f32::max)
}

/// Mean over the `(2r+1) x (2r+1)` square around each sample, computed from
/// a summed-area table of the replicate-padded plane.
pub fn box_mean(src: &[f64], w: usize, h: usize, radius: usize) -> Vec<f64> {
    let pw = w + 2 * radius;
    let ph = h + 2 * radius;
    let stride = pw + 1;
    let mut table = vec![0.0f64; stride * (ph + 1)];
    for py in 0..ph {
        let sy = clamp_index(py as isize - radius as isize, h);
        let mut row_sum = 0.0;
        for px in 0..pw {
            let sx = clamp_index(px as isize - radius as isize, w);
            row_sum += src[sy * w + sx];
            table[(py + 1) * stride + px + 1] = table[py * stride + px + 1] + row_sum;
        }
    }
    let k = 2 * radius + 1;
    let area = (k * k) as f64;
    let mut out = vec![0.0; w * h];
    for y in 0..h {
        for x in 0..w {
            let (x0, y0, x1, y1) = (x, y, x + k, y + k);
            let s = table[y1 * stride + x1] - table[y0 * stride + x1] - table[y1 * stride + x0]
                + table[y0 * stride + x0];
            out[y * w + x] = s / area;
        }
    }
    out
}
