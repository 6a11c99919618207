//! Contrast code image: per-pixel choice of the patch size whose contents
//! are most homogeneous.
//!
//! Patch statistics pool all three channels. The window sums come from
//! summed-area tables over a fixed-point copy of the image (24 fractional
//! bits), so every window sum is exact and the result does not depend on
//! where in the image a window sits.

use crate::error::{invalid, Error, Result};
use crate::filter::clamp_index;
use crate::image::ImageF;

pub const MIN_CODE: u8 = 1;
pub const MAX_CODE: u8 = 7;
pub const DEFAULT_TOLERANCE: f64 = 0.005;

const PAD: usize = MAX_CODE as usize;
const FIXED_ONE: f64 = (1u64 << 24) as f64;

/// Per-pixel patch code `c` in `1..=7`; the patch side is `2c + 1`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ContrastCodeImage {
    width: usize,
    height: usize,
    codes: Vec<u8>,
}

impl ContrastCodeImage {
    pub fn new(width: usize, height: usize, codes: Vec<u8>) -> Result<Self> {
        if width == 0 || height == 0 || codes.len() != width * height {
            return Err(Error::InvalidBuffer(format!(
                "{} codes do not describe a {width}x{height} image",
                codes.len()
            )));
        }
        if let Some(&bad) = codes.iter().find(|c| !(MIN_CODE..=MAX_CODE).contains(c)) {
            return Err(invalid("code", format!("{bad} is outside 1..=7")));
        }
        Ok(Self {
            width,
            height,
            codes,
        })
    }

    pub fn uniform(width: usize, height: usize, code: u8) -> Result<Self> {
        Self::new(width, height, vec![code; width * height])
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

    pub fn codes(&self) -> &[u8] {
        &self.codes
    }

    pub fn code(&self, x: usize, y: usize) -> u8 {
        self.codes[y * self.width + x]
    }

    /// Codes that occur at least once, ascending.
    pub fn present_codes(&self) -> Vec<u8> {
        let mut seen = [false; MAX_CODE as usize + 1];
        for &c in &self.codes {
            seen[c as usize] = true;
        }
        (MIN_CODE..=MAX_CODE).filter(|&c| seen[c as usize]).collect()
    }

    pub fn mean_code(&self) -> f64 {
        self.codes.iter().map(|&c| c as f64).sum::<f64>() / self.codes.len() as f64
    }

    /// Gray rendering with code `c` at intensity `c / 7`.
    pub fn to_image(&self) -> ImageF {
        let data = self
            .codes
            .iter()
            .map(|&c| c as f32 / MAX_CODE as f32)
            .collect();
        ImageF::from_raw(self.width, self.height, 1, data)
    }
}

pub(crate) fn check_code(code: u8) -> Result<()> {
    if !(MIN_CODE..=MAX_CODE).contains(&code) {
        return Err(invalid("code", format!("{code} is outside 1..=7")));
    }
    Ok(())
}

#[inline]
fn to_fixed(v: f32) -> i64 {
    (v as f64 * FIXED_ONE).round() as i64
}

/// Summed-area tables of the pooled channel values and their squares over
/// the replicate-padded image.
struct PatchMoments {
    stride: usize,
    sums: Vec<i64>,
    squares: Vec<i128>,
}

impl PatchMoments {
    fn new(img: &ImageF) -> Self {
        let (w, h) = img.dims();
        let n = img.len();
        let fixed: Vec<i64> = img.data().iter().map(|&v| to_fixed(v)).collect();
        let (pw, ph) = (w + 2 * PAD, h + 2 * PAD);
        let stride = pw + 1;
        let mut sums = vec![0i64; stride * (ph + 1)];
        let mut squares = vec![0i128; stride * (ph + 1)];
        for py in 0..ph {
            let sy = clamp_index(py as isize - PAD as isize, h);
            let (mut row_s, mut row_q) = (0i64, 0i128);
            for px in 0..pw {
                let sx = clamp_index(px as isize - PAD as isize, w);
                let i = sy * w + sx;
                for c in 0..img.channels() {
                    let v = fixed[c * n + i];
                    row_s += v;
                    row_q += v as i128 * v as i128;
                }
                let at = (py + 1) * stride + px + 1;
                sums[at] = sums[at - stride] + row_s;
                squares[at] = squares[at - stride] + row_q;
            }
        }
        Self {
            stride,
            sums,
            squares,
        }
    }

    /// Population std of the pooled samples in the `(2i+1)^2` patch at `(x, y)`.
    fn std(&self, x: usize, y: usize, i: usize, channels: usize) -> f64 {
        let k = 2 * i + 1;
        let (x0, y0) = (x + PAD - i, y + PAD - i);
        let (x1, y1) = (x0 + k, y0 + k);
        let s = self.stride;
        let sum = self.sums[y1 * s + x1] - self.sums[y0 * s + x1] - self.sums[y1 * s + x0]
            + self.sums[y0 * s + x0];
        let sq = self.squares[y1 * s + x1] - self.squares[y0 * s + x1]
            - self.squares[y1 * s + x0]
            + self.squares[y0 * s + x0];
        let n = (channels * k * k) as i128;
        let spread = n * sq - sum as i128 * sum as i128;
        (spread as f64).sqrt() / (n as f64 * FIXED_ONE)
    }
}

/// Standard deviation of all channel values inside the `(2i+1) x (2i+1)`
/// patch around each pixel.
pub fn local_std(img: &ImageF, code: u8) -> Result<ImageF> {
    img.expect_channels(3)?;
    check_code(code)?;
    let moments = PatchMoments::new(img);
    let (w, h) = img.dims();
    let mut out = Vec::with_capacity(w * h);
    for y in 0..h {
        for x in 0..w {
            out.push(moments.std(x, y, code as usize, 3) as f32);
        }
    }
    Ok(ImageF::from_raw(w, h, 1, out))
}

/// Selects, per pixel, the code minimizing `std_i - tolerance * (i - 1)`.
/// Ties go to the larger code.
pub fn compute_cci(img: &ImageF, tolerance: f64) -> Result<ContrastCodeImage> {
    img.expect_channels(3)?;
    if !(tolerance >= 0.0 && tolerance.is_finite()) {
        return Err(invalid(
            "tolerance",
            format!("must be a finite nonnegative number, got {tolerance}"),
        ));
    }
    let moments = PatchMoments::new(img);
    let (w, h) = img.dims();
    let mut codes = Vec::with_capacity(w * h);
    for y in 0..h {
        for x in 0..w {
            let mut best = (f64::INFINITY, MIN_CODE);
            for code in MIN_CODE..=MAX_CODE {
                let i = code as usize;
                let score = moments.std(x, y, i, 3) - tolerance * (i - 1) as f64;
                if score <= best.0 {
                    best = (score, code);
                }
            }
            codes.push(best.1);
        }
    }
    Ok(ContrastCodeImage {
        width: w,
        height: h,
        codes,
    })
}
