//! Atmospheric lighting estimation over the inverted low-light image.
//!
//! The local model takes, per channel, the minimum over each pixel's own
//! contrast-guided patch, then the maximum of that minimum map over a wider
//! lighting window whose side shrinks as the local code grows.

use crate::cci::{check_code, ContrastCodeImage, MAX_CODE, MIN_CODE};
use crate::error::{invalid, Result};
use crate::filter::{dilate_plane, erode_plane, gaussian_blur};
use crate::image::{expect_dims, ImageF};

/// Floor applied to every lighting value so ratios against it stay bounded.
pub const LIGHT_FLOOR: f32 = 1e-3;

/// Spatial sigma used to smooth the local lighting field.
pub const LIGHT_SMOOTH_SIGMA: f32 = 10.0;

pub const DEFAULT_FRACTION: f64 = 0.002;

/// Per-pixel, per-channel atmospheric light in `[LIGHT_FLOOR, 1]`.
#[derive(Clone, Debug, PartialEq)]
pub struct LightingField(ImageF);

impl LightingField {
    /// Wraps a 3-channel image, flooring and capping it into range.
    pub fn new(img: ImageF) -> Result<Self> {
        img.expect_channels(3)?;
        Ok(Self::floored(img))
    }

    fn floored(img: ImageF) -> Self {
        Self(img.map(|v| v.clamp(LIGHT_FLOOR, 1.0)))
    }

    /// A field holding the same light vector everywhere.
    pub fn uniform(light: GlobalLight, width: usize, height: usize) -> Result<Self> {
        let img = ImageF::from_fn(width, height, 3, |_, _, c| light.0[c])?;
        Ok(Self(img))
    }

    pub fn image(&self) -> &ImageF {
        &self.0
    }

    pub fn into_image(self) -> ImageF {
        self.0
    }

    pub fn dims(&self) -> (usize, usize) {
        self.0.dims()
    }
}

/// One atmospheric light value per channel, in `[LIGHT_FLOOR, 1]`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GlobalLight(pub [f32; 3]);

/// Per-channel minimum over the `(2c+1)`-wide patch, where `c` is each
/// pixel's own code.
pub fn min_image(img: &ImageF, cci: &ContrastCodeImage) -> Result<ImageF> {
    img.expect_channels(3)?;
    expect_dims(img.dims(), cci.dims())?;
    let planes: Vec<Vec<f32>> = (0..3)
        .map(|c| eroded_by_code(img.plane(c), cci))
        .collect();
    Ok(ImageF::from_raw(img.width(), img.height(), 3, planes.concat()))
}

fn eroded_by_code(plane: &[f32], cci: &ContrastCodeImage) -> Vec<f32> {
    let (w, h) = cci.dims();
    let mut out = vec![0.0; w * h];
    for code in cci.present_codes() {
        let eroded = erode_plane(plane, w, h, code as usize);
        for ((o, &e), &c) in out.iter_mut().zip(&eroded).zip(cci.codes()) {
            if c == code {
                *o = e;
            }
        }
    }
    out
}

/// Dark channel with contrast-guided patch sizes: the channel-wise minimum
/// of [`min_image`].
pub fn dark_channel_cg(img: &ImageF, cci: &ContrastCodeImage) -> Result<ImageF> {
    img.expect_channels(3)?;
    expect_dims(img.dims(), cci.dims())?;
    // Minimum over channels commutes with the spatial minimum.
    let channel_min: Vec<f32> = img
        .plane(0)
        .iter()
        .zip(img.plane(1))
        .zip(img.plane(2))
        .map(|((&r, &g), &b)| r.min(g).min(b))
        .collect();
    let out = eroded_by_code(&channel_min, cci);
    Ok(ImageF::from_raw(img.width(), img.height(), 1, out))
}

/// Global light from the brightest `fraction` of dark-channel pixels: the
/// per-channel maximum of `img` over those positions.
///
/// Equal dark values are ranked by raster order.
pub fn global_atmosphere(img: &ImageF, dark: &ImageF, fraction: f64) -> Result<GlobalLight> {
    img.expect_channels(3)?;
    dark.expect_channels(1)?;
    img.expect_same_size(dark)?;
    if !(fraction > 0.0 && fraction <= 0.05) {
        return Err(invalid(
            "fraction",
            format!("must lie in (0, 0.05], got {fraction}"),
        ));
    }
    let values = dark.plane(0);
    let count = ((fraction * values.len() as f64).round() as usize).clamp(1, values.len());
    let mut order: Vec<usize> = (0..values.len()).collect();
    let brighter = |a: &usize, b: &usize| values[*b].total_cmp(&values[*a]).then(a.cmp(b));
    if count < order.len() {
        order.select_nth_unstable_by(count - 1, brighter);
    }
    let mut light = [LIGHT_FLOOR; 3];
    for &i in &order[..count] {
        for (c, l) in light.iter_mut().enumerate() {
            *l = l.max(img.plane(c)[i]);
        }
    }
    Ok(GlobalLight(light.map(|v| v.min(1.0))))
}

/// Side of the lighting window for multiplication factor `m` and code `c`:
/// `3m - (m/3)(c-1) = m(10-c)/3`, rounded to the nearest odd integer (ties
/// upward) and never below 3.
pub fn s_upsilon(m: u32, code: u8) -> Result<usize> {
    check_code(code)?;
    if m == 0 {
        return Err(invalid("m", "must be at least 1"));
    }
    // Exact in integers: pick odd k minimizing |3k - m(10-c)|.
    let num = m as i64 * (10 - code as i64);
    let q = num / 3;
    let lower = if q % 2 == 1 { q } else { q - 1 };
    let upper = lower + 2;
    let k = if (3 * upper - num).abs() <= (3 * lower - num).abs() {
        upper
    } else {
        lower
    };
    Ok(k.max(3) as usize)
}

/// Contrast-guided local lighting field, before smoothing.
pub fn local_cg_atmosphere(img: &ImageF, cci: &ContrastCodeImage, m: u32) -> Result<LightingField> {
    img.expect_channels(3)?;
    expect_dims(img.dims(), cci.dims())?;
    let sides: Vec<usize> = (MIN_CODE..=MAX_CODE)
        .map(|c| s_upsilon(m, c))
        .collect::<Result<_>>()?;
    let side_of = |code: u8| sides[(code - MIN_CODE) as usize];
    let mut distinct: Vec<usize> = cci.present_codes().into_iter().map(side_of).collect();
    distinct.dedup();

    let mins = min_image(img, cci)?;
    let (w, h) = img.dims();
    let mut data = vec![0.0; 3 * w * h];
    for c in 0..3 {
        let out = &mut data[c * w * h..(c + 1) * w * h];
        for &side in &distinct {
            let dilated = dilate_plane(mins.plane(c), w, h, side / 2);
            for ((o, &d), &code) in out.iter_mut().zip(&dilated).zip(cci.codes()) {
                if side_of(code) == side {
                    *o = d;
                }
            }
        }
    }
    Ok(LightingField::floored(ImageF::from_raw(w, h, 3, data)))
}

/// Per-channel Gaussian smoothing of the field with sigma 10.
pub fn smooth_lighting(field: &LightingField) -> LightingField {
    let blurred = gaussian_blur(&field.0, LIGHT_SMOOTH_SIGMA).expect("sigma is positive");
    LightingField::floored(blurred)
}
