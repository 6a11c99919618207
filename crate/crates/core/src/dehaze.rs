//! Transmission estimation, refinement and radiance recovery on the
//! inverted image, and the single-lighting-model enhancer built from them.

use serde::{Deserialize, Serialize};

use crate::cci::ContrastCodeImage;
use crate::error::{invalid, Result};
use crate::guided::guided_filter;
use crate::image::{clamp01, expect_dims, invert, luminance, ImageF};
use crate::lighting::{dark_channel_cg, local_cg_atmosphere, smooth_lighting, LightingField};

/// Per-pixel transmission in `[0, 1]`.
#[derive(Clone, Debug, PartialEq)]
pub struct TransmissionMap(ImageF);

impl TransmissionMap {
    /// Wraps a 1-channel image, clamping into `[0, 1]`.
    pub fn new(img: ImageF) -> Result<Self> {
        img.expect_channels(1)?;
        Ok(Self(clamp01(&img)))
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

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DehazeParams {
    /// Fraction of haze removed, in `[0, 1]`.
    pub omega: f64,
    /// Lower bound on the transmission used in recovery, in `(0, 1)`.
    pub t0: f64,
    pub guided_radius: usize,
    pub guided_eps: f64,
    pub guided_subsample: usize,
}

impl Default for DehazeParams {
    fn default() -> Self {
        Self {
            omega: 0.95,
            t0: 0.1,
            guided_radius: 16,
            guided_eps: 1e-3,
            guided_subsample: 4,
        }
    }
}

impl DehazeParams {
    pub fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.omega) {
            return Err(invalid("omega", format!("must lie in [0, 1], got {}", self.omega)));
        }
        if !(self.t0 > 0.0 && self.t0 < 1.0) {
            return Err(invalid("t0", format!("must lie in (0, 1), got {}", self.t0)));
        }
        if self.guided_radius == 0 {
            return Err(invalid("guided_radius", "must be at least 1"));
        }
        if !(self.guided_eps > 0.0 && self.guided_eps.is_finite()) {
            return Err(invalid(
                "guided_eps",
                format!("must be positive, got {}", self.guided_eps),
            ));
        }
        if self.guided_subsample == 0 {
            return Err(invalid("guided_subsample", "must be at least 1"));
        }
        Ok(())
    }
}

/// `t = 1 - omega * darkcg(min(inv / light, 1))`.
pub fn transmission_cg(
    inv: &ImageF,
    light: &LightingField,
    cci: &ContrastCodeImage,
    omega: f64,
) -> Result<TransmissionMap> {
    inv.expect_channels(3)?;
    expect_dims(inv.dims(), light.dims())?;
    expect_dims(inv.dims(), cci.dims())?;
    if !(0.0..=1.0).contains(&omega) {
        return Err(invalid("omega", format!("must lie in [0, 1], got {omega}")));
    }
    let normalized = ImageF::from_raw(
        inv.width(),
        inv.height(),
        3,
        inv.data()
            .iter()
            .zip(light.image().data())
            .map(|(&i, &a)| (i / a).min(1.0))
            .collect(),
    );
    let dark = dark_channel_cg(&normalized, cci)?;
    let omega = omega as f32;
    Ok(TransmissionMap(dark.map(|d| (1.0 - omega * d).clamp(0.0, 1.0))))
}

/// Guided-filter refinement of a raw transmission map, clamped to `[0, 1]`.
pub fn refine_transmission(guide: &ImageF, raw: &TransmissionMap, params: &DehazeParams) -> Result<TransmissionMap> {
    let filtered = guided_filter(guide, raw.image(), params)?;
    Ok(TransmissionMap(clamp01(&filtered)))
}

/// `J = (I - A) / max(t, t0) + A`, per channel. Not clamped.
pub fn recover_radiance(
    inv: &ImageF,
    light: &LightingField,
    t: &TransmissionMap,
    t0: f64,
) -> Result<ImageF> {
    inv.expect_channels(3)?;
    expect_dims(inv.dims(), light.dims())?;
    expect_dims(inv.dims(), t.dims())?;
    if !(t0 > 0.0 && t0 < 1.0) {
        return Err(invalid("t0", format!("must lie in (0, 1), got {t0}")));
    }
    let t0 = t0 as f32;
    let n = inv.len();
    let tp = t.image().plane(0);
    let data = inv
        .data()
        .iter()
        .zip(light.image().data())
        .enumerate()
        .map(|(i, (&v, &a))| (v - a) / tp[i % n].max(t0) + a)
        .collect();
    Ok(ImageF::from_raw(inv.width(), inv.height(), 3, data))
}

/// Everything produced while enhancing with one lighting model.
#[derive(Clone, Debug)]
pub struct SingleTrace {
    pub light: LightingField,
    pub transmission_raw: TransmissionMap,
    pub transmission: TransmissionMap,
    /// Re-inverted recovery before clamping.
    pub unclamped: ImageF,
    pub output: ImageF,
}

/// Dehazes `invert(lowlight)` with the given lighting field and re-inverts.
pub fn enhance_with_light(
    lowlight: &ImageF,
    cci: &ContrastCodeImage,
    light: LightingField,
    params: &DehazeParams,
) -> Result<SingleTrace> {
    params.validate()?;
    lowlight.expect_channels(3)?;
    if !lowlight.in_unit_range() {
        return Err(invalid("lowlight", "pixel values must lie in [0, 1]"));
    }
    let inv = invert(lowlight);
    let transmission_raw = transmission_cg(&inv, &light, cci, params.omega)?;
    let transmission = refine_transmission(&luminance(&inv)?, &transmission_raw, params)?;
    let recovered = recover_radiance(&inv, &light, &transmission, params.t0)?;
    let unclamped = invert(&recovered);
    let output = clamp01(&unclamped);
    Ok(SingleTrace {
        light,
        transmission_raw,
        transmission,
        unclamped,
        output,
    })
}

/// Traced variant of [`enhance_single`].
pub fn enhance_single_traced(
    lowlight: &ImageF,
    cci: &ContrastCodeImage,
    m: u32,
    params: &DehazeParams,
) -> Result<SingleTrace> {
    let inv = invert(lowlight);
    let light = smooth_lighting(&local_cg_atmosphere(&inv, cci, m)?);
    enhance_with_light(lowlight, cci, light, params)
}

/// Enhances a low-light image with the contrast-guided lighting model for
/// multiplication factor `m`. `cci` must come from the inverted image.
pub fn enhance_single(
    lowlight: &ImageF,
    cci: &ContrastCodeImage,
    m: u32,
    params: &DehazeParams,
) -> Result<ImageF> {
    Ok(enhance_single_traced(lowlight, cci, m, params)?.output)
}
