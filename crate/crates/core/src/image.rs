//! Planar floating-point image buffer and pointwise helpers.

use crate::error::{Error, Result};

/// A planar image of `f32` intensities, nominally in `[0, 1]`.
///
/// Channel `c` occupies `data[c * w * h .. (c + 1) * w * h]`, row-major.
/// Every constructor rejects empty dimensions and non-finite samples.
#[derive(Clone, Debug, PartialEq)]
pub struct ImageF {
    width: usize,
    height: usize,
    channels: usize,
    data: Vec<f32>,
}

impl ImageF {
    pub fn new(width: usize, height: usize, channels: usize) -> Result<Self> {
        Self::filled(width, height, channels, 0.0)
    }

    pub fn filled(width: usize, height: usize, channels: usize, value: f32) -> Result<Self> {
        check_shape(width, height, channels)?;
        if !value.is_finite() {
            return Err(Error::InvalidBuffer("fill value is not finite".into()));
        }
        Ok(Self {
            width,
            height,
            channels,
            data: vec![value; width * height * channels],
        })
    }

    pub fn from_vec(width: usize, height: usize, channels: usize, data: Vec<f32>) -> Result<Self> {
        check_shape(width, height, channels)?;
        if data.len() != width * height * channels {
            return Err(Error::InvalidBuffer(format!(
                "buffer holds {} samples, {}x{}x{} needs {}",
                data.len(),
                width,
                height,
                channels,
                width * height * channels
            )));
        }
        if let Some(i) = data.iter().position(|v| !v.is_finite()) {
            return Err(Error::InvalidBuffer(format!("sample {i} is not finite")));
        }
        Ok(Self {
            width,
            height,
            channels,
            data,
        })
    }

    /// Builds an image by evaluating `f(x, y, c)` for every sample.
    pub fn from_fn(
        width: usize,
        height: usize,
        channels: usize,
        mut f: impl FnMut(usize, usize, usize) -> f32,
    ) -> Result<Self> {
        check_shape(width, height, channels)?;
        let mut data = Vec::with_capacity(width * height * channels);
        for c in 0..channels {
            for y in 0..height {
                for x in 0..width {
                    data.push(f(x, y, c));
                }
            }
        }
        Self::from_vec(width, height, channels, data)
    }

    /// Stacks single-channel planes into one multi-channel image.
    pub fn from_planes(planes: &[ImageF]) -> Result<Self> {
        let first = planes
            .first()
            .ok_or_else(|| Error::InvalidBuffer("no planes given".into()))?;
        let mut data = Vec::with_capacity(first.len() * planes.len());
        for p in planes {
            p.expect_channels(1)?;
            first.expect_same_size(p)?;
            data.extend_from_slice(&p.data);
        }
        Ok(Self {
            width: first.width,
            height: first.height,
            channels: planes.len(),
            data,
        })
    }

    /// Wraps a buffer produced by internal arithmetic on finite inputs.
    pub(crate) fn from_raw(width: usize, height: usize, channels: usize, data: Vec<f32>) -> Self {
        debug_assert_eq!(data.len(), width * height * channels);
        debug_assert!(data.iter().all(|v| v.is_finite()));
        Self {
            width,
            height,
            channels,
            data,
        }
    }

    #[inline]
    pub fn width(&self) -> usize {
        self.width
    }

    #[inline]
    pub fn height(&self) -> usize {
        self.height
    }

    #[inline]
    pub fn channels(&self) -> usize {
        self.channels
    }

    #[inline]
    pub fn dims(&self) -> (usize, usize) {
        (self.width, self.height)
    }

    /// Number of pixels per channel.
    #[inline]
    pub fn len(&self) -> usize {
        self.width * self.height
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn data(&self) -> &[f32] {
        &self.data
    }

    pub fn into_data(self) -> Vec<f32> {
        self.data
    }

    pub fn plane(&self, c: usize) -> &[f32] {
        let n = self.len();
        &self.data[c * n..(c + 1) * n]
    }

    /// Copies channel `c` out as a single-channel image.
    pub fn channel(&self, c: usize) -> ImageF {
        Self::from_raw(self.width, self.height, 1, self.plane(c).to_vec())
    }

    #[inline]
    pub fn get(&self, x: usize, y: usize, c: usize) -> f32 {
        self.data[c * self.len() + y * self.width + x]
    }

    /// Sample with coordinates clamped into the image (replicate border).
    #[inline]
    pub fn get_clamped(&self, x: isize, y: isize, c: usize) -> f32 {
        let x = x.clamp(0, self.width as isize - 1) as usize;
        let y = y.clamp(0, self.height as isize - 1) as usize;
        self.get(x, y, c)
    }

    /// Sets one sample. Non-finite values are rejected.
    pub fn set(&mut self, x: usize, y: usize, c: usize, v: f32) -> Result<()> {
        if !v.is_finite() {
            return Err(Error::InvalidBuffer("sample is not finite".into()));
        }
        let n = self.len();
        self.data[c * n + y * self.width + x] = v;
        Ok(())
    }

    /// Applies `f` to every sample. `f` must map finite values to finite values.
    pub fn map(&self, f: impl Fn(f32) -> f32) -> ImageF {
        Self::from_raw(
            self.width,
            self.height,
            self.channels,
            self.data.iter().map(|&v| f(v)).collect(),
        )
    }

    pub fn min_max(&self) -> (f32, f32) {
        self.data
            .iter()
            .fold((f32::INFINITY, f32::NEG_INFINITY), |(lo, hi), &v| {
                (lo.min(v), hi.max(v))
            })
    }

    pub fn mean(&self) -> f64 {
        self.data.iter().map(|&v| v as f64).sum::<f64>() / self.data.len() as f64
    }

    pub fn expect_channels(&self, channels: usize) -> Result<()> {
        if self.channels != channels {
            return Err(Error::ChannelMismatch {
                expected: channels,
                actual: self.channels,
            });
        }
        Ok(())
    }

    pub fn expect_same_size(&self, other: &ImageF) -> Result<()> {
        expect_dims(self.dims(), other.dims())
    }

    pub fn in_unit_range(&self) -> bool {
        self.data.iter().all(|v| (0.0..=1.0).contains(v))
    }
}

pub(crate) fn expect_dims(expected: (usize, usize), actual: (usize, usize)) -> Result<()> {
    if expected != actual {
        return Err(Error::DimensionMismatch { expected, actual });
    }
    Ok(())
}

fn check_shape(width: usize, height: usize, channels: usize) -> Result<()> {
    if width == 0 || height == 0 {
        return Err(Error::InvalidBuffer(format!(
            "image must be at least 1x1, got {width}x{height}"
        )));
    }
    if channels != 1 && channels != 3 {
        return Err(Error::InvalidBuffer(format!(
            "only 1- or 3-channel images are supported, got {channels}"
        )));
    }
    Ok(())
}

/// Complement every sample: `1 - v`.
pub fn invert(img: &ImageF) -> ImageF {
    img.map(|v| 1.0 - v)
}

/// Per-pixel mean of R, G and B.
pub fn luminance(img: &ImageF) -> Result<ImageF> {
    img.expect_channels(3)?;
    let (r, g, b) = (img.plane(0), img.plane(1), img.plane(2));
    let data = r
        .iter()
        .zip(g)
        .zip(b)
        .map(|((&r, &g), &b)| (r + g + b) / 3.0)
        .collect();
    Ok(ImageF::from_raw(img.width(), img.height(), 1, data))
}

/// Luminance for 3-channel images, a copy for single-channel ones.
pub fn intensity(img: &ImageF) -> ImageF {
    match img.channels() {
        3 => luminance(img).expect("checked channel count"),
        _ => img.clone(),
    }
}

pub fn clamp01(img: &ImageF) -> ImageF {
    img.map(|v| v.clamp(0.0, 1.0))
}
