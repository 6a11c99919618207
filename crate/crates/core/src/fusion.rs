//! Weight maps and Laplacian-pyramid fusion of the enhanced inputs.

use crate::error::{invalid, Result};
use crate::filter::{blur_binomial5, convolve3x3, LAPLACIAN3};
use crate::image::{clamp01, luminance, ImageF};
use crate::pyramid::{
    build_gaussian_pyramid, build_laplacian_pyramid, collapse_pyramid, effective_levels, Pyramid,
    PyramidKind,
};

/// Regularizer keeping normalized weights defined where every input's
/// product weight vanishes.
pub const WEIGHT_DELTA: f32 = 1e-6;

/// The three per-input weight maps, each 1-channel and nonnegative.
#[derive(Clone, Debug)]
pub struct WeightMaps {
    pub saliency: ImageF,
    pub luminance: ImageF,
    pub local_contrast: ImageF,
}

impl WeightMaps {
    pub fn compute(input: &ImageF) -> Result<Self> {
        Ok(Self {
            saliency: saliency_weight(input)?,
            luminance: luminance_weight(input)?,
            local_contrast: local_contrast_weight(input)?,
        })
    }

    fn product(&self) -> Vec<f32> {
        self.saliency
            .plane(0)
            .iter()
            .zip(self.luminance.plane(0))
            .zip(self.local_contrast.plane(0))
            .map(|((s, l), c)| s * l * c)
            .collect()
    }
}

/// Distance of the binomial-blurred input from its per-channel mean colour.
pub fn saliency_weight(input: &ImageF) -> Result<ImageF> {
    input.expect_channels(3)?;
    let blurred = blur_binomial5(input);
    let means: Vec<f32> = (0..3)
        .map(|c| {
            let p = input.plane(c);
            (p.iter().map(|&v| v as f64).sum::<f64>() / p.len() as f64) as f32
        })
        .collect();
    let out = (0..input.len())
        .map(|i| {
            (0..3)
                .map(|c| {
                    let d = blurred.plane(c)[i] - means[c];
                    d * d
                })
                .sum::<f32>()
                .sqrt()
        })
        .collect();
    Ok(ImageF::from_raw(input.width(), input.height(), 1, out))
}

/// RMS deviation of R, G, B from their mean at each pixel.
pub fn luminance_weight(input: &ImageF) -> Result<ImageF> {
    let lum = luminance(input)?;
    let out = (0..input.len())
        .map(|i| {
            let l = lum.plane(0)[i];
            let ss: f32 = (0..3).map(|c| (input.plane(c)[i] - l).powi(2)).sum();
            (ss / 3.0).sqrt()
        })
        .collect();
    Ok(ImageF::from_raw(input.width(), input.height(), 1, out))
}

/// Absolute response of the 3x3 Laplacian on luminance.
pub fn local_contrast_weight(input: &ImageF) -> Result<ImageF> {
    let lum = luminance(input)?;
    let (w, h) = lum.dims();
    let out = convolve3x3(lum.plane(0), w, h, &LAPLACIAN3)
        .into_iter()
        .map(f32::abs)
        .collect();
    Ok(ImageF::from_raw(w, h, 1, out))
}

/// Product of each input's maps, normalized across inputs so the weights
/// sum to one at every pixel.
pub fn normalize_weights(maps: &[WeightMaps]) -> Result<Vec<ImageF>> {
    if maps.len() < 2 {
        return Err(invalid("maps", format!("need at least 2 inputs, got {}", maps.len())));
    }
    let dims = maps[0].saliency.dims();
    for m in maps {
        for img in [&m.saliency, &m.luminance, &m.local_contrast] {
            img.expect_channels(1)?;
            crate::image::expect_dims(dims, img.dims())?;
        }
    }
    let products: Vec<Vec<f32>> = maps.iter().map(WeightMaps::product).collect();
    let k = maps.len() as f32;
    let n = dims.0 * dims.1;
    let totals: Vec<f32> = (0..n)
        .map(|i| products.iter().map(|p| p[i]).sum::<f32>() + k * WEIGHT_DELTA)
        .collect();
    Ok(products
        .into_iter()
        .map(|p| {
            let data = p
                .iter()
                .zip(&totals)
                .map(|(w, t)| (w + WEIGHT_DELTA) / t)
                .collect();
            ImageF::from_raw(dims.0, dims.1, 1, data)
        })
        .collect())
}

fn check_fusion_inputs(inputs: &[ImageF], weights: &[ImageF]) -> Result<()> {
    if inputs.is_empty() || inputs.len() != weights.len() {
        return Err(invalid(
            "weights",
            format!("{} inputs but {} weight maps", inputs.len(), weights.len()),
        ));
    }
    let dims = inputs[0].dims();
    for (img, w) in inputs.iter().zip(weights) {
        img.expect_channels(3)?;
        w.expect_channels(1)?;
        crate::image::expect_dims(dims, img.dims())?;
        crate::image::expect_dims(dims, w.dims())?;
    }
    Ok(())
}

/// Multi-scale fusion before the final clamp. `levels` is auto-limited so
/// the coarsest level keeps at least 8 pixels on its short side.
pub fn fuse_multiscale_raw(inputs: &[ImageF], weights: &[ImageF], levels: usize) -> Result<ImageF> {
    check_fusion_inputs(inputs, weights)?;
    let (w, h) = inputs[0].dims();
    let levels = effective_levels(levels, w, h);

    let mut fused: Option<Vec<ImageF>> = None;
    for (img, weight) in inputs.iter().zip(weights) {
        let lap = build_laplacian_pyramid(img, levels)?;
        let gauss = build_gaussian_pyramid(weight, levels)?;
        let contributions: Vec<ImageF> = lap
            .levels()
            .iter()
            .zip(gauss.levels())
            .map(|(l, g)| weighted(l, g))
            .collect();
        fused = Some(match fused {
            None => contributions,
            Some(acc) => acc
                .into_iter()
                .zip(contributions)
                .map(|(a, b)| add(&a, &b))
                .collect(),
        });
    }
    let pyramid = Pyramid::from_levels(fused.expect("inputs are non-empty"), PyramidKind::Laplacian)?;
    collapse_pyramid(&pyramid)
}

/// Fuses `inputs` with per-pixel `weights` and clamps the result to `[0, 1]`.
pub fn fuse_multiscale(inputs: &[ImageF], weights: &[ImageF], levels: usize) -> Result<ImageF> {
    Ok(clamp01(&fuse_multiscale_raw(inputs, weights, levels)?))
}

fn weighted(img: &ImageF, weight: &ImageF) -> ImageF {
    let n = img.len();
    let wp = weight.plane(0);
    let data = img
        .data()
        .iter()
        .enumerate()
        .map(|(i, &v)| wp[i % n] * v)
        .collect();
    ImageF::from_raw(img.width(), img.height(), img.channels(), data)
}

fn add(a: &ImageF, b: &ImageF) -> ImageF {
    debug_assert_eq!(a.dims(), b.dims());
    let data = a.data().iter().zip(b.data()).map(|(x, y)| x + y).collect();
    ImageF::from_raw(a.width(), a.height(), a.channels(), data)
}
