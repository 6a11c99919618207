//! Fast guided filter: the local linear model is fitted on a subsampled
//! grid and its coefficients are bilinearly expanded back to full size.

use crate::dehaze::DehazeParams;
use crate::error::Result;
use crate::filter::box_mean;
use crate::image::ImageF;
use crate::pyramid::resample_bilinear;

/// Block-average a plane by `factor`; edge blocks average what they cover.
fn block_average(src: &[f32], w: usize, h: usize, factor: usize) -> (Vec<f64>, usize, usize) {
    let (sw, sh) = (w.div_ceil(factor), h.div_ceil(factor));
    let mut sums = vec![0.0f64; sw * sh];
    let mut counts = vec![0u32; sw * sh];
    for y in 0..h {
        for x in 0..w {
            let i = (y / factor) * sw + x / factor;
            sums[i] += src[y * w + x] as f64;
            counts[i] += 1;
        }
    }
    for (s, &n) in sums.iter_mut().zip(&counts) {
        *s /= n as f64;
    }
    (sums, sw, sh)
}

/// Edge-preserving smoothing of `src` steered by `guide` (both 1-channel).
pub fn guided_filter(guide: &ImageF, src: &ImageF, params: &DehazeParams) -> Result<ImageF> {
    guide.expect_channels(1)?;
    src.expect_channels(1)?;
    guide.expect_same_size(src)?;
    params.validate()?;

    let (w, h) = guide.dims();
    let factor = params.guided_subsample;
    let radius = ((params.guided_radius + factor / 2) / factor).max(1);
    let eps = params.guided_eps;

    let (g, sw, sh) = block_average(guide.plane(0), w, h, factor);
    let (p, _, _) = block_average(src.plane(0), w, h, factor);
    let gp: Vec<f64> = g.iter().zip(&p).map(|(a, b)| a * b).collect();
    let gg: Vec<f64> = g.iter().map(|a| a * a).collect();

    let mean_g = box_mean(&g, sw, sh, radius);
    let mean_p = box_mean(&p, sw, sh, radius);
    let corr_gp = box_mean(&gp, sw, sh, radius);
    let corr_gg = box_mean(&gg, sw, sh, radius);

    let mut a = vec![0.0; sw * sh];
    let mut b = vec![0.0; sw * sh];
    for i in 0..sw * sh {
        let var = (corr_gg[i] - mean_g[i] * mean_g[i]).max(0.0);
        let cov = corr_gp[i] - mean_g[i] * mean_p[i];
        a[i] = cov / (var + eps);
        b[i] = mean_p[i] - a[i] * mean_g[i];
    }
    let to_image = |v: Vec<f64>| ImageF::from_raw(sw, sh, 1, v.into_iter().map(|x| x as f32).collect());
    let mean_a = to_image(box_mean(&a, sw, sh, radius));
    let mean_b = to_image(box_mean(&b, sw, sh, radius));

    let offset = (factor as f32 - 1.0) / 2.0;
    let mean_a = resample_bilinear(&mean_a, w, h, factor as f32, offset);
    let mean_b = resample_bilinear(&mean_b, w, h, factor as f32, offset);
    let out = mean_a
        .plane(0)
        .iter()
        .zip(mean_b.plane(0))
        .zip(guide.plane(0))
        .map(|((a, b), i)| a * i + b)
        .collect();
    Ok(ImageF::from_raw(w, h, 1, out))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};

    fn params(radius: usize, eps: f64, subsample: usize) -> DehazeParams {
        DehazeParams {
            guided_radius: radius,
            guided_eps: eps,
            guided_subsample: subsample,
            ..DehazeParams::default()
        }
    }

    #[test]
    fn constant_source_is_reproduced() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(2);
        let guide = ImageF::from_fn(37, 29, 1, |_, _, _| rng.random()).unwrap();
        let src = ImageF::filled(37, 29, 1, 0.42).unwrap();
        for sub in [1, 4] {
            let out = guided_filter(&guide, &src, &params(16, 1e-3, sub)).unwrap();
            assert!(out.data().iter().all(|v| (v - 0.42).abs() <= 1e-5));
        }
    }

    #[test]
    fn self_guidance_with_tiny_eps_is_identity() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        let img = ImageF::from_fn(32, 24, 1, |_, _, _| rng.random()).unwrap();
        let out = guided_filter(&img, &img, &params(4, 1e-9, 1)).unwrap();
        for (o, i) in out.data().iter().zip(img.data()) {
            assert!((o - i).abs() <= 1e-3);
        }
    }

    #[test]
    fn fast_variant_tracks_exact_on_smooth_input() {
        let n = 64;
        let guide = ImageF::from_fn(n, n, 1, |x, y, _| {
            0.5 + 0.3 * ((x as f32 / 9.0).sin() * (y as f32 / 13.0).cos())
        })
        .unwrap();
        let src = ImageF::from_fn(n, n, 1, |x, y, _| 0.2 + 0.6 * (x + y) as f32 / (2 * n) as f32).unwrap();
        let exact = guided_filter(&guide, &src, &params(16, 1e-3, 1)).unwrap();
        let fast = guided_filter(&guide, &src, &params(16, 1e-3, 4)).unwrap();
        let mad: f32 = exact
            .data()
            .iter()
            .zip(fast.data())
            .map(|(a, b)| (a - b).abs())
            .sum::<f32>()
            / (n * n) as f32;
        assert!(mad <= 0.01, "mean abs difference {mad}");
    }

    #[test]
    fn mismatched_inputs_are_rejected() {
        let a = ImageF::new(8, 8, 1).unwrap();
        let b = ImageF::new(8, 7, 1).unwrap();
        assert!(guided_filter(&a, &b, &DehazeParams::default()).is_err());
        let c = ImageF::new(8, 8, 3).unwrap();
        assert!(guided_filter(&a, &c, &DehazeParams::default()).is_err());
    }

    #[test]
    fn handles_images_smaller_than_the_subsampling_factor() {
        let img = ImageF::filled(1, 1, 1, 0.3).unwrap();
        let out = guided_filter(&img, &img, &DehazeParams::default()).unwrap();
        assert!((out.get(0, 0, 0) - 0.3).abs() < 1e-5);
    }
}
