//! Gaussian and Laplacian pyramids.
//!
//! Levels halve each axis with ceiling division, so odd sizes are fine.
//! Reduction blurs with a unit Gaussian and keeps even samples; expansion is
//! bilinear onto the exact size of the finer level.

use crate::error::{Error, Result};
use crate::filter::gaussian_blur;
use crate::image::ImageF;

/// Default pyramid depth used for fusion.
pub const DEFAULT_LEVELS: usize = 5;

/// Short side, in pixels, that the coarsest auto-limited level keeps.
const MIN_COARSE_SIDE: usize = 8;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PyramidKind {
    Gaussian,
    Laplacian,
}

#[derive(Clone, Debug)]
pub struct Pyramid {
    levels: Vec<ImageF>,
    kind: PyramidKind,
}

impl Pyramid {
    /// Assembles a pyramid from explicit levels, finest first.
    pub fn from_levels(levels: Vec<ImageF>, kind: PyramidKind) -> Result<Self> {
        let first = levels
            .first()
            .ok_or_else(|| Error::InvalidBuffer("pyramid needs at least one level".into()))?;
        let mut expected = first.dims();
        for level in &levels[1..] {
            expected = half_dims(expected);
            crate::image::expect_dims(expected, level.dims())?;
        }
        Ok(Self { levels, kind })
    }

    pub fn kind(&self) -> PyramidKind {
        self.kind
    }

    pub fn levels(&self) -> &[ImageF] {
        &self.levels
    }

    pub fn into_levels(self) -> Vec<ImageF> {
        self.levels
    }

    pub fn len(&self) -> usize {
        self.levels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.levels.is_empty()
    }
}

fn half_dims((w, h): (usize, usize)) -> (usize, usize) {
    (w.div_ceil(2), h.div_ceil(2))
}

/// Depth actually used for a requested depth: the coarsest level keeps at
/// least 8 pixels on its short side, and there is always at least one level.
pub fn effective_levels(requested: usize, width: usize, height: usize) -> usize {
    let short = width.min(height);
    let mut cap = 1;
    while short >> cap >= MIN_COARSE_SIDE {
        cap += 1;
    }
    requested.clamp(1, cap)
}

fn check_depth(img: &ImageF, levels: usize) -> Result<()> {
    let short = img.width().min(img.height());
    // A single level involves no reduction, so any size is accepted.
    let ok = levels == 1 || (levels >= 2 && levels < usize::BITS as usize && short >> (levels - 1) >= 2);
    if !ok {
        return Err(Error::PyramidTooDeep {
            levels,
            width: img.width(),
            height: img.height(),
        });
    }
    Ok(())
}

/// Blur with sigma 1 and keep every other sample.
pub fn downsample2(img: &ImageF) -> ImageF {
    let blurred = gaussian_blur(img, 1.0).expect("sigma is positive");
    let (w, h) = img.dims();
    let (sw, sh) = half_dims((w, h));
    let mut data = Vec::with_capacity(sw * sh * img.channels());
    for c in 0..img.channels() {
        let plane = blurred.plane(c);
        for y in 0..sh {
            for x in 0..sw {
                data.push(plane[2 * y * w + 2 * x]);
            }
        }
    }
    ImageF::from_raw(sw, sh, img.channels(), data)
}

/// Bilinear expansion to `width x height`, where sample `(x, y)` of the
/// output reads the source at `(x / 2, y / 2)`.
pub fn upsample2(img: &ImageF, width: usize, height: usize) -> ImageF {
    resample_bilinear(img, width, height, 2.0, 0.0)
}

/// Bilinear resampling where output sample `x` reads the source at
/// `(x - offset) / scale`, clamped into the source.
pub(crate) fn resample_bilinear(img: &ImageF, width: usize, height: usize, scale: f32, offset: f32) -> ImageF {
    let (sw, sh) = img.dims();
    let taps = |n: usize, src_n: usize| -> Vec<(usize, usize, f32)> {
        (0..n)
            .map(|i| {
                let s = ((i as f32 - offset) / scale).clamp(0.0, (src_n - 1) as f32);
                let i0 = s.floor() as usize;
                let i1 = (i0 + 1).min(src_n - 1);
                (i0, i1, s - i0 as f32)
            })
            .collect()
    };
    let xt = taps(width, sw);
    let yt = taps(height, sh);
    let mut data = Vec::with_capacity(width * height * img.channels());
    for c in 0..img.channels() {
        let plane = img.plane(c);
        for &(y0, y1, fy) in &yt {
            let r0 = &plane[y0 * sw..(y0 + 1) * sw];
            let r1 = &plane[y1 * sw..(y1 + 1) * sw];
            for &(x0, x1, fx) in &xt {
                let top = r0[x0] + (r0[x1] - r0[x0]) * fx;
                let bottom = r1[x0] + (r1[x1] - r1[x0]) * fx;
                data.push(top + (bottom - top) * fy);
            }
        }
    }
    ImageF::from_raw(width, height, img.channels(), data)
}

pub fn build_gaussian_pyramid(img: &ImageF, levels: usize) -> Result<Pyramid> {
    check_depth(img, levels)?;
    let mut out = Vec::with_capacity(levels);
    out.push(img.clone());
    for k in 1..levels {
        let next = downsample2(&out[k - 1]);
        out.push(next);
    }
    Ok(Pyramid {
        levels: out,
        kind: PyramidKind::Gaussian,
    })
}

pub fn build_laplacian_pyramid(img: &ImageF, levels: usize) -> Result<Pyramid> {
    let gauss = build_gaussian_pyramid(img, levels)?.into_levels();
    let mut out = Vec::with_capacity(levels);
    for k in 0..levels - 1 {
        let fine = &gauss[k];
        let up = upsample2(&gauss[k + 1], fine.width(), fine.height());
        out.push(sub(fine, &up));
    }
    out.push(gauss[levels - 1].clone());
    Ok(Pyramid {
        levels: out,
        kind: PyramidKind::Laplacian,
    })
}

/// Rebuilds the full-resolution image from a Laplacian pyramid. The result
/// is not clamped.
pub fn collapse_pyramid(pyr: &Pyramid) -> Result<ImageF> {
    if pyr.kind != PyramidKind::Laplacian {
        return Err(Error::WrongPyramidKind {
            expected: "laplacian",
        });
    }
    let mut levels = pyr.levels.iter().rev();
    let mut acc = levels.next().expect("pyramids are never empty").clone();
    for detail in levels {
        let up = upsample2(&acc, detail.width(), detail.height());
        acc = add(&up, detail);
    }
    Ok(acc)
}

fn sub(a: &ImageF, b: &ImageF) -> ImageF {
    let data = a.data().iter().zip(b.data()).map(|(x, y)| x - y).collect();
    ImageF::from_raw(a.width(), a.height(), a.channels(), data)
}

fn add(a: &ImageF, b: &ImageF) -> ImageF {
    let data = a.data().iter().zip(b.data()).map(|(x, y)| x + y).collect();
    ImageF::from_raw(a.width(), a.height(), a.channels(), data)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};

    fn random_image(w: usize, h: usize, c: usize, seed: u64) -> ImageF {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        ImageF::from_fn(w, h, c, |_, _, _| rng.random()).unwrap()
    }

    fn max_abs_diff(a: &ImageF, b: &ImageF) -> f32 {
        a.data()
            .iter()
            .zip(b.data())
            .map(|(x, y)| (x - y).abs())
            .fold(0.0, f32::max)
    }

    #[test]
    fn halving_schedule() {
        let img = ImageF::new(64, 64, 1).unwrap();
        let pyr = build_gaussian_pyramid(&img, 5).unwrap();
        let sizes: Vec<_> = pyr.levels().iter().map(|l| l.width()).collect();
        assert_eq!(sizes, vec![64, 32, 16, 8, 4]);
        let odd = build_gaussian_pyramid(&ImageF::new(17, 9, 3).unwrap(), 3).unwrap();
        let dims: Vec<_> = odd.levels().iter().map(|l| l.dims()).collect();
        assert_eq!(dims, vec![(17, 9), (9, 5), (5, 3)]);
    }

    #[test]
    fn single_level_is_the_input() {
        let img = random_image(5, 3, 3, 1);
        let g = build_gaussian_pyramid(&img, 1).unwrap();
        assert_eq!(g.len(), 1);
        assert_eq!(g.levels()[0], img);
        let l = build_laplacian_pyramid(&img, 1).unwrap();
        assert_eq!(collapse_pyramid(&l).unwrap(), img);
    }

    #[test]
    fn too_deep_is_rejected() {
        let img = ImageF::new(16, 40, 1).unwrap();
        assert!(build_gaussian_pyramid(&img, 4).is_ok());
        assert!(matches!(
            build_gaussian_pyramid(&img, 5),
            Err(Error::PyramidTooDeep { .. })
        ));
        assert!(build_laplacian_pyramid(&img, 0).is_err());
    }

    #[test]
    fn constant_levels_stay_constant() {
        let img = ImageF::filled(40, 24, 3, 0.6).unwrap();
        for level in build_gaussian_pyramid(&img, 4).unwrap().levels() {
            assert!(level.data().iter().all(|v| (v - 0.6).abs() < 1e-6));
        }
        let lap = build_laplacian_pyramid(&img, 4).unwrap();
        let (last, details) = lap.levels().split_last().unwrap();
        for level in details {
            assert!(level.data().iter().all(|v| v.abs() < 1e-6));
        }
        assert!(last.data().iter().all(|v| (v - 0.6).abs() < 1e-6));
    }

    #[test]
    fn laplacian_round_trip() {
        let img = random_image(32, 32, 3, 9);
        let pyr = build_laplacian_pyramid(&img, 3).unwrap();
        assert!(max_abs_diff(&collapse_pyramid(&pyr).unwrap(), &img) <= 1e-4);
        let img = random_image(64, 64, 1, 10);
        let pyr = build_laplacian_pyramid(&img, 5).unwrap();
        assert!(max_abs_diff(&collapse_pyramid(&pyr).unwrap(), &img) <= 1e-4);
    }

    #[test]
    fn gaussian_pyramid_cannot_collapse() {
        let pyr = build_gaussian_pyramid(&ImageF::new(8, 8, 1).unwrap(), 2).unwrap();
        assert!(matches!(
            collapse_pyramid(&pyr),
            Err(Error::WrongPyramidKind { .. })
        ));
    }

    #[test]
    fn auto_limit_keeps_coarsest_level_at_least_8px() {
        assert_eq!(effective_levels(5, 800, 600), 5);
        assert_eq!(effective_levels(5, 64, 64), 4);
        assert_eq!(effective_levels(5, 16, 100), 2);
        assert_eq!(effective_levels(5, 15, 15), 1);
        assert_eq!(effective_levels(5, 1, 1), 1);
        assert_eq!(effective_levels(0, 100, 100), 1);
    }

    #[test]
    fn from_levels_checks_geometry() {
        let a = ImageF::new(9, 9, 1).unwrap();
        let b = ImageF::new(5, 5, 1).unwrap();
        assert!(Pyramid::from_levels(vec![a.clone(), b], PyramidKind::Laplacian).is_ok());
        let bad = ImageF::new(4, 5, 1).unwrap();
        assert!(Pyramid::from_levels(vec![a, bad], PyramidKind::Laplacian).is_err());
    }

    proptest::proptest! {
        #![proptest_config(proptest::prelude::ProptestConfig::with_cases(24))]
        #[test]
        fn round_trip_any_size(w in 16usize..70, h in 16usize..70, seed in 0u64..1000) {
            let img = random_image(w, h, 1, seed);
            let levels = effective_levels(5, w, h).clamp(2, 4);
            let pyr = build_laplacian_pyramid(&img, levels).unwrap();
            proptest::prop_assert!(max_abs_diff(&collapse_pyramid(&pyr).unwrap(), &img) <= 1e-4);
        }
    }
}
