//! Deterministic synthetic scenes and their low-light counterparts, used by
//! tests, benchmarks and the acceptance suite.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::image::ImageF;

/// Exponent applied to clean intensities when darkening.
pub const DARKEN_GAMMA: f32 = 2.2;

#[derive(Clone, Debug)]
pub struct SyntheticPair {
    pub clean: ImageF,
    pub dark: ImageF,
}

enum Shape {
    Rect { x0: f32, y0: f32, x1: f32, y1: f32 },
    Disc { cx: f32, cy: f32, r: f32 },
}

impl Shape {
    fn contains(&self, x: f32, y: f32) -> bool {
        match *self {
            Shape::Rect { x0, y0, x1, y1 } => x >= x0 && x < x1 && y >= y0 && y < y1,
            Shape::Disc { cx, cy, r } => (x - cx).powi(2) + (y - cy).powi(2) < r * r,
        }
    }
}

/// A well-exposed scene: tinted background gradient, a handful of flat
/// shapes and a sinusoidal texture.
pub fn clean_scene(width: usize, height: usize, seed: u64) -> ImageF {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (wf, hf) = (width as f32, height as f32);
    let top: [f32; 3] = [rng.random_range(0.2..0.5), rng.random_range(0.5..0.8), rng.random_range(0.6..0.9)];
    let bottom: [f32; 3] = [rng.random_range(0.1..0.4), rng.random_range(0.3..0.6), rng.random_range(0.4..0.7)];
    let shapes: Vec<(Shape, [f32; 3])> = (0..rng.random_range(5..11))
        .map(|_| {
            let shape = if rng.random_bool(0.5) {
                let (x0, y0) = (rng.random_range(0.0..wf), rng.random_range(0.0..hf));
                Shape::Rect {
                    x0,
                    y0,
                    x1: x0 + rng.random_range(0.1..0.4) * wf,
                    y1: y0 + rng.random_range(0.1..0.4) * hf,
                }
            } else {
                Shape::Disc {
                    cx: rng.random_range(0.0..wf),
                    cy: rng.random_range(0.0..hf),
                    r: rng.random_range(0.05..0.2) * wf.min(hf),
                }
            };
            let colour = [rng.random_range(0.1..0.95), rng.random_range(0.1..0.95), rng.random_range(0.1..0.95)];
            (shape, colour)
        })
        .collect();
    let freq_x = rng.random_range(0.15..0.6);
    let freq_y = rng.random_range(0.15..0.6);
    let amp = rng.random_range(0.03..0.1);

    ImageF::from_fn(width, height, 3, |x, y, c| {
        let (xf, yf) = (x as f32 + 0.5, y as f32 + 0.5);
        let t = yf / hf;
        let mut v = top[c] * (1.0 - t) + bottom[c] * t;
        for (shape, colour) in &shapes {
            if shape.contains(xf, yf) {
                v = colour[c];
            }
        }
        v += amp * (freq_x * xf).sin() * (freq_y * yf).cos();
        v.clamp(0.02, 0.98)
    })
    .expect("shape is valid")
}

/// Low-light version of `clean`: gamma darkening times a spotlight falloff
/// centred at a seeded position.
pub fn darken(clean: &ImageF, seed: u64) -> ImageF {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed_da4c);
    let (w, h) = clean.dims();
    let (cx, cy) = (rng.random_range(0.0..w as f32), rng.random_range(0.0..h as f32));
    let spread = rng.random_range(0.25..0.5) * (w as f32).hypot(h as f32);
    let ambient = rng.random_range(0.1..0.3);
    ImageF::from_fn(w, h, clean.channels(), |x, y, c| {
        let d2 = (x as f32 - cx).powi(2) + (y as f32 - cy).powi(2);
        let light = ambient + (1.0 - ambient) * (-d2 / (2.0 * spread * spread)).exp();
        clean.get(x, y, c).powf(DARKEN_GAMMA) * light
    })
    .expect("shape is valid")
}

pub fn synthetic_pair(width: usize, height: usize, seed: u64) -> SyntheticPair {
    let clean = clean_scene(width, height, seed);
    let dark = darken(&clean, seed);
    SyntheticPair { clean, dark }
}

/// `count` pairs with consecutive seeds starting at `seed`.
pub fn synthetic_suite(count: usize, width: usize, height: usize, seed: u64) -> Vec<SyntheticPair> {
    (0..count as u64).map(|i| synthetic_pair(width, height, seed + i)).collect()
}
