//! Brute-force reference implementations. Every window is enumerated
//! directly with clamped coordinates; nothing here shares code with the
//! library's sliding-window or summed-area paths.

#![allow(dead_code)]

use l2uwe::{ContrastCodeImage, ImageF};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub const LIGHT_FLOOR: f32 = 1e-3;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Random RGB image with samples on a 1/4096 grid.
pub fn dyadic_image(w: usize, h: usize, seed: u64) -> ImageF {
    let mut rng = rng(seed);
    ImageF::from_fn(w, h, 3, |_, _, _| rng.random_range(0..=4096u32) as f32 / 4096.0).unwrap()
}

/// Random image with a few flat regions, to exercise ties.
pub fn blocky_image(w: usize, h: usize, seed: u64) -> ImageF {
    let mut rng = rng(seed);
    let levels: Vec<f32> = (0..4).map(|_| rng.random_range(0..=16u32) as f32 / 16.0).collect();
    let split = rng.random_range(1..w.max(2));
    ImageF::from_fn(w, h, 3, |x, y, c| {
        if x < split && y % 5 < 3 {
            levels[c]
        } else {
            levels[(c + x / 3 + y / 4) % 4]
        }
    })
    .unwrap()
}

pub fn random_cci(w: usize, h: usize, seed: u64) -> ContrastCodeImage {
    let mut rng = rng(seed);
    ContrastCodeImage::new(w, h, (0..w * h).map(|_| rng.random_range(1..=7u8)).collect()).unwrap()
}

fn clamp(v: isize, n: usize) -> usize {
    v.clamp(0, n as isize - 1) as usize
}

fn window(x: usize, y: usize, radius: usize, w: usize, h: usize) -> impl Iterator<Item = (usize, usize)> {
    let r = radius as isize;
    (-r..=r).flat_map(move |dy| (-r..=r).map(move |dx| (clamp(x as isize + dx, w), clamp(y as isize + dy, h))))
}

/// Pooled-channel patch std: exact fixed-point moments, closed the same way
/// as the library so results compare bit for bit.
pub fn local_std(img: &ImageF, code: usize, x: usize, y: usize) -> f64 {
    let one = (1u64 << 24) as f64;
    let (w, h) = img.dims();
    let (mut s, mut q, mut n) = (0i128, 0i128, 0i128);
    for (sx, sy) in window(x, y, code, w, h) {
        for c in 0..3 {
            let v = (img.get(sx, sy, c) as f64 * one).round() as i128;
            s += v;
            q += v * v;
            n += 1;
        }
    }
    ((n * q - s * s) as f64).sqrt() / (n as f64 * one)
}

/// Textbook two-pass population std, for a tolerance check.
pub fn local_std_two_pass(img: &ImageF, code: usize, x: usize, y: usize) -> f64 {
    let (w, h) = img.dims();
    let vals: Vec<f64> = window(x, y, code, w, h)
        .flat_map(|(sx, sy)| (0..3).map(move |c| (sx, sy, c)))
        .map(|(sx, sy, c)| img.get(sx, sy, c) as f64)
        .collect();
    let mean = vals.iter().sum::<f64>() / vals.len() as f64;
    (vals.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / vals.len() as f64).sqrt()
}

pub fn cci(img: &ImageF, tolerance: f64) -> Vec<u8> {
    let (w, h) = img.dims();
    let mut out = Vec::new();
    for y in 0..h {
        for x in 0..w {
            let scores: Vec<f64> = (1..=7).map(|i| local_std(img, i, x, y) - tolerance * (i - 1) as f64).collect();
            let best = scores.iter().cloned().fold(f64::INFINITY, f64::min);
            let code = (1..=7).rev().find(|&i| scores[i - 1] == best).unwrap();
            out.push(code as u8);
        }
    }
    out
}

pub fn min_image(img: &ImageF, cci: &ContrastCodeImage) -> Vec<f32> {
    let (w, h) = img.dims();
    let mut out = vec![0.0; 3 * w * h];
    for c in 0..3 {
        for y in 0..h {
            for x in 0..w {
                out[c * w * h + y * w + x] = window(x, y, cci.code(x, y) as usize, w, h)
                    .map(|(sx, sy)| img.get(sx, sy, c))
                    .fold(f32::INFINITY, f32::min);
            }
        }
    }
    out
}

pub fn dark_channel(img: &ImageF, cci: &ContrastCodeImage) -> Vec<f32> {
    let (w, h) = img.dims();
    let mut out = Vec::new();
    for y in 0..h {
        for x in 0..w {
            let mut m = f32::INFINITY;
            for (sx, sy) in window(x, y, cci.code(x, y) as usize, w, h) {
                for c in 0..3 {
                    m = m.min(img.get(sx, sy, c));
                }
            }
            out.push(m);
        }
    }
    out
}

/// Nearest odd integer to `m(10-c)/3` by scanning candidates; ties upward.
pub fn s_upsilon(m: u32, c: u8) -> usize {
    let real = 3.0 * m as f64 - (m as f64 / 3.0) * (c as f64 - 1.0);
    let mut best = 1usize;
    for k in (1..=2000usize).step_by(2) {
        if (k as f64 - real).abs() <= (best as f64 - real).abs() + 1e-9 {
            best = k;
        }
    }
    best.max(3)
}

pub fn local_cg_atmosphere(img: &ImageF, cci: &ContrastCodeImage, m: u32) -> Vec<f32> {
    let (w, h) = img.dims();
    let mins = min_image(img, cci);
    let mut out = vec![0.0; 3 * w * h];
    for c in 0..3 {
        for y in 0..h {
            for x in 0..w {
                let radius = s_upsilon(m, cci.code(x, y)) / 2;
                let v = window(x, y, radius, w, h)
                    .map(|(sx, sy)| mins[c * w * h + sy * w + sx])
                    .fold(f32::NEG_INFINITY, f32::max);
                out[c * w * h + y * w + x] = v.clamp(LIGHT_FLOOR, 1.0);
            }
        }
    }
    out
}

pub fn global_atmosphere(img: &ImageF, dark: &[f32], fraction: f64) -> [f32; 3] {
    let mut order: Vec<usize> = (0..dark.len()).collect();
    order.sort_by(|&a, &b| dark[b].partial_cmp(&dark[a]).unwrap().then(a.cmp(&b)));
    let count = ((fraction * dark.len() as f64).round() as usize).max(1);
    let w = img.width();
    let mut light = [LIGHT_FLOOR; 3];
    for &i in &order[..count] {
        for (c, l) in light.iter_mut().enumerate() {
            *l = l.max(img.get(i % w, i / w, c));
        }
    }
    light.map(|v| v.min(1.0))
}

pub fn transmission(inv: &ImageF, light: &ImageF, cci: &ContrastCodeImage, omega: f64) -> Vec<f32> {
    let normalized = ImageF::from_fn(inv.width(), inv.height(), 3, |x, y, c| {
        (inv.get(x, y, c) / light.get(x, y, c)).min(1.0)
    })
    .unwrap();
    dark_channel(&normalized, cci)
        .into_iter()
        .map(|d| (1.0 - omega as f32 * d).clamp(0.0, 1.0))
        .collect()
}
