//! PNG/JPEG decoding, 8-bit PNG encoding and PFM float dumps.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Read, Write};
use std::path::Path;

use image::{DynamicImage, GrayImage, RgbImage};

use crate::error::{Error, Result};
use crate::image::ImageF;

/// Converts a decoded image to a 3-channel `ImageF`. 8-bit data maps by
/// `v / 255`, 16-bit by `v / 65535`; gray inputs are replicated to RGB.
pub fn from_dynamic(img: &DynamicImage) -> ImageF {
    let (w, h) = (img.width() as usize, img.height() as usize);
    let n = w * h;
    let mut data = vec![0.0f32; 3 * n];
    let sixteen = matches!(
        img,
        DynamicImage::ImageLuma16(_)
            | DynamicImage::ImageLumaA16(_)
            | DynamicImage::ImageRgb16(_)
            | DynamicImage::ImageRgba16(_)
    );
    if sixteen {
        for (i, p) in img.to_rgb16().pixels().enumerate() {
            for c in 0..3 {
                data[c * n + i] = p.0[c] as f32 / 65535.0;
            }
        }
    } else {
        for (i, p) in img.to_rgb8().pixels().enumerate() {
            for c in 0..3 {
                data[c * n + i] = p.0[c] as f32 / 255.0;
            }
        }
    }
    ImageF::from_raw(w, h, 3, data)
}

/// Decodes a PNG or JPEG file into a 3-channel image.
pub fn load_image(path: impl AsRef<Path>) -> Result<ImageF> {
    let path = path.as_ref();
    let decoded = image::ImageReader::open(path)?
        .with_guessed_format()?
        .decode()
        .map_err(|source| Error::Decode {
            path: path.to_path_buf(),
            source,
        })?;
    Ok(from_dynamic(&decoded))
}

/// Loads any supported input: PFM by extension, otherwise PNG or JPEG.
/// Gray PFM data is replicated to RGB.
pub fn read_image(path: impl AsRef<Path>) -> Result<ImageF> {
    let path = path.as_ref();
    let is_pfm = path
        .extension()
        .and_then(|e| e.to_str())
        .is_some_and(|e| e.eq_ignore_ascii_case("pfm"));
    if !is_pfm {
        return load_image(path);
    }
    let img = read_pfm(path)?;
    if img.channels() == 1 {
        return ImageF::from_planes(&[img.clone(), img.clone(), img]);
    }
    Ok(img)
}

#[inline]
fn quantize(v: f32) -> u8 {
    (v.clamp(0.0, 1.0) * 255.0 + 0.5).floor() as u8
}

/// 8-bit conversion with round-half-up of `v * 255`.
pub fn to_dynamic(img: &ImageF) -> DynamicImage {
    let (w, h) = (img.width() as u32, img.height() as u32);
    let n = img.len();
    if img.channels() == 1 {
        let buf = img.plane(0).iter().map(|&v| quantize(v)).collect();
        DynamicImage::ImageLuma8(GrayImage::from_raw(w, h, buf).expect("buffer sized to image"))
    } else {
        let mut buf = Vec::with_capacity(3 * n);
        for i in 0..n {
            for c in 0..3 {
                buf.push(quantize(img.plane(c)[i]));
            }
        }
        DynamicImage::ImageRgb8(RgbImage::from_raw(w, h, buf).expect("buffer sized to image"))
    }
}

pub fn save_png(img: &ImageF, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    to_dynamic(img)
        .save_with_format(path, image::ImageFormat::Png)
        .map_err(|source| Error::Encode {
            path: path.to_path_buf(),
            source,
        })
}

/// Writes a little-endian PFM (`PF` for RGB, `Pf` for gray). Rows are stored
/// bottom to top as the format requires.
pub fn write_pfm(img: &ImageF, path: impl AsRef<Path>) -> Result<()> {
    let mut out = BufWriter::new(File::create(path)?);
    let magic = if img.channels() == 3 { "PF" } else { "Pf" };
    write!(out, "{magic}\n{} {}\n-1.0\n", img.width(), img.height())?;
    let (w, h) = img.dims();
    for y in (0..h).rev() {
        for x in 0..w {
            for c in 0..img.channels() {
                out.write_all(&img.get(x, y, c).to_le_bytes())?;
            }
        }
    }
    out.flush()?;
    Ok(())
}

fn header_token(reader: &mut impl BufRead) -> Result<String> {
    let mut token = Vec::new();
    let mut byte = [0u8; 1];
    loop {
        if reader.read(&mut byte)? == 0 {
            break;
        }
        if byte[0].is_ascii_whitespace() {
            if token.is_empty() {
                continue;
            }
            break;
        }
        token.push(byte[0]);
    }
    if token.is_empty() {
        return Err(Error::Pfm("truncated header".into()));
    }
    String::from_utf8(token).map_err(|_| Error::Pfm("header is not ASCII".into()))
}

pub fn read_pfm(path: impl AsRef<Path>) -> Result<ImageF> {
    let mut reader = BufReader::new(File::open(path)?);
    let channels = match header_token(&mut reader)?.as_str() {
        "PF" => 3,
        "Pf" => 1,
        other => return Err(Error::Pfm(format!("unknown magic {other:?}"))),
    };
    let parse = |s: String, what: &str| {
        s.parse::<usize>()
            .map_err(|_| Error::Pfm(format!("bad {what} {s:?}")))
    };
    let w = parse(header_token(&mut reader)?, "width")?;
    let h = parse(header_token(&mut reader)?, "height")?;
    let scale: f32 = header_token(&mut reader)?
        .parse()
        .map_err(|_| Error::Pfm("bad scale".into()))?;
    if scale == 0.0 {
        return Err(Error::Pfm("scale must be nonzero".into()));
    }
    let little = scale < 0.0;
    let count = w
        .checked_mul(h)
        .and_then(|n| n.checked_mul(channels))
        .ok_or_else(|| Error::Pfm("dimensions overflow".into()))?;
    let mut raw = vec![0u8; count * 4];
    reader
        .read_exact(&mut raw)
        .map_err(|_| Error::Pfm("truncated pixel data".into()))?;
    let mut data = vec![0.0f32; count];
    let n = w * h;
    for (i, chunk) in raw.chunks_exact(4).enumerate() {
        let bytes = [chunk[0], chunk[1], chunk[2], chunk[3]];
        let v = if little {
            f32::from_le_bytes(bytes)
        } else {
            f32::from_be_bytes(bytes)
        };
        let c = i % channels;
        let px = i / channels;
        let (x, row) = (px % w, px / w);
        let y = h - 1 - row;
        data[c * n + y * w + x] = v;
    }
    ImageF::from_vec(w, h, channels, data)
}
