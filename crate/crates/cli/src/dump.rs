//! Intermediate maps as PFM (full precision) plus PNG previews.

use std::fs;
use std::path::Path;

use anyhow::{Context, Result};
use l2uwe::io::{save_png, write_pfm};
use l2uwe::{ImageF, PipelineTrace};

fn both(img: &ImageF, dir: &Path, name: &str) -> Result<()> {
    write_pfm(img, dir.join(format!("{name}.pfm")))?;
    save_png(img, dir.join(format!("{name}.png")))?;
    Ok(())
}

/// Writes every intermediate of `trace` into `dir`.
pub fn write_trace(trace: &PipelineTrace, dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).with_context(|| format!("cannot create {}", dir.display()))?;
    both(&trace.cci.to_image(), dir, "cci")?;
    for (input, normalized) in trace.inputs.iter().zip(&trace.normalized) {
        let p = format!("m{}", input.m);
        let single = &input.single;
        both(single.light.image(), dir, &format!("{p}_light"))?;
        both(single.transmission_raw.image(), dir, &format!("{p}_transmission_raw"))?;
        both(single.transmission.image(), dir, &format!("{p}_transmission"))?;
        write_pfm(&single.unclamped, dir.join(format!("{p}_unclamped.pfm")))?;
        both(&single.output, dir, &format!("{p}_enhanced"))?;
        both(&input.weights.saliency, dir, &format!("{p}_weight_saliency"))?;
        both(&input.weights.luminance, dir, &format!("{p}_weight_luminance"))?;
        both(&input.weights.local_contrast, dir, &format!("{p}_weight_local_contrast"))?;
        both(normalized, dir, &format!("{p}_weight_normalized"))?;
    }
    write_pfm(&trace.fused_unclamped, dir.join("fused_unclamped.pfm"))?;
    both(&trace.output, dir, "output")?;
    Ok(())
}
