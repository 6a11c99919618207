use std::fs;
use std::path::Path;

use anyhow::{Context, Result};
use l2uwe::{l2uwe_enhance_traced, mean_luminance, read_image, EnhanceConfig, MetricsReport};
use serde::Serialize;

use crate::dump::write_trace;

#[derive(Debug, Serialize)]
pub struct InputSummary {
    pub m: u32,
    pub mean_light: f64,
    pub mean_transmission: f64,
    pub mean_luminance: f64,
    pub mean_weight: f64,
}

#[derive(Debug, Serialize)]
pub struct InspectSummary {
    pub input: String,
    pub width: usize,
    pub height: usize,
    pub config: EnhanceConfig,
    pub mean_code: f64,
    /// Pixel count per code, codes 1 through 7.
    pub code_histogram: [usize; 7],
    pub global_light: Option<[f32; 3]>,
    pub inputs: Vec<InputSummary>,
    pub metrics: MetricsReport,
}

/// Enhances one image, dumps all intermediates into `out_dir` and writes
/// `summary.json` there.
pub fn run_inspect(input: &Path, out_dir: &Path, config: &EnhanceConfig) -> Result<InspectSummary> {
    let img = read_image(input)?;
    let trace = l2uwe_enhance_traced(&img, config)?;
    write_trace(&trace, out_dir)?;

    let mut code_histogram = [0; 7];
    for &c in trace.cci.codes() {
        code_histogram[c as usize - 1] += 1;
    }
    let inputs = trace
        .inputs
        .iter()
        .zip(&trace.normalized)
        .map(|(t, w)| InputSummary {
            m: t.m,
            mean_light: t.single.light.image().mean(),
            mean_transmission: t.single.transmission.image().mean(),
            mean_luminance: mean_luminance(&t.single.output),
            mean_weight: w.mean(),
        })
        .collect();
    let summary = InspectSummary {
        input: input.display().to_string(),
        width: img.width(),
        height: img.height(),
        config: config.clone(),
        mean_code: trace.cci.mean_code(),
        code_histogram,
        global_light: trace.global_light.map(|g| g.0),
        inputs,
        metrics: MetricsReport::compute(&img, &trace.output)?,
    };
    let path = out_dir.join("summary.json");
    fs::write(&path, serde_json::to_string_pretty(&summary)? + "\n")
        .with_context(|| format!("cannot write {}", path.display()))?;
    Ok(summary)
}
