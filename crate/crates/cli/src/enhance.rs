use std::collections::HashMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use anyhow::{anyhow, Context, Result};
use l2uwe::{l2uwe_enhance_traced, read_image, save_png, EnhanceConfig, MetricsReport};
use log::{info, warn};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dump::write_trace;
use crate::files::{expand_inputs, output_stem};

pub const MANIFEST_NAME: &str = "manifest.json";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Ok,
    Error,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ImageRecord {
    pub input: String,
    pub status: Status,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub output: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub width: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub height: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub dump_dir: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub metrics: Option<MetricsReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

/// Wall-clock times and worker count, kept apart from the records so
/// repeated runs produce identical records.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Timings {
    pub jobs: usize,
    pub total_seconds: f64,
    /// Seconds per input, in record order.
    pub per_image: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub config: EnhanceConfig,
    pub records: Vec<ImageRecord>,
    pub timings: Timings,
}

impl RunManifest {
    pub fn succeeded(&self) -> usize {
        self.records.iter().filter(|r| r.status == Status::Ok).count()
    }
}

struct Job {
    input: PathBuf,
    stem: String,
    /// Earlier input already claiming the same output name.
    clash: Option<PathBuf>,
}

fn plan(inputs: Vec<PathBuf>) -> Vec<Job> {
    let mut seen: HashMap<String, PathBuf> = HashMap::new();
    inputs
        .into_iter()
        .map(|input| {
            let stem = output_stem(&input);
            let clash = seen.get(&stem).cloned();
            seen.entry(stem.clone()).or_insert_with(|| input.clone());
            Job { input, stem, clash }
        })
        .collect()
}

fn process(job: &Job, out_dir: &Path, config: &EnhanceConfig) -> Result<ImageRecord> {
    if let Some(first) = &job.clash {
        return Err(anyhow!("output name {} already used by {}", job.stem, first.display()));
    }
    let img = read_image(&job.input)?;
    let trace = l2uwe_enhance_traced(&img, config)?;
    let output = out_dir.join(format!("{}.png", job.stem));
    save_png(&trace.output, &output)?;
    let dump_dir = if config.dump_intermediates {
        let dir = out_dir.join(&job.stem);
        write_trace(&trace, &dir)?;
        Some(dir.display().to_string())
    } else {
        None
    };
    let metrics = if config.metrics {
        Some(MetricsReport::compute(&img, &trace.output)?)
    } else {
        None
    };
    Ok(ImageRecord {
        input: job.input.display().to_string(),
        status: Status::Ok,
        output: Some(output.display().to_string()),
        width: Some(img.width()),
        height: Some(img.height()),
        dump_dir,
        metrics,
        error: None,
    })
}

fn failed(input: &Path, err: &anyhow::Error) -> ImageRecord {
    ImageRecord {
        input: input.display().to_string(),
        status: Status::Error,
        output: None,
        width: None,
        height: None,
        dump_dir: None,
        metrics: None,
        error: Some(format!("{err:#}")),
    }
}

/// Number of workers when none is requested.
pub fn default_jobs() -> usize {
    std::thread::available_parallelism().map_or(1, |n| n.get())
}

/// Enhances every input into `out_dir` and writes `manifest.json` there.
/// Per-image failures become error records.
pub fn run_enhance(inputs: &[PathBuf], out_dir: &Path, config: &EnhanceConfig, jobs: usize) -> Result<RunManifest> {
    config.validate()?;
    if jobs == 0 {
        return Err(anyhow!("invalid parameter `jobs`: must be at least 1"));
    }
    fs::create_dir_all(out_dir).with_context(|| format!("cannot create output directory {}", out_dir.display()))?;
    let jobs_list = plan(expand_inputs(inputs)?);
    let pool = rayon::ThreadPoolBuilder::new().num_threads(jobs).build()?;

    let start = Instant::now();
    let results: Vec<(ImageRecord, f64)> = pool.install(|| {
        jobs_list
            .par_iter()
            .map(|job| {
                let t = Instant::now();
                let record = process(job, out_dir, config).unwrap_or_else(|e| {
                    warn!("{}: {e:#}", job.input.display());
                    failed(&job.input, &e)
                });
                (record, t.elapsed().as_secs_f64())
            })
            .collect()
    });
    let (records, per_image): (Vec<_>, Vec<_>) = results.into_iter().unzip();
    let manifest = RunManifest {
        config: config.clone(),
        records,
        timings: Timings {
            jobs,
            total_seconds: start.elapsed().as_secs_f64(),
            per_image,
        },
    };
    let path = out_dir.join(MANIFEST_NAME);
    fs::write(&path, serde_json::to_string_pretty(&manifest)? + "\n")
        .with_context(|| format!("cannot write {}", path.display()))?;
    info!(
        "{} of {} images enhanced in {:.2}s",
        manifest.succeeded(),
        manifest.records.len(),
        manifest.timings.total_seconds
    );
    Ok(manifest)
}
