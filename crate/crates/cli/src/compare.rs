use std::collections::btree_map::Entry;
use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use l2uwe::{read_image, MetricsReport};
use log::warn;
use serde::{Deserialize, Serialize};

use crate::files::{list_images, stem, OUTPUT_SUFFIX};

pub const JSON_NAME: &str = "metrics.json";
pub const CSV_NAME: &str = "metrics.csv";

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PairRecord {
    pub name: String,
    pub original: String,
    pub enhanced: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub metrics: Option<MetricsReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct CompareReport {
    pub pairs: Vec<PairRecord>,
    /// Files present on only one side, or shadowed by another file with the same stem.
    pub unmatched: Vec<String>,
}

impl CompareReport {
    pub fn scored(&self) -> impl Iterator<Item = &MetricsReport> {
        self.pairs.iter().filter_map(|p| p.metrics.as_ref())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AggregateRow {
    pub metric: &'static str,
    pub mean: f64,
    pub std: f64,
}

fn key_of(path: &Path, strip_suffix: bool) -> String {
    let s = stem(path);
    match s.strip_suffix(OUTPUT_SUFFIX) {
        Some(base) if strip_suffix && !base.is_empty() => base.to_owned(),
        _ => s,
    }
}

fn index(dir: &Path, strip_suffix: bool, unmatched: &mut Vec<String>) -> Result<BTreeMap<String, PathBuf>> {
    let mut map = BTreeMap::new();
    for path in list_images(dir)? {
        let key = key_of(&path, strip_suffix);
        match map.entry(key) {
            Entry::Occupied(_) => unmatched.push(path.display().to_string()),
            Entry::Vacant(slot) => {
                slot.insert(path);
            }
        }
    }
    Ok(map)
}

fn score(original: &Path, enhanced: &Path) -> Result<MetricsReport> {
    let a = read_image(original)?;
    let b = read_image(enhanced)?;
    Ok(MetricsReport::compute(&a, &b)?)
}

/// Scores every enhanced image whose stem (minus `_l2uwe`) matches an original.
pub fn compare_dirs(original_dir: &Path, enhanced_dir: &Path) -> Result<CompareReport> {
    let mut unmatched = Vec::new();
    let originals = index(original_dir, false, &mut unmatched)?;
    let mut enhanced = index(enhanced_dir, true, &mut unmatched)?;
    let mut pairs = Vec::new();
    for (name, orig) in originals {
        let Some(enh) = enhanced.remove(&name) else {
            unmatched.push(orig.display().to_string());
            continue;
        };
        let (metrics, error) = match score(&orig, &enh) {
            Ok(m) => (Some(m), None),
            Err(e) => {
                warn!("{name}: {e:#}");
                (None, Some(format!("{e:#}")))
            }
        };
        pairs.push(PairRecord {
            name,
            original: orig.display().to_string(),
            enhanced: enh.display().to_string(),
            metrics,
            error,
        });
    }
    unmatched.extend(enhanced.into_values().map(|p| p.display().to_string()));
    unmatched.sort();
    Ok(CompareReport { pairs, unmatched })
}

/// Mean and sample standard deviation; zero spread for a single value.
pub fn mean_std(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    if values.len() < 2 {
        return (mean, 0.0);
    }
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, var.sqrt())
}

/// One row per metric over the scored pairs. Absent e-scores are skipped;
/// metrics with no values produce no row.
pub fn aggregate<'a>(reports: impl IntoIterator<Item = &'a MetricsReport>) -> Vec<AggregateRow> {
    type Getter = fn(&MetricsReport) -> Option<f64>;
    let getters: [(&'static str, Getter); 6] = [
        ("gcf", |m| Some(m.gcf)),
        ("e_score", |m| m.e_score),
        ("r_score", |m| Some(m.r_score)),
        ("mean_luminance_in", |m| Some(m.mean_luminance_in)),
        ("mean_luminance_out", |m| Some(m.mean_luminance_out)),
        ("delta_mean_luminance", |m| Some(m.mean_luminance_out - m.mean_luminance_in)),
    ];
    let reports: Vec<&MetricsReport> = reports.into_iter().collect();
    getters
        .iter()
        .filter_map(|&(metric, get)| {
            let values: Vec<f64> = reports.iter().filter_map(|m| get(m)).collect();
            (!values.is_empty()).then(|| {
                let (mean, std) = mean_std(&values);
                AggregateRow { metric, mean, std }
            })
        })
        .collect()
}

pub fn write_csv(rows: &[AggregateRow], path: &Path) -> Result<()> {
    let mut w = csv::Writer::from_path(path).with_context(|| format!("cannot write {}", path.display()))?;
    if rows.is_empty() {
        w.write_record(["metric", "mean", "std"])?;
    }
    for row in rows {
        w.serialize(row)?;
    }
    w.flush()?;
    Ok(())
}

/// Runs the comparison and writes `metrics.json` and `metrics.csv` into `out_dir`.
pub fn run_compare(original_dir: &Path, enhanced_dir: &Path, out_dir: &Path) -> Result<CompareReport> {
    let report = compare_dirs(original_dir, enhanced_dir)?;
    for path in &report.unmatched {
        warn!("no counterpart for {path}, skipped");
    }
    if report.pairs.is_empty() {
        warn!("no matching file names between the two directories");
    }
    fs::create_dir_all(out_dir).with_context(|| format!("cannot create {}", out_dir.display()))?;
    let json = out_dir.join(JSON_NAME);
    fs::write(&json, serde_json::to_string_pretty(&report)? + "\n")
        .with_context(|| format!("cannot write {}", json.display()))?;
    write_csv(&aggregate(report.scored()), &out_dir.join(CSV_NAME))?;
    Ok(report)
}
