use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};

const EXTENSIONS: [&str; 4] = ["png", "jpg", "jpeg", "pfm"];

pub const OUTPUT_SUFFIX: &str = "_l2uwe";

pub fn is_image_path(path: &Path) -> bool {
    path.extension()
        .and_then(|e| e.to_str())
        .is_some_and(|e| EXTENSIONS.iter().any(|x| e.eq_ignore_ascii_case(x)))
}

/// Image files directly inside `dir`, sorted by name.
pub fn list_images(dir: &Path) -> Result<Vec<PathBuf>> {
    let mut out = Vec::new();
    for entry in fs::read_dir(dir).with_context(|| format!("cannot read directory {}", dir.display()))? {
        let path = entry?.path();
        if path.is_file() && is_image_path(&path) {
            out.push(path);
        }
    }
    out.sort();
    Ok(out)
}

/// Expands directories into their images. Plain paths pass through
/// unchanged, so missing or unreadable files surface as per-image errors.
pub fn expand_inputs(inputs: &[PathBuf]) -> Result<Vec<PathBuf>> {
    let mut out = Vec::new();
    for input in inputs {
        if input.is_dir() {
            out.extend(list_images(input)?);
        } else {
            out.push(input.clone());
        }
    }
    Ok(out)
}

pub fn stem(path: &Path) -> String {
    path.file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "image".to_owned())
}

pub fn output_stem(path: &Path) -> String {
    format!("{}{OUTPUT_SUFFIX}", stem(path))
}
