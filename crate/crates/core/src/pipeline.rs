//! End-to-end enhancement: inversion, contrast codes, two lighting models,
//! two dehazed inputs, weight maps and multi-scale fusion.

use serde::{Deserialize, Serialize};

use crate::cci::{compute_cci, ContrastCodeImage, DEFAULT_TOLERANCE};
use crate::dehaze::{enhance_single_traced, enhance_with_light, DehazeParams, SingleTrace};
use crate::error::{invalid, Result};
use crate::fusion::{fuse_multiscale_raw, normalize_weights, WeightMaps};
use crate::image::{clamp01, invert, ImageF};
use crate::lighting::{dark_channel_cg, global_atmosphere, GlobalLight, LightingField, DEFAULT_FRACTION};
use crate::pyramid::DEFAULT_LEVELS;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LightingMode {
    /// Contrast-guided local lighting field, smoothed.
    #[default]
    LocalCg,
    /// One light vector from the brightest dark-channel pixels.
    Global,
}

/// Every tunable of the pipeline. Missing fields deserialize to defaults.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EnhanceConfig {
    pub m_detail: u32,
    pub m_bright: u32,
    pub tolerance: f64,
    pub omega: f64,
    pub t0: f64,
    pub levels: usize,
    pub lighting_mode: LightingMode,
    pub atmosphere_fraction: f64,
    pub guided_radius: usize,
    pub guided_eps: f64,
    pub guided_subsample: usize,
    pub dump_intermediates: bool,
    pub metrics: bool,
}

impl Default for EnhanceConfig {
    fn default() -> Self {
        let dehaze = DehazeParams::default();
        Self {
            m_detail: 5,
            m_bright: 30,
            tolerance: DEFAULT_TOLERANCE,
            omega: dehaze.omega,
            t0: dehaze.t0,
            levels: DEFAULT_LEVELS,
            lighting_mode: LightingMode::LocalCg,
            atmosphere_fraction: DEFAULT_FRACTION,
            guided_radius: dehaze.guided_radius,
            guided_eps: dehaze.guided_eps,
            guided_subsample: dehaze.guided_subsample,
            dump_intermediates: false,
            metrics: false,
        }
    }
}

impl EnhanceConfig {
    pub fn dehaze_params(&self) -> DehazeParams {
        DehazeParams {
            omega: self.omega,
            t0: self.t0,
            guided_radius: self.guided_radius,
            guided_eps: self.guided_eps,
            guided_subsample: self.guided_subsample,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.m_detail == 0 {
            return Err(invalid("m_detail", "must be at least 1"));
        }
        if self.m_bright <= self.m_detail {
            return Err(invalid(
                "m_bright",
                format!("must exceed m_detail ({}), got {}", self.m_detail, self.m_bright),
            ));
        }
        if !(self.tolerance >= 0.0 && self.tolerance.is_finite()) {
            return Err(invalid("tolerance", format!("must be nonnegative, got {}", self.tolerance)));
        }
        if self.levels == 0 {
            return Err(invalid("levels", "must be at least 1"));
        }
        if !(self.atmosphere_fraction > 0.0 && self.atmosphere_fraction <= 0.05) {
            return Err(invalid(
                "atmosphere_fraction",
                format!("must lie in (0, 0.05], got {}", self.atmosphere_fraction),
            ));
        }
        self.dehaze_params().validate()
    }
}

/// One fusion input together with the lighting model that produced it.
#[derive(Clone, Debug)]
pub struct InputTrace {
    pub m: u32,
    pub single: SingleTrace,
    pub weights: WeightMaps,
}

/// Intermediate products of one run, for inspection and dumps.
#[derive(Clone, Debug)]
pub struct PipelineTrace {
    pub cci: ContrastCodeImage,
    pub global_light: Option<GlobalLight>,
    pub inputs: Vec<InputTrace>,
    pub normalized: Vec<ImageF>,
    pub fused_unclamped: ImageF,
    pub output: ImageF,
}

/// Runs the full pipeline and keeps every intermediate.
pub fn l2uwe_enhance_traced(lowlight: &ImageF, config: &EnhanceConfig) -> Result<PipelineTrace> {
    config.validate()?;
    lowlight.expect_channels(3)?;
    if !lowlight.in_unit_range() {
        return Err(invalid("lowlight", "pixel values must lie in [0, 1]"));
    }
    let params = config.dehaze_params();
    let inv = invert(lowlight);
    let cci = compute_cci(&inv, config.tolerance)?;

    let global_light = match config.lighting_mode {
        LightingMode::LocalCg => None,
        LightingMode::Global => {
            let dark = dark_channel_cg(&inv, &cci)?;
            Some(global_atmosphere(&inv, &dark, config.atmosphere_fraction)?)
        }
    };
    let run = |m: u32| -> Result<InputTrace> {
        let single = match global_light {
            None => enhance_single_traced(lowlight, &cci, m, &params)?,
            Some(light) => {
                let field = LightingField::uniform(light, lowlight.width(), lowlight.height())?;
                enhance_with_light(lowlight, &cci, field, &params)?
            }
        };
        let weights = WeightMaps::compute(&single.output)?;
        Ok(InputTrace { m, single, weights })
    };
    let (detail, bright) = rayon::join(|| run(config.m_detail), || run(config.m_bright));
    let inputs = vec![detail?, bright?];

    let maps: Vec<WeightMaps> = inputs.iter().map(|t| t.weights.clone()).collect();
    let normalized = normalize_weights(&maps)?;
    let images: Vec<ImageF> = inputs.iter().map(|t| t.single.output.clone()).collect();
    let fused_unclamped = fuse_multiscale_raw(&images, &normalized, config.levels)?;
    let output = clamp01(&fused_unclamped);
    Ok(PipelineTrace {
        cci,
        global_light,
        inputs,
        normalized,
        fused_unclamped,
        output,
    })
}

/// Enhances a low-light RGB image in `[0, 1]`.
pub fn l2uwe_enhance(lowlight: &ImageF, config: &EnhanceConfig) -> Result<ImageF> {
    Ok(l2uwe_enhance_traced(lowlight, config)?.output)
}
