//! Low-light underwater image enhancement.
//!
//! A dark underwater frame looks hazy once inverted, so the pipeline dehazes
//! the inverted image and inverts the result back. Lighting is estimated
//! locally: a contrast code image picks a patch size per pixel, a
//! contrast-guided dark channel feeds a local max/min lighting field, and two
//! such fields (a narrow one that keeps detail, a wide one that lifts
//! darkness) each drive one dehazing pass. The two results are blended by
//! Laplacian-pyramid fusion steered by saliency, luminance and local-contrast
//! weights.
//!
//! ```no_run
//! use l2uwe::{io, l2uwe_enhance, EnhanceConfig};
//!
//! let img = io::load_image("dive.jpg")?;
//! let out = l2uwe_enhance(&img, &EnhanceConfig::default())?;
//! io::save_png(&out, "dive_l2uwe.png")?;
//! # Ok::<(), l2uwe::Error>(())
//! ```

pub mod cci;
pub mod dehaze;
pub mod error;
pub mod filter;
pub mod fusion;
pub mod guided;
pub mod image;
pub mod io;
pub mod lighting;
pub mod metrics;
pub mod pipeline;
pub mod pyramid;
pub mod synthetic;

pub use cci::{compute_cci, local_std, ContrastCodeImage};
pub use dehaze::{
    enhance_single, recover_radiance, transmission_cg, DehazeParams, TransmissionMap,
};
pub use error::{Error, Result};
pub use fusion::{
    fuse_multiscale, local_contrast_weight, luminance_weight, normalize_weights, saliency_weight,
    WeightMaps,
};
pub use guided::guided_filter;
pub use image::{clamp01, invert, luminance, ImageF};
pub use io::{load_image, read_image, save_png};
pub use lighting::{
    dark_channel_cg, global_atmosphere, local_cg_atmosphere, min_image, s_upsilon,
    smooth_lighting, GlobalLight, LightingField,
};
pub use metrics::{e_r_scores, gcf, mean_luminance, MetricsReport};
pub use pipeline::{l2uwe_enhance, l2uwe_enhance_traced, EnhanceConfig, LightingMode, PipelineTrace};
pub use pyramid::{build_gaussian_pyramid, build_laplacian_pyramid, collapse_pyramid, Pyramid, PyramidKind};
