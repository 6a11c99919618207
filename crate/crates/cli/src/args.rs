use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use l2uwe::LightingMode;

#[derive(Parser, Debug)]
#[command(name = "l2uwe", version, about = "Low-light underwater image enhancement")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Enhance image files or directories of images.
    Enhance(EnhanceArgs),
    /// Score enhanced images against their originals.
    Compare(CompareArgs),
    /// Enhance one image and dump every intermediate map.
    Inspect(InspectArgs),
}

#[derive(Args, Debug)]
pub struct EnhanceArgs {
    /// Image files or directories.
    #[arg(required = true)]
    pub inputs: Vec<PathBuf>,

    /// Output directory, created if missing.
    #[arg(short, long)]
    pub output: PathBuf,

    #[command(flatten)]
    pub config: ConfigArgs,

    /// Worker threads for the batch. Defaults to the number of cores.
    #[arg(long, env = "L2UWE_JOBS")]
    pub jobs: Option<usize>,
}

#[derive(Args, Debug)]
pub struct CompareArgs {
    /// Directory of original images.
    pub original: PathBuf,

    /// Directory of enhanced images. A trailing `_l2uwe` on file stems is ignored when matching.
    pub enhanced: PathBuf,

    /// Where to write metrics.json and metrics.csv.
    #[arg(short, long, default_value = ".")]
    pub output: PathBuf,
}

#[derive(Args, Debug)]
pub struct InspectArgs {
    pub input: PathBuf,

    /// Directory receiving the dumps and summary.json.
    #[arg(short, long)]
    pub output: PathBuf,

    #[command(flatten)]
    pub config: ConfigArgs,
}

#[derive(Args, Debug, Default)]
pub struct ConfigArgs {
    /// JSON config file, or a previous run manifest.
    #[arg(long, value_name = "JSON")]
    pub config: Option<PathBuf>,

    #[arg(long)]
    pub m_detail: Option<u32>,

    #[arg(long)]
    pub m_bright: Option<u32>,

    /// Per-step contrast tolerance for the code image.
    #[arg(long)]
    pub tolerance: Option<f64>,

    #[arg(long)]
    pub omega: Option<f64>,

    /// Lower bound on transmission during recovery.
    #[arg(long)]
    pub t0: Option<f64>,

    /// Pyramid levels used for fusion.
    #[arg(long)]
    pub levels: Option<usize>,

    #[arg(long, value_enum)]
    pub lighting_mode: Option<ModeArg>,

    /// Fraction of brightest dark-channel pixels for global lighting.
    #[arg(long)]
    pub fraction: Option<f64>,

    #[arg(long)]
    pub guided_radius: Option<usize>,

    #[arg(long)]
    pub guided_eps: Option<f64>,

    #[arg(long)]
    pub guided_subsample: Option<usize>,

    /// Write intermediate maps next to each output.
    #[arg(long)]
    pub dump: bool,

    /// Record quality metrics in the manifest.
    #[arg(long)]
    pub metrics: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    LocalCg,
    Global,
}

impl From<ModeArg> for LightingMode {
    fn from(m: ModeArg) -> Self {
        match m {
            ModeArg::LocalCg => LightingMode::LocalCg,
            ModeArg::Global => LightingMode::Global,
        }
    }
}
