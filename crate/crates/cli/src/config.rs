//! Resolution of the effective config: defaults, then the config file, then flags.

use std::fs;
use std::path::Path;

use anyhow::{Context, Result};
use l2uwe::EnhanceConfig;
use serde_json::Value;

use crate::args::ConfigArgs;

/// Parses a config file. A run manifest is accepted too; its `config`
/// member is used.
pub fn read_config_file(path: &Path) -> Result<EnhanceConfig> {
    let text = fs::read_to_string(path).with_context(|| format!("cannot read config {}", path.display()))?;
    let mut value: Value =
        serde_json::from_str(&text).with_context(|| format!("{} is not valid JSON", path.display()))?;
    if let Some(inner) = value.get_mut("config") {
        value = inner.take();
    }
    serde_json::from_value(value).with_context(|| format!("invalid config in {}", path.display()))
}

pub fn resolve(args: &ConfigArgs) -> Result<EnhanceConfig> {
    let mut cfg = match &args.config {
        Some(path) => read_config_file(path)?,
        None => EnhanceConfig::default(),
    };
    macro_rules! set {
        ($($field:ident => $target:ident),* $(,)?) => {
            $(if let Some(v) = args.$field { cfg.$target = v.into(); })*
        };
    }
    set!(
        m_detail => m_detail,
        m_bright => m_bright,
        tolerance => tolerance,
        omega => omega,
        t0 => t0,
        levels => levels,
        lighting_mode => lighting_mode,
        fraction => atmosphere_fraction,
        guided_radius => guided_radius,
        guided_eps => guided_eps,
        guided_subsample => guided_subsample,
    );
    cfg.dump_intermediates |= args.dump;
    cfg.metrics |= args.metrics;
    cfg.validate()?;
    Ok(cfg)
}
