//! Figure presets shipped as scenario files.

use super::config::ScenarioConfig;
use crate::error::{Error, Result};

/// `(name, scenario text)`
pub const PRESETS: [(&str, &str); 8] = [
    ("fig2", include_str!("../../presets/fig2.toml")),
    ("fig3", include_str!("../../presets/fig3.toml")),
    ("fig4", include_str!("../../presets/fig4.toml")),
    ("fig5", include_str!("../../presets/fig5.toml")),
    ("fig6", include_str!("../../presets/fig6.toml")),
    ("fig7", include_str!("../../presets/fig7.toml")),
    ("fig8", include_str!("../../presets/fig8.toml")),
    ("fig9", include_str!("../../presets/fig9.toml")),
];

pub fn preset(name: &str) -> Result<ScenarioConfig> {
    let (_, text) = PRESETS.iter().find(|(n, _)| *n == name).ok_or_else(|| {
        let names: Vec<_> = PRESETS.iter().map(|(n, _)| *n).collect();
        Error::InvalidConfig(format!("unknown preset '{name}' (available: {})", names.join(", ")))
    })?;
    ScenarioConfig::parse(text)
}
