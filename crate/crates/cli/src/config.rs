use std::fs;
use std::path::Path;

use anyhow::Context;
use serde::Deserialize;

use crate::output::Format;

/// Defaults read from a TOML file, with the same keys as the flags.
#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "kebab-case")]
pub struct RunConfig {
    pub g: Option<usize>,
    pub r: Option<usize>,
    pub word: Option<String>,
    pub mu: Option<String>,
    pub nu: Option<String>,
    pub n: Option<Vec<i64>>,
    pub max_boxes: Option<usize>,
    pub seed: Option<u64>,
    pub samples: Option<u64>,
    pub format: Option<Format>,
    pub cost_limit: Option<u128>,
    pub general_genus: Option<bool>,
}

impl RunConfig {
    pub fn load(path: &Path) -> anyhow::Result<Self> {
        let text =
            fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        toml::from_str(&text).with_context(|| format!("parsing {}", path.display()))
    }
}
