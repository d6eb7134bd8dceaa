//! Optional JSON config file. Keys mirror the long CLI flags; values act as
//! defaults that explicit flags override, so an experiment can be recorded in
//! one reusable file.

use std::path::Path;

use anyhow::Context;
use serde::Deserialize;

#[derive(Debug, Default, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub threads: Option<usize>,
    // transfer / visibility
    pub gamma: Option<f64>,
    pub max_range: Option<f64>,
    pub min_range: Option<f64>,
    pub slack_deg: Option<f64>,
    pub normal_k: Option<usize>,
    // frame sampling
    pub distance_step: Option<f64>,
    pub heading_step: Option<f64>,
    // submap extraction
    pub radius: Option<f64>,
    pub time_window: Option<f64>,
    pub self_strike: Option<f64>,
    // split generation
    pub ratios: Option<[f64; 3]>,
    pub buffer_dist: Option<f64>,
    pub k: Option<usize>,
    pub candidates: Option<usize>,
    pub seed: Option<u64>,
    pub w_ld: Option<f64>,
    pub w_if: Option<f64>,
    pub w_kl: Option<f64>,
    pub w_sc: Option<f64>,
}

impl FileConfig {
    pub fn load(path: Option<&Path>) -> anyhow::Result<Self> {
        match path {
            None => Ok(Self::default()),
            Some(path) => {
                let text = std::fs::read_to_string(path)
                    .with_context(|| format!("reading config {}", path.display()))?;
                serde_json::from_str(&text)
                    .with_context(|| format!("parsing config {}", path.display()))
            }
        }
    }
}
