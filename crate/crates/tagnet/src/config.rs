//! Pipeline configuration: a TOML file mirroring the CLI flag set. Flags
//! win over config values; config values win over built-in defaults.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Result, TagnetError};

/// Full pipeline configuration. Every field is optional; unset fields fall
/// back to the module defaults documented on the CLI flags.
#[derive(Debug, Clone, Default, PartialEq, Deserialize, Serialize)]
#[serde(deny_unknown_fields, default)]
pub struct PipelineConfig {
    /// Directory all artifacts are written to.
    pub output_dir: Option<PathBuf>,
    pub ingest: IngestConfig,
    pub graph: GraphConfig,
    pub analyze: AnalyzeConfig,
    pub plot: PlotConfig,
    pub sample_curve: SampleCurveConfig,
}

#[derive(Debug, Clone, Default, PartialEq, Deserialize, Serialize)]
#[serde(deny_unknown_fields, default)]
pub struct IngestConfig {
    pub input: Vec<PathBuf>,
    /// "jsonl" or "csv"; inferred from the file extension when unset.
    pub format: Option<String>,
    pub query: Vec<String>,
    pub blocklist: Option<PathBuf>,
    pub translation_map: Option<PathBuf>,
    pub min_hashtags_per_post: Option<usize>,
    pub max_hashtags_per_post: Option<usize>,
    pub drop_duplicate_hashtag_sets: Option<bool>,
    pub variant_merge_enabled: Option<bool>,
    pub edit_distance_threshold: Option<u32>,
    pub plural_folding_enabled: Option<bool>,
    pub min_frequency_for_canonical: Option<u64>,
}

#[derive(Debug, Clone, Default, PartialEq, Deserialize, Serialize)]
#[serde(deny_unknown_fields, default)]
pub struct GraphConfig {
    pub top_n: Option<usize>,
    pub min_edge_weight: Option<u64>,
    pub exclude: Vec<String>,
    pub largest_component: Option<bool>,
    pub graphml: Option<bool>,
    pub dot: Option<bool>,
}

#[derive(Debug, Clone, Default, PartialEq, Deserialize, Serialize)]
#[serde(deny_unknown_fields, default)]
pub struct AnalyzeConfig {
    /// Measure names as accepted by `--measures`.
    pub measures: Vec<String>,
    pub top_k: Option<usize>,
}

#[derive(Debug, Clone, Default, PartialEq, Deserialize, Serialize)]
#[serde(deny_unknown_fields, default)]
pub struct PlotConfig {
    pub seed: Option<u64>,
    pub iterations: Option<usize>,
    pub size_by: Option<String>,
    pub label_top_k: Option<usize>,
}

#[derive(Debug, Clone, Default, PartialEq, Deserialize, Serialize)]
#[serde(deny_unknown_fields, default)]
pub struct SampleCurveConfig {
    pub batch_size: Option<usize>,
    pub window: Option<usize>,
    pub epsilon_pct: Option<f64>,
}

impl PipelineConfig {
    /// Referenced files must exist at validation time.
    pub fn validate(&self) -> Result<()> {
        let mut paths: Vec<&PathBuf> = self.ingest.input.iter().collect();
        paths.extend(self.ingest.blocklist.iter());
        paths.extend(self.ingest.translation_map.iter());
        for p in paths {
            if !p.exists() {
                return Err(TagnetError::InvalidConfig(format!(
                    "referenced file does not exist: {}",
                    p.display()
                )));
            }
        }
        Ok(())
    }
}

/// Read and validate a TOML config file.
pub fn load_config(path: &Path) -> Result<PipelineConfig> {
    let content = std::fs::read_to_string(path).map_err(|source| TagnetError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    let cfg: PipelineConfig = toml::from_str(&content)
        .map_err(|e| TagnetError::InvalidConfig(format!("{}: {e}", path.display())))?;
    cfg.validate()?;
    Ok(cfg)
}
