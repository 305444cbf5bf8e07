use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::artifacts::{StageIo, MANIFEST};
use super::{Halt, PipelineConfig, Stage};

/// `manifest.json`: what each stage last read and wrote.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct Manifest {
    pub config_hash: String,
    pub config: serde_json::Value,
    pub stages: BTreeMap<Stage, StageRecord>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StageRecord {
    pub seconds: f64,
    pub config_hash: String,
    /// Artifact path relative to the output directory → sha256 hex.
    pub inputs: BTreeMap<String, String>,
    pub outputs: BTreeMap<String, String>,
}

impl Manifest {
    pub fn load(output_dir: &Path) -> Option<Self> {
        let text = fs::read_to_string(output_dir.join(MANIFEST)).ok()?;
        match serde_json::from_str(&text) {
            Ok(m) => Some(m),
            Err(e) => {
                log::warn!("ignoring unreadable {MANIFEST}: {e}");
                None
            }
        }
    }
}

pub fn sha256_file(path: &Path) -> std::io::Result<String> {
    Ok(hex::encode(Sha256::digest(fs::read(path)?)))
}

pub fn config_hash(config: &PipelineConfig) -> String {
    hex::encode(Sha256::digest(config.canonical_json().as_bytes()))
}

fn checksums(root: &Path, rels: &[String]) -> Result<BTreeMap<String, String>, Halt> {
    let mut out = BTreeMap::new();
    for rel in rels {
        out.insert(rel.clone(), sha256_file(&root.join(rel))?);
    }
    Ok(out)
}

/// Adds the record for `stage` and drops records of other stages whose
/// outputs were since removed or rewritten.
pub(super) fn record(config: &PipelineConfig, stage: Stage, seconds: f64, io: &StageIo) -> Result<(), Halt> {
    let root = io.root();
    let hash = config_hash(config);
    let mut manifest = Manifest::load(root).unwrap_or_default();
    manifest.stages.remove(&stage);
    manifest.stages.retain(|other, rec| {
        let current = rec.outputs.iter().all(|(rel, sum)| sha256_file(&root.join(rel)).is_ok_and(|s| &s == sum));
        if !current {
            log::info!("manifest entry for {other} is stale and was removed");
        }
        current
    });
    manifest.stages.insert(
        stage,
        StageRecord {
            seconds,
            config_hash: hash.clone(),
            inputs: checksums(root, &io.inputs)?,
            outputs: checksums(root, &io.outputs)?,
        },
    );
    manifest.config_hash = hash;
    manifest.config = serde_json::to_value(config).map_err(|e| Halt::format(e.to_string()))?;
    let mut text = serde_json::to_string_pretty(&manifest).map_err(|e| Halt::format(e.to_string()))?;
    text.push('\n');
    fs::write(root.join(MANIFEST), text)?;
    Ok(())
}
