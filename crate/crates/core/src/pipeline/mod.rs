//! Stage orchestration: each stage reads and writes declared files in the
//! output directory, and a manifest records what was produced.

pub mod artifacts;
mod config;
mod manifest;
mod report;
mod stages;

use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;
use std::time::Instant;

use serde::{Deserialize, Serialize};

pub use config::{EmbedModes, Paths, PipelineConfig, SubwordConfig, Tagging};
pub use manifest::{Manifest, StageRecord};

use crate::embed::EmbedError;
use crate::ingest::IngestError;
use crate::normalize::NormalizeError;
use crate::reuse::ReuseError;
use crate::stats::StatsError;
use artifacts::StageIo;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Stage {
    Fetch,
    Extract,
    Normalize,
    TrainEmbed,
    CompareStates,
    Logodds,
    DetectReuse,
    Network,
    Report,
}

impl Stage {
    pub const ALL: [Stage; 9] = [
        Stage::Fetch,
        Stage::Extract,
        Stage::Normalize,
        Stage::TrainEmbed,
        Stage::CompareStates,
        Stage::Logodds,
        Stage::DetectReuse,
        Stage::Network,
        Stage::Report,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Stage::Fetch => "fetch",
            Stage::Extract => "extract",
            Stage::Normalize => "normalize",
            Stage::TrainEmbed => "train-embed",
            Stage::CompareStates => "compare-states",
            Stage::Logodds => "logodds",
            Stage::DetectReuse => "detect-reuse",
            Stage::Network => "network",
            Stage::Report => "report",
        }
    }

    /// Parses a comma-separated stage list; `all` expands to every stage.
    pub fn parse_list(s: &str) -> Result<Vec<Stage>, PipelineError> {
        let mut out = Vec::new();
        for part in s.split(',').map(str::trim).filter(|p| !p.is_empty()) {
            if part == "all" {
                out.extend(Stage::ALL);
            } else {
                out.push(part.parse()?);
            }
        }
        if out.is_empty() {
            return Err(PipelineError::ConfigInvalid("no stages given".into()));
        }
        Ok(out)
    }
}

impl fmt::Display for Stage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Stage {
    type Err = PipelineError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Stage::ALL
            .into_iter()
            .find(|st| st.name() == s)
            .ok_or_else(|| PipelineError::ConfigInvalid(format!("unknown stage {s:?}")))
    }
}

/// Module error raised inside a stage.
#[derive(Debug, thiserror::Error)]
pub enum StageError {
    #[error(transparent)]
    Ingest(#[from] IngestError),
    #[error(transparent)]
    Normalize(#[from] NormalizeError),
    #[error(transparent)]
    Embed(#[from] EmbedError),
    #[error(transparent)]
    Stats(#[from] StatsError),
    #[error(transparent)]
    Reuse(#[from] ReuseError),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error("unreadable artifact: {0}")]
    Format(String),
    #[error("output contract violated: {0}")]
    Contract(String),
}

#[derive(Debug, thiserror::Error)]
pub enum PipelineError {
    #[error("invalid configuration: {0}")]
    ConfigInvalid(String),
    #[error("stage {stage} needs {path}, which does not exist; run the upstream stage first")]
    MissingUpstreamArtifact { stage: Stage, path: PathBuf },
    #[error("stage {stage} failed: {source}")]
    StageFailure {
        stage: Stage,
        #[source]
        source: StageError,
    },
}

/// Why a stage stopped, before the stage name is attached.
#[derive(Debug)]
pub enum Halt {
    Missing(PathBuf),
    Failed(StageError),
}

impl Halt {
    pub(crate) fn format(msg: String) -> Self {
        Halt::Failed(StageError::Format(msg))
    }

    fn at(self, stage: Stage) -> PipelineError {
        match self {
            Halt::Missing(path) => PipelineError::MissingUpstreamArtifact { stage, path },
            Halt::Failed(source) => PipelineError::StageFailure { stage, source },
        }
    }
}

impl<E: Into<StageError>> From<E> for Halt {
    fn from(e: E) -> Self {
        Halt::Failed(e.into())
    }
}

/// Timing of one executed stage.
#[derive(Debug, Clone, PartialEq)]
pub struct StageRun {
    pub stage: Stage,
    pub seconds: f64,
}

/// Runs `stages` (in pipeline order, duplicates ignored) and updates the
/// manifest after each one.
pub fn run_pipeline(config: &PipelineConfig, stages: &[Stage]) -> Result<Vec<StageRun>, PipelineError> {
    config.validate()?;
    let clean = config.clean_config()?;
    config.check_keyword_survives(&clean)?;
    let out = &config.paths.output;
    std::fs::create_dir_all(out)
        .map_err(|e| PipelineError::ConfigInvalid(format!("cannot create {}: {e}", out.display())))?;

    let mut order = stages.to_vec();
    order.sort();
    order.dedup();
    let mut runs = Vec::with_capacity(order.len());
    for stage in order {
        log::info!("running stage {stage}");
        let mut io = StageIo::new(out);
        let started = Instant::now();
        stages::run(stage, config, &clean, &mut io).map_err(|h| h.at(stage))?;
        let seconds = started.elapsed().as_secs_f64();
        manifest::record(config, stage, seconds, &io).map_err(|h| h.at(stage))?;
        runs.push(StageRun { stage, seconds });
    }
    Ok(runs)
}
