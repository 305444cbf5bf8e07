use std::path::{Path, PathBuf};

use chrono::NaiveDate;
use serde::{Deserialize, Serialize};

use super::PipelineError;
use crate::embed::Mode;
use crate::hash::substream_seed;
use crate::ingest::{SearchQuery, DEFAULT_BASE_URL, MAX_ROWS_PER_PAGE};
use crate::normalize::CleanConfig;
use crate::stats::GroupingMode;

/// Which embedding objectives to train.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EmbedModes {
    Cbow,
    Skipgram,
    Both,
}

impl EmbedModes {
    pub fn modes(self) -> Vec<Mode> {
        match self {
            EmbedModes::Cbow => vec![Mode::Cbow],
            EmbedModes::Skipgram => vec![Mode::Skipgram],
            EmbedModes::Both => vec![Mode::Cbow, Mode::Skipgram],
        }
    }
}

/// How per-state keyword vectors are made comparable.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Tagging {
    /// One model; keyword occurrences are rewritten to `keyword@STATE`.
    Shared,
    /// One model per state.
    Replicate,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SubwordConfig {
    pub ngram_min: usize,
    pub ngram_max: usize,
    pub dim: usize,
    pub epochs: usize,
    pub min_count: u64,
    pub buckets: u32,
    pub window: usize,
    pub negatives: usize,
}

impl Default for SubwordConfig {
    fn default() -> Self {
        Self {
            ngram_min: 3,
            ngram_max: 6,
            dim: 100,
            epochs: 5,
            min_count: 1,
            buckets: 1 << 21,
            window: 5,
            negatives: 5,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Paths {
    /// OCR cache; defaults to `<output>/cache`.
    pub cache: Option<PathBuf>,
    /// Recorded responses for offline runs.
    pub fixtures: Option<PathBuf>,
    pub output: PathBuf,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct PipelineConfig {
    pub keyword: String,
    pub radius: usize,
    pub rows_per_page: u32,
    /// Stop after this many search result pages.
    pub max_pages: Option<u32>,
    pub base_url: String,
    /// Requests per second against the live archive.
    pub rate_limit: f64,

    pub stopwords: Option<PathBuf>,
    pub lemma_rules: Option<PathBuf>,
    pub subword: SubwordConfig,
    pub variant_k: usize,
    pub variant_min_similarity: Option<f64>,

    pub mode: EmbedModes,
    pub tagging: Tagging,
    /// Rotate per-state models onto a reference state (replicate tagging).
    pub align: bool,
    pub min_count: u64,
    pub window: usize,
    pub dim: usize,
    pub negatives: usize,
    pub epochs: usize,
    pub initial_lr: f32,
    pub subsample: f64,
    pub neighbors_k: usize,

    pub grouping_mode: GroupingMode,
    pub top_m: usize,
    pub prior_strength: f64,

    pub reuse_n: usize,
    pub reuse_threshold: u32,
    pub hot_shingle_cap: Option<usize>,

    pub seed: u64,
    pub workers: usize,
    /// Issue dates after this day are flagged; defaults to the day of the run.
    pub run_date: Option<NaiveDate>,
    pub paths: Paths,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        Self {
            keyword: "coolie".into(),
            radius: 10,
            rows_per_page: 50,
            max_pages: None,
            base_url: DEFAULT_BASE_URL.into(),
            rate_limit: 2.0,
            stopwords: None,
            lemma_rules: None,
            subword: SubwordConfig::default(),
            variant_k: 200,
            variant_min_similarity: None,
            mode: EmbedModes::Both,
            tagging: Tagging::Shared,
            align: false,
            min_count: 5,
            window: 5,
            dim: 100,
            negatives: 5,
            epochs: 5,
            initial_lr: 0.025,
            subsample: 1e-3,
            neighbors_k: 10,
            grouping_mode: GroupingMode::ListedUnion,
            top_m: 15_000,
            prior_strength: 1.0,
            reuse_n: 5,
            reuse_threshold: 4,
            hot_shingle_cap: None,
            seed: 1882,
            workers: 1,
            run_date: None,
            paths: Paths { output: PathBuf::from("out"), ..Paths::default() },
        }
    }
}

impl PipelineConfig {
    /// Parses a JSON config; unknown keys are rejected.
    pub fn from_json(text: &str) -> Result<Self, PipelineError> {
        serde_json::from_str(text).map_err(|e| PipelineError::ConfigInvalid(e.to_string()))
    }

    /// Reads a JSON config file. Relative paths inside it are resolved
    /// against the file's directory.
    pub fn load(path: &Path) -> Result<Self, PipelineError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| PipelineError::ConfigInvalid(format!("{}: {e}", path.display())))?;
        let mut cfg = Self::from_json(&text)?;
        let base = path.parent().unwrap_or(Path::new("."));
        let fix = |p: &mut PathBuf| {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        };
        for p in [&mut cfg.stopwords, &mut cfg.lemma_rules, &mut cfg.paths.cache, &mut cfg.paths.fixtures]
            .into_iter()
            .flatten()
        {
            fix(p);
        }
        fix(&mut cfg.paths.output);
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<(), PipelineError> {
        let bad = |m: String| Err(PipelineError::ConfigInvalid(m));
        SearchQuery::new(self.keyword.clone(), self.rows_per_page, 1)
            .validate()
            .or_else(|e| bad(format!("keyword/rows_per_page: {e}")))?;
        if self.rows_per_page > MAX_ROWS_PER_PAGE {
            return bad(format!("rows_per_page must be at most {MAX_ROWS_PER_PAGE}"));
        }
        let positive = [
            ("radius", self.radius as u64),
            ("min_count", self.min_count),
            ("window", self.window as u64),
            ("negatives", self.negatives as u64),
            ("epochs", self.epochs as u64),
            ("neighbors_k", self.neighbors_k as u64),
            ("top_m", self.top_m as u64),
            ("reuse_n", self.reuse_n as u64),
            ("reuse_threshold", u64::from(self.reuse_threshold)),
            ("workers", self.workers as u64),
            ("subword.epochs", self.subword.epochs as u64),
            ("subword.min_count", self.subword.min_count),
            ("subword.window", self.subword.window as u64),
            ("subword.negatives", self.subword.negatives as u64),
            ("subword.buckets", u64::from(self.subword.buckets)),
        ];
        for (name, v) in positive {
            if v == 0 {
                return bad(format!("{name} must be positive"));
            }
        }
        if self.max_pages == Some(0) || self.hot_shingle_cap == Some(0) {
            return bad("max_pages and hot_shingle_cap must be positive when set".into());
        }
        if self.dim < 2 {
            return bad("dim must be at least 2".into());
        }
        if self.subword.dim < 8 {
            return bad("subword.dim must be at least 8".into());
        }
        if self.subword.ngram_min < 1 || self.subword.ngram_max < self.subword.ngram_min {
            return bad("need 1 <= subword.ngram_min <= subword.ngram_max".into());
        }
        if !(self.initial_lr > 0.0) || !(self.subsample >= 0.0) {
            return bad("initial_lr must be positive and subsample non-negative".into());
        }
        if !(self.prior_strength > 0.0 && self.prior_strength.is_finite()) {
            return bad("prior_strength must be positive".into());
        }
        if !(self.rate_limit >= 0.0) {
            return bad("rate_limit must be non-negative".into());
        }
        if let Some(f) = self.variant_min_similarity {
            if !(-1.0..=1.0).contains(&f) {
                return bad("variant_min_similarity must lie in [-1, 1]".into());
            }
        }
        if self.paths.output.as_os_str().is_empty() {
            return bad("paths.output is empty".into());
        }
        Ok(())
    }

    /// Checks that the keyword comes through cleaning unchanged, so it can
    /// still be found in cleaned snippets.
    pub fn check_keyword_survives(&self, clean: &CleanConfig) -> Result<(), PipelineError> {
        match clean.clean_token(&self.keyword) {
            Some(k) if k == self.keyword => Ok(()),
            other => Err(PipelineError::ConfigInvalid(format!(
                "keyword {:?} does not survive cleaning (becomes {:?})",
                self.keyword, other
            ))),
        }
    }

    pub fn clean_config(&self) -> Result<CleanConfig, PipelineError> {
        CleanConfig::load(self.stopwords.as_deref(), self.lemma_rules.as_deref())
            .map_err(|e| PipelineError::ConfigInvalid(e.to_string()))
    }

    /// Seed for a named stage or sub-task, derived from the config seed.
    pub fn stream_seed(&self, name: &str) -> u64 {
        substream_seed(self.seed, name)
    }

    pub fn cache_dir(&self) -> PathBuf {
        self.paths.cache.clone().unwrap_or_else(|| self.paths.output.join("cache"))
    }

    pub fn canonical_json(&self) -> String {
        serde_json::to_string(self).expect("config serializes")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_are_valid() {
        let cfg = PipelineConfig::default();
        cfg.validate().unwrap();
        cfg.check_keyword_survives(&CleanConfig::bundled()).unwrap();
        assert_eq!((cfg.radius, cfg.min_count, cfg.window, cfg.variant_k, cfg.top_m), (10, 5, 5, 200, 15_000));
        assert_eq!((cfg.reuse_n, cfg.reuse_threshold), (5, 4));
    }

    #[test]
    fn unknown_keys_are_rejected() {
        assert!(matches!(
            PipelineConfig::from_json(r#"{"keyword": "coolie", "colour": 1}"#),
            Err(PipelineError::ConfigInvalid(_))
        ));
        let cfg = PipelineConfig::from_json(r#"{"keyword": "labor", "subword": {"dim": 16}}"#).unwrap();
        assert_eq!(cfg.keyword, "labor");
        assert_eq!(cfg.subword.dim, 16);
        assert_eq!(cfg.subword.ngram_max, 6);
    }

    #[test]
    fn invalid_values() {
        let bad = |f: fn(&mut PipelineConfig)| {
            let mut c = PipelineConfig::default();
            f(&mut c);
            c.validate().is_err()
        };
        assert!(bad(|c| c.keyword = String::new()));
        assert!(bad(|c| c.keyword = "two words".into()));
        assert!(bad(|c| c.radius = 0));
        assert!(bad(|c| c.rows_per_page = 101));
        assert!(bad(|c| c.subword.dim = 4));
        assert!(bad(|c| c.variant_min_similarity = Some(2.0)));
    }

    #[test]
    fn keyword_must_survive_cleaning() {
        let clean = CleanConfig::bundled();
        let cfg = PipelineConfig { keyword: "the".into(), ..Default::default() };
        assert!(cfg.check_keyword_survives(&clean).is_err());
        let cfg = PipelineConfig { keyword: "coolies".into(), ..Default::default() };
        assert!(cfg.check_keyword_survives(&clean).is_err());
    }

    #[test]
    fn seeds_differ_by_stream() {
        let cfg = PipelineConfig::default();
        assert_ne!(cfg.stream_seed("subword"), cfg.stream_seed("embed-cbow"));
        assert_eq!(cfg.stream_seed("subword"), cfg.stream_seed("subword"));
    }
}
