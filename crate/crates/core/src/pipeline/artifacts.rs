//! Artifact names and small helpers for reading and writing them.

use std::collections::BTreeMap;
use std::fs;
use std::io::{BufRead, BufReader, Write};
use std::path::{Path, PathBuf};

use serde::de::DeserializeOwned;
use serde::Serialize;

use super::Halt;
use crate::embed::Mode;

pub const PAGES: &str = "pages.jsonl";
pub const SEARCH: &str = "search.json";
pub const SNIPPETS: &str = "snippets.jsonl";
pub const CLEANED: &str = "cleaned.jsonl";
pub const VARIANTS: &str = "variants.csv";
pub const NORMALIZE_SUMMARY: &str = "normalize_summary.json";
pub const LOGODDS: &str = "logodds.csv";
pub const LOGODDS_SUMMARY: &str = "logodds_summary.json";
pub const REPRINT_EDGES: &str = "reprint_edges.csv";
pub const CLUSTERS: &str = "clusters.json";
pub const STATE_NETWORK: &str = "state_network.csv";
pub const NETWORK_SUMMARY: &str = "network_summary.json";
pub const STATE_COUNTS: &str = "state_counts.csv";
pub const REPORT: &str = "report.md";
pub const MANIFEST: &str = "manifest.json";

pub fn embed_dir(mode: Mode) -> String {
    format!("embed/{}", mode.name())
}

pub fn vectors_file(mode: Mode) -> String {
    format!("{}/vectors.bin", embed_dir(mode))
}

pub fn state_models_index(mode: Mode) -> String {
    format!("{}/states/index.json", embed_dir(mode))
}

pub fn state_model_file(mode: Mode, state: &str) -> String {
    format!("{}/states/{}.bin", embed_dir(mode), file_stem(state))
}

pub fn similarity_file(mode: Mode) -> String {
    format!("{}/similarity_matrix.csv", embed_dir(mode))
}

pub fn states_summary_file(mode: Mode) -> String {
    format!("{}/states.json", embed_dir(mode))
}

pub fn neighbors_file(mode: Mode, state: &str) -> String {
    format!("{}/neighbors_{}.csv", embed_dir(mode), file_stem(state))
}

/// State name as used in file names: spaces become underscores.
pub fn file_stem(state: &str) -> String {
    state.chars().map(|c| if c.is_alphanumeric() { c } else { '_' }).collect()
}

/// Records what a stage reads and writes, relative to the output directory.
pub struct StageIo {
    root: PathBuf,
    pub inputs: Vec<String>,
    pub outputs: Vec<String>,
}

impl StageIo {
    pub fn new(root: &Path) -> Self {
        Self { root: root.to_path_buf(), inputs: Vec::new(), outputs: Vec::new() }
    }

    pub fn root(&self) -> &Path {
        &self.root
    }

    /// Path of a required upstream artifact.
    pub fn input(&mut self, rel: &str) -> Result<PathBuf, Halt> {
        let p = self.root.join(rel);
        if !p.is_file() {
            return Err(Halt::Missing(p));
        }
        if !self.inputs.iter().any(|x| x == rel) {
            self.inputs.push(rel.to_string());
        }
        Ok(p)
    }

    /// Path for an artifact this stage writes; parent directories are created.
    pub fn output(&mut self, rel: &str) -> Result<PathBuf, Halt> {
        let p = self.root.join(rel);
        if let Some(dir) = p.parent() {
            fs::create_dir_all(dir)?;
        }
        if !self.outputs.iter().any(|x| x == rel) {
            self.outputs.push(rel.to_string());
        }
        Ok(p)
    }

    pub fn read_jsonl<T: DeserializeOwned>(&mut self, rel: &str) -> Result<Vec<T>, Halt> {
        let path = self.input(rel)?;
        let reader = BufReader::new(fs::File::open(&path)?);
        let mut out = Vec::new();
        for (i, line) in reader.lines().enumerate() {
            let line = line?;
            if line.trim().is_empty() {
                continue;
            }
            out.push(
                serde_json::from_str(&line).map_err(|e| Halt::format(format!("{}:{}: {e}", path.display(), i + 1)))?,
            );
        }
        Ok(out)
    }

    pub fn read_json<T: DeserializeOwned>(&mut self, rel: &str) -> Result<T, Halt> {
        let path = self.input(rel)?;
        let text = fs::read_to_string(&path)?;
        serde_json::from_str(&text).map_err(|e| Halt::format(format!("{}: {e}", path.display())))
    }

    pub fn read_csv(&mut self, rel: &str) -> Result<Vec<BTreeMap<String, String>>, Halt> {
        let path = self.input(rel)?;
        let mut reader = csv::Reader::from_path(&path).map_err(|e| Halt::format(e.to_string()))?;
        let headers = reader.headers().map_err(|e| Halt::format(e.to_string()))?.clone();
        let mut rows = Vec::new();
        for rec in reader.records() {
            let rec = rec.map_err(|e| Halt::format(format!("{}: {e}", path.display())))?;
            rows.push(headers.iter().zip(rec.iter()).map(|(h, v)| (h.to_string(), v.to_string())).collect());
        }
        Ok(rows)
    }

    pub fn write_jsonl<T: Serialize>(&mut self, rel: &str, items: &[T]) -> Result<(), Halt> {
        let mut buf = Vec::new();
        for it in items {
            serde_json::to_writer(&mut buf, it).map_err(|e| Halt::format(e.to_string()))?;
            buf.push(b'\n');
        }
        self.write_bytes(rel, &buf)
    }

    pub fn write_json<T: Serialize>(&mut self, rel: &str, value: &T) -> Result<(), Halt> {
        let mut text = serde_json::to_string_pretty(value).map_err(|e| Halt::format(e.to_string()))?;
        text.push('\n');
        self.write_bytes(rel, text.as_bytes())
    }

    pub fn write_csv(&mut self, rel: &str, header: &[&str], rows: &[Vec<String>]) -> Result<(), Halt> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(header).map_err(|e| Halt::format(e.to_string()))?;
        for r in rows {
            w.write_record(r).map_err(|e| Halt::format(e.to_string()))?;
        }
        let bytes = w.into_inner().map_err(|e| Halt::format(e.to_string()))?;
        self.write_bytes(rel, &bytes)
    }

    pub fn write_bytes(&mut self, rel: &str, bytes: &[u8]) -> Result<(), Halt> {
        let path = self.output(rel)?;
        let mut f = fs::File::create(path)?;
        f.write_all(bytes)?;
        Ok(())
    }
}
