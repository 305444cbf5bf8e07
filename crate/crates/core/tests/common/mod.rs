#![allow(dead_code)]

use std::fs;
use std::path::{Path, PathBuf};

use newslens::pipeline::{run_pipeline, PipelineConfig, Stage};

pub fn corpus_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures/corpus")
}

pub fn golden_dir() -> PathBuf {
    corpus_dir().join("golden")
}

/// The bundled fixture config, writing to `out`.
pub fn fixture_config(out: &Path) -> PipelineConfig {
    let mut cfg = PipelineConfig::load(&corpus_dir().join("config.json")).expect("fixture config");
    cfg.paths.output = out.to_path_buf();
    cfg
}

/// A fresh scratch directory under the target dir.
pub fn scratch(name: &str) -> PathBuf {
    let dir = PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join(name);
    let _ = fs::remove_dir_all(&dir);
    fs::create_dir_all(&dir).unwrap();
    dir
}

/// Runs every stage on the fixture corpus into a fresh `out`.
pub fn run_fixture(name: &str) -> PathBuf {
    let out = scratch(name);
    run_pipeline(&fixture_config(&out), &Stage::ALL).expect("fixture pipeline");
    out
}

/// Text artifacts under `root`, relative and sorted. The manifest holds
/// timings and absolute paths, and the cache mirrors the archive, so both
/// are left out.
pub fn text_artifacts(root: &Path) -> Vec<String> {
    fn walk(root: &Path, dir: &Path, out: &mut Vec<String>) {
        for entry in fs::read_dir(dir).unwrap() {
            let path = entry.unwrap().path();
            let rel = path.strip_prefix(root).unwrap().to_string_lossy().replace('\\', "/");
            if path.is_dir() {
                if rel != "cache" {
                    walk(root, &path, out);
                }
            } else if rel != "manifest.json"
                && ["csv", "json", "jsonl", "md"].iter().any(|e| rel.ends_with(&format!(".{e}")))
            {
                out.push(rel);
            }
        }
    }
    let mut out = Vec::new();
    if root.is_dir() {
        walk(root, root, &mut out);
    }
    out.sort();
    out
}

pub fn copy_tree(from: &Path, to: &Path) {
    fs::create_dir_all(to).unwrap();
    for entry in fs::read_dir(from).unwrap() {
        let path = entry.unwrap().path();
        let dest = to.join(path.file_name().unwrap());
        if path.is_dir() {
            copy_tree(&path, &dest);
        } else {
            fs::copy(&path, &dest).unwrap();
        }
    }
}
