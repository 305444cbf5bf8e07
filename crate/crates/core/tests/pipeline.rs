mod common;

use std::fs;
use std::path::{Path, PathBuf};
use std::sync::OnceLock;

use common::{copy_tree, fixture_config, run_fixture, scratch};
use newslens::normalize::NormalizeError;
use newslens::pipeline::{run_pipeline, Manifest, PipelineError, Stage, StageError};
use newslens::snippet::Snippet;

/// One full run shared by the read-only tests in this file.
fn shared() -> &'static Path {
    static OUT: OnceLock<PathBuf> = OnceLock::new();
    OUT.get_or_init(|| run_fixture("pipeline-shared"))
}

fn read(root: &Path, rel: &str) -> String {
    fs::read_to_string(root.join(rel)).unwrap_or_else(|e| panic!("{rel}: {e}"))
}

fn csv_rows(root: &Path, rel: &str) -> Vec<csv::StringRecord> {
    csv::Reader::from_path(root.join(rel)).unwrap().records().map(Result::unwrap).collect()
}

fn cleaned(root: &Path) -> Vec<Snippet> {
    read(root, "cleaned.jsonl").lines().map(|l| serde_json::from_str(l).unwrap()).collect()
}

#[test]
fn ocr_variant_is_merged() {
    let out = shared();
    let rows = csv_rows(out, "variants.csv");
    assert_eq!(&rows[0][1], "cooiie");
    let summary: serde_json::Value = serde_json::from_str(&read(out, "normalize_summary.json")).unwrap();
    assert_eq!(summary["tokens_replaced"], 7);
    let snippets = cleaned(out);
    assert!(snippets.iter().all(|s| !s.tokens.iter().any(|t| t == "cooiie")));
    assert!(snippets.iter().all(|s| s.tokens[s.keyword_index] == "coolie"));
}

#[test]
fn near_miss_and_missing_page() {
    let out = shared();
    // The page with only "cooli" yields no snippet, and the hit without OCR
    // text is listed rather than fatal.
    let snippets: Vec<Snippet> =
        read(out, "snippets.jsonl").lines().map(|l| serde_json::from_str(l).unwrap()).collect();
    assert!(snippets.iter().all(|s| s.tokens[s.keyword_index] == "coolie"));
    let search: serde_json::Value = serde_json::from_str(&read(out, "search.json")).unwrap();
    assert_eq!(search["missing_pages"].as_array().unwrap().len(), 1);
    assert_eq!(search["pages_fetched"], 218);
}

#[test]
fn manifest_matches_files() {
    let out = shared();
    let manifest = Manifest::load(out).expect("manifest");
    assert_eq!(manifest.stages.keys().copied().collect::<Vec<_>>(), Stage::ALL);
    for (stage, rec) in &manifest.stages {
        assert!(!rec.outputs.is_empty(), "{stage} recorded no outputs");
        for (rel, sum) in rec.outputs.iter().chain(&rec.inputs) {
            let bytes = fs::read(out.join(rel)).unwrap();
            let actual = sha256_hex(&bytes);
            assert_eq!(&actual, sum, "{stage}: {rel}");
        }
    }
}

fn sha256_hex(bytes: &[u8]) -> String {
    use sha2::{Digest, Sha256};
    hex::encode(Sha256::digest(bytes))
}

#[test]
fn report_counts_add_up() {
    let out = shared();
    let total: usize = csv_rows(out, "state_counts.csv").iter().map(|r| r[3].parse::<usize>().unwrap()).sum();
    assert_eq!(total, cleaned(out).len());
    let report = read(out, "report.md");
    assert!(report.contains(&format!("| Total | | | {total} |")));
    assert!(report.contains("1686-03-04"), "misdated page not flagged");
}

#[test]
fn logodds_orientation() {
    let out = shared();
    let rows = csv_rows(out, "logodds.csv");
    let z = |w: &str| rows.iter().find(|r| &r[0] == w).map(|r| r[4].parse::<f64>().unwrap()).unwrap();
    // Fixture Union keyword passages lean on immigration, Confederate ones on sugar.
    assert!(z("treaty") > 1.96);
    assert!(z("sugar") < -1.96);
    let zs: Vec<f64> = rows.iter().map(|r| r[4].parse().unwrap()).collect();
    assert!(zs.windows(2).all(|w| w[0] >= w[1]));
}

#[test]
fn planted_reprints_form_clusters() {
    let out = shared();
    let clusters: serde_json::Value = serde_json::from_str(&read(out, "clusters.json")).unwrap();
    let sizes: Vec<u64> = clusters.as_array().unwrap().iter().map(|c| c["size"].as_u64().unwrap()).collect();
    assert_eq!(sizes, [6, 5, 4, 3]);
}

#[test]
fn rerun_of_one_stage_reproduces_it() {
    let out = scratch("pipeline-isolation");
    copy_tree(shared(), &out);
    let targets = ["logodds.csv", "logodds_summary.json", "report.md", "state_counts.csv"];
    for t in targets {
        fs::remove_file(out.join(t)).unwrap();
    }
    run_pipeline(&fixture_config(&out), &[Stage::Logodds, Stage::Report]).unwrap();
    for t in targets {
        assert_eq!(fs::read(out.join(t)).unwrap(), fs::read(shared().join(t)).unwrap(), "{t}");
    }
    // Running the report again over the same inputs changes nothing.
    run_pipeline(&fixture_config(&out), &[Stage::Report]).unwrap();
    assert_eq!(read(&out, "report.md"), read(shared(), "report.md"));
}

#[test]
fn stale_manifest_records_are_dropped() {
    let out = scratch("pipeline-stale");
    copy_tree(shared(), &out);
    fs::write(out.join("cleaned.jsonl"), read(&out, "cleaned.jsonl").lines().take(50).collect::<Vec<_>>().join("\n"))
        .unwrap();
    run_pipeline(&fixture_config(&out), &[Stage::Logodds]).unwrap();
    let manifest = Manifest::load(&out).unwrap();
    assert!(!manifest.stages.contains_key(&Stage::Normalize));
    assert!(manifest.stages.contains_key(&Stage::Logodds));
    assert!(manifest.stages.contains_key(&Stage::Fetch));
}

#[test]
fn missing_upstream_artifact() {
    let out = scratch("pipeline-missing");
    let err = run_pipeline(&fixture_config(&out), &[Stage::Logodds]).unwrap_err();
    match err {
        PipelineError::MissingUpstreamArtifact { stage, path } => {
            assert_eq!(stage, Stage::Logodds);
            assert!(path.ends_with("cleaned.jsonl"), "{}", path.display());
        }
        other => panic!("unexpected {other:?}"),
    }
}

#[test]
fn empty_corpus_fails_normalize() {
    let out = scratch("pipeline-empty");
    fs::write(out.join("snippets.jsonl"), "").unwrap();
    let err = run_pipeline(&fixture_config(&out), &[Stage::Normalize]).unwrap_err();
    assert!(
        matches!(
            err,
            PipelineError::StageFailure {
                stage: Stage::Normalize,
                source: StageError::Normalize(NormalizeError::EmptyCorpus)
            }
        ),
        "{err:?}"
    );
}

#[test]
fn invalid_config_is_rejected_before_any_stage() {
    let out = scratch("pipeline-invalid");
    let mut cfg = fixture_config(&out);
    cfg.reuse_n = 0;
    assert!(matches!(run_pipeline(&cfg, &Stage::ALL), Err(PipelineError::ConfigInvalid(_))));
    assert!(fs::read_dir(&out).unwrap().next().is_none());
}
