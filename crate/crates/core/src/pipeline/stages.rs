use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};
use std::fs;
use std::path::PathBuf;
use std::time::Duration;

use serde::{Deserialize, Serialize};

use super::artifacts::{self as art, StageIo};
use super::{report, Halt, PipelineConfig, Stage, StageError, Tagging};
use crate::embed::fixed;
use crate::embed::{
    nearest_neighbors, replicate_matrix, shared_space_matrix, state_tag, tag_keyword, train_embeddings,
    train_per_state, Mode, StateKeywordMatrix, TrainParams, WordVectors,
};
use crate::ingest::{
    ChroniclingAmerica, FixtureTransport, HttpTransport, IngestError, PageCache, PageHit, Transport, FIXTURE_DIR_ENV,
};
use crate::normalize::{
    clean_snippet, merge_variants, query_similar, train_subword_model, CleanConfig, NormalizeError, SubwordParams,
};
use crate::reuse::{
    average_clustering, build_state_network, detect_reprints, reprint_clusters, shingles, DetectOptions,
    ReprintCluster, ReprintEdge,
};
use crate::snippet::{extract_snippets, Snippet};
use crate::stats::{compute_log_odds, partition_by_group, GroupCounts, GroupingPolicy, PriorCounts};

pub(super) fn run(stage: Stage, cfg: &PipelineConfig, clean: &CleanConfig, io: &mut StageIo) -> Result<(), Halt> {
    match stage {
        Stage::Fetch => fetch(cfg, io),
        Stage::Extract => extract(cfg, io),
        Stage::Normalize => normalize(cfg, clean, io),
        Stage::TrainEmbed => train_embed(cfg, io),
        Stage::CompareStates => compare_states(cfg, io),
        Stage::Logodds => logodds(cfg, io),
        Stage::DetectReuse => detect_reuse(cfg, io),
        Stage::Network => network(io),
        Stage::Report => report::export(cfg, io),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub(crate) struct SearchSummary {
    pub keyword: String,
    pub total_items: u64,
    pub hits_returned: usize,
    pub pages_fetched: usize,
    pub missing_pages: Vec<String>,
}

fn fixture_dir(cfg: &PipelineConfig) -> Option<PathBuf> {
    cfg.paths.fixtures.clone().or_else(|| std::env::var_os(FIXTURE_DIR_ENV).map(PathBuf::from))
}

fn fetch(cfg: &PipelineConfig, io: &mut StageIo) -> Result<(), Halt> {
    let fixtures = fixture_dir(cfg);
    let transport: Box<dyn Transport> = match &fixtures {
        Some(dir) => Box::new(FixtureTransport::new(dir, cfg.base_url.as_str())),
        None => Box::new(HttpTransport::new(Duration::from_secs(60))),
    };
    let mut client =
        ChroniclingAmerica::new(transport, cfg.base_url.as_str()).with_cache(PageCache::new(cfg.cache_dir()));
    if fixtures.is_none() && cfg.rate_limit > 0.0 {
        client = client.with_rate_limit(cfg.rate_limit);
    }
    let (total, hits) = client.search_all(&cfg.keyword, cfg.rows_per_page, cfg.max_pages)?;
    let hits_returned = hits.len();
    let mut seen = HashSet::new();
    let mut pages = Vec::new();
    let mut missing = Vec::new();
    for hit in hits {
        if !seen.insert(hit.page_id()) {
            continue;
        }
        hit.validate()?;
        match client.fetch_page_text(&hit) {
            Ok(_) => pages.push(hit),
            Err(IngestError::NotFound(url)) => {
                log::warn!("skipping {}: OCR text not found at {url}", hit.page_id());
                missing.push(hit.page_id());
            }
            Err(e) => return Err(e.into()),
        }
    }
    log::info!("fetched {} pages ({} requests)", pages.len(), client.requests_made());
    let summary = SearchSummary {
        keyword: cfg.keyword.clone(),
        total_items: total,
        hits_returned,
        pages_fetched: pages.len(),
        missing_pages: missing,
    };
    io.write_jsonl(art::PAGES, &pages)?;
    io.write_json(art::SEARCH, &summary)
}

fn extract(cfg: &PipelineConfig, io: &mut StageIo) -> Result<(), Halt> {
    let pages: Vec<PageHit> = io.read_jsonl(art::PAGES)?;
    let cache = PageCache::new(cfg.cache_dir());
    let mut snippets = Vec::new();
    for hit in &pages {
        let text = cache.get(hit)?.ok_or_else(|| Halt::Missing(cache.text_path(hit)))?;
        snippets.extend(extract_snippets(hit, &text, &cfg.keyword, cfg.radius));
    }
    snippets.sort_by(|a, b| a.snippet_id.cmp(&b.snippet_id));
    log::info!("{} snippets from {} pages", snippets.len(), pages.len());
    io.write_jsonl(art::SNIPPETS, &snippets)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub(crate) struct NormalizeSummary {
    pub keyword: String,
    pub snippets_in: usize,
    pub snippets_out: usize,
    pub subword_vocabulary: usize,
    pub variants: usize,
    pub tokens_replaced: usize,
}

fn normalize(cfg: &PipelineConfig, clean: &CleanConfig, io: &mut StageIo) -> Result<(), Halt> {
    let snippets: Vec<Snippet> = io.read_jsonl(art::SNIPPETS)?;
    let cleaned: Vec<Snippet> = snippets.iter().filter_map(|s| clean_snippet(clean, s)).collect();
    if cleaned.is_empty() {
        return Err(NormalizeError::EmptyCorpus.into());
    }
    let sentences: Vec<Vec<&str>> = cleaned.iter().map(|s| s.tokens.iter().map(String::as_str).collect()).collect();
    let sw = &cfg.subword;
    let params = SubwordParams {
        ngram_min: sw.ngram_min,
        ngram_max: sw.ngram_max,
        dim: sw.dim,
        epochs: sw.epochs,
        seed: cfg.stream_seed("subword"),
        buckets: sw.buckets,
        min_count: sw.min_count,
        window: sw.window,
        negatives: sw.negatives,
        initial_lr: cfg.initial_lr,
        subsample: cfg.subsample,
        workers: cfg.workers,
    };
    let model = train_subword_model(&sentences, &params)?;
    let set = query_similar(&model, &cfg.keyword, cfg.variant_k, cfg.variant_min_similarity);
    let (merged, replaced) = merge_variants(&cleaned, &set, &cfg.keyword);
    log::info!("{} variants merged into {:?}, {replaced} tokens rewritten", set.variants.len(), cfg.keyword);

    let rows: Vec<Vec<String>> =
        set.variants.iter().enumerate().map(|(i, (w, c))| vec![(i + 1).to_string(), w.clone(), fixed(*c, 6)]).collect();
    let summary = NormalizeSummary {
        keyword: cfg.keyword.clone(),
        snippets_in: snippets.len(),
        snippets_out: merged.len(),
        subword_vocabulary: model.vocabulary.len(),
        variants: set.variants.len(),
        tokens_replaced: replaced,
    };
    io.write_jsonl(art::CLEANED, &merged)?;
    io.write_csv(art::VARIANTS, &["rank", "word", "similarity"], &rows)?;
    io.write_json(art::NORMALIZE_SUMMARY, &summary)
}

fn embed_params(cfg: &PipelineConfig, mode: Mode) -> TrainParams {
    let defaults = TrainParams::default();
    TrainParams {
        mode,
        window: cfg.window,
        min_count: cfg.min_count,
        dim: cfg.dim,
        negatives: cfg.negatives,
        epochs: cfg.epochs,
        initial_lr: cfg.initial_lr,
        min_lr: defaults.min_lr.min(cfg.initial_lr),
        subsample: cfg.subsample,
        seed: cfg.stream_seed(&format!("embed-{}", mode.name())),
        workers: cfg.workers,
    }
}

fn vectors_bytes(v: &WordVectors) -> Result<Vec<u8>, Halt> {
    let mut buf = Vec::new();
    v.write_to(&mut buf)?;
    Ok(buf)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
struct StateModelsIndex {
    states: Vec<String>,
    dropped: Vec<String>,
}

fn remove_if_present(path: &std::path::Path) -> Result<(), Halt> {
    if path.is_dir() {
        fs::remove_dir_all(path)?;
    } else if path.exists() {
        fs::remove_file(path)?;
    }
    Ok(())
}

fn train_embed(cfg: &PipelineConfig, io: &mut StageIo) -> Result<(), Halt> {
    let cleaned: Vec<Snippet> = io.read_jsonl(art::CLEANED)?;
    for mode in cfg.mode.modes() {
        let dir = io.root().join(art::embed_dir(mode));
        remove_if_present(&dir.join("vectors.bin"))?;
        remove_if_present(&dir.join("states"))?;
        let params = embed_params(cfg, mode);
        match cfg.tagging {
            Tagging::Shared => {
                let sentences = tag_keyword(&cleaned, &cfg.keyword);
                let space = train_embeddings(&sentences, &params)?;
                log::info!(
                    "{}: {} words, final epoch loss {:?}",
                    mode.name(),
                    space.vocabulary.len(),
                    space.epoch_loss.last()
                );
                io.write_bytes(&art::vectors_file(mode), &vectors_bytes(&space.word_vectors())?)?;
            }
            Tagging::Replicate => {
                let (models, dropped) = train_per_state(&cleaned, &params)?;
                for (state, model) in &models {
                    io.write_bytes(&art::state_model_file(mode, state), &vectors_bytes(model)?)?;
                }
                let index = StateModelsIndex { states: models.keys().cloned().collect(), dropped };
                io.write_json(&art::state_models_index(mode), &index)?;
            }
        }
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub(crate) struct StatesSummary {
    pub mode: Mode,
    pub tagging: Tagging,
    pub states: Vec<String>,
    pub dropped: Vec<String>,
    pub mean_similarity: BTreeMap<String, f64>,
    pub most_similar: Option<StatePair>,
    pub least_similar: Option<StatePair>,
}

fn extremes(m: &StateKeywordMatrix) -> (Option<StatePair>, Option<StatePair>) {
    let mut pairs = Vec::new();
    for i in 0..m.states.len() {
        for j in i + 1..m.states.len() {
            pairs.push((m.similarity[i][j], i, j));
        }
    }
    let named = |&(s, i, j): &(f64, usize, usize)| (m.states[i].clone(), m.states[j].clone(), s);
    let max = pairs.iter().max_by(|a, b| a.0.total_cmp(&b.0).then((b.1, b.2).cmp(&(a.1, a.2)))).map(named);
    let min = pairs.iter().min_by(|a, b| a.0.total_cmp(&b.0).then((a.1, a.2).cmp(&(b.1, b.2)))).map(named);
    (max, min)
}

fn neighbor_rows(found: Vec<(String, f64)>) -> Vec<Vec<String>> {
    found.into_iter().enumerate().map(|(i, (w, c))| vec![(i + 1).to_string(), w, fixed(c, 4)]).collect()
}

fn compare_states(cfg: &PipelineConfig, io: &mut StageIo) -> Result<(), Halt> {
    let cleaned: Vec<Snippet> = io.read_jsonl(art::CLEANED)?;
    let states: Vec<String> = cleaned.iter().map(|s| s.state.clone()).collect::<BTreeSet<_>>().into_iter().collect();
    for mode in cfg.mode.modes() {
        let mut neighbors: Vec<(String, Vec<Vec<String>>)> = Vec::new();
        let (matrix, dropped) = match cfg.tagging {
            Tagging::Shared => {
                let path = io.input(&art::vectors_file(mode))?;
                let vectors = WordVectors::load(&path)?;
                let (matrix, dropped) = shared_space_matrix(&vectors, &states, &cfg.keyword)?;
                for state in &matrix.states {
                    let query = vectors.get(&state_tag(&cfg.keyword, state)).expect("kept states have a vector");
                    let found = nearest_neighbors(&vectors, query, cfg.neighbors_k, &HashSet::new())?;
                    neighbors.push((state.clone(), neighbor_rows(found)));
                }
                (matrix, dropped)
            }
            Tagging::Replicate => {
                let index: StateModelsIndex = io.read_json(&art::state_models_index(mode))?;
                let mut models = BTreeMap::new();
                for state in &index.states {
                    let path = io.input(&art::state_model_file(mode, state))?;
                    models.insert(state.clone(), WordVectors::load(&path)?);
                }
                let (matrix, mut dropped) = replicate_matrix(&models, &cfg.keyword, cfg.align)?;
                let exclude: HashSet<&str> = [cfg.keyword.as_str()].into();
                for state in &matrix.states {
                    let model = &models[state];
                    let query = model.get(&cfg.keyword).expect("kept states have a vector");
                    let found = nearest_neighbors(model, query, cfg.neighbors_k, &exclude)?;
                    neighbors.push((state.clone(), neighbor_rows(found)));
                }
                dropped.extend(index.dropped);
                dropped.sort();
                (matrix, dropped)
            }
        };
        matrix.check().map_err(StageError::Contract)?;

        let dir = io.root().join(art::embed_dir(mode));
        if dir.is_dir() {
            for entry in fs::read_dir(&dir)? {
                let path = entry?.path();
                let name = path.file_name().and_then(|n| n.to_str()).unwrap_or("");
                if name.starts_with("neighbors_") && name.ends_with(".csv") {
                    fs::remove_file(&path)?;
                }
            }
        }
        let (most, least) = extremes(&matrix);
        let summary = StatesSummary {
            mode,
            tagging: cfg.tagging,
            states: matrix.states.clone(),
            dropped,
            mean_similarity: matrix.states.iter().cloned().zip(matrix.mean_similarity()).collect(),
            most_similar: most,
            least_similar: least,
        };
        io.write_bytes(&art::similarity_file(mode), matrix.to_csv().as_bytes())?;
        io.write_json(&art::states_summary_file(mode), &summary)?;
        for (state, rows) in &neighbors {
            io.write_csv(&art::neighbors_file(mode, state), &["rank", "word", "cosine"], rows)?;
        }
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub(crate) struct GroupSummary {
    pub snippets: usize,
    pub tokens: u64,
    pub states: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub(crate) struct LogoddsSummary {
    pub grouping_mode: crate::stats::GroupingMode,
    /// Positive z means the word leans toward this group.
    pub positive_group: String,
    pub confederate: GroupSummary,
    pub union: GroupSummary,
    pub excluded_snippets: usize,
    pub unknown_states: Vec<String>,
    pub words_scored: usize,
    pub prior_strength: f64,
}

fn group_summary(snippets: &[&Snippet], counts: &GroupCounts) -> GroupSummary {
    GroupSummary {
        snippets: snippets.len(),
        tokens: counts.n,
        states: snippets.iter().map(|s| s.state.clone()).collect::<BTreeSet<_>>().into_iter().collect(),
    }
}

fn logodds(cfg: &PipelineConfig, io: &mut StageIo) -> Result<(), Halt> {
    let cleaned: Vec<Snippet> = io.read_jsonl(art::CLEANED)?;
    let policy = GroupingPolicy::standard(cfg.grouping_mode);
    let part = partition_by_group(&cleaned, &policy);
    let confederate = GroupCounts::from_documents("confederate", part.confederate.iter().map(|s| s.tokens.as_slice()));
    let union = GroupCounts::from_documents("union", part.union.iter().map(|s| s.tokens.as_slice()));
    let prior = PriorCounts::pooled(&[&union, &confederate], cfg.prior_strength)?;
    let rows = compute_log_odds(&union, &confederate, &prior, cfg.top_m)?;

    let csv_rows: Vec<Vec<String>> = rows
        .iter()
        .map(|r| {
            vec![
                r.word.clone(),
                r.count_j.to_string(),
                r.count_i.to_string(),
                fixed(r.delta, 6),
                fixed(r.z, 4),
                fixed(r.freq_ratio, 8),
            ]
        })
        .collect();
    let summary = LogoddsSummary {
        grouping_mode: cfg.grouping_mode,
        positive_group: "union".into(),
        confederate: group_summary(&part.confederate, &confederate),
        union: group_summary(&part.union, &union),
        excluded_snippets: part.excluded.len(),
        unknown_states: part.unknown_states.iter().cloned().collect(),
        words_scored: rows.len(),
        prior_strength: cfg.prior_strength,
    };
    io.write_csv(art::LOGODDS, &["word", "count_confederate", "count_union", "delta", "z", "freq_ratio"], &csv_rows)?;
    io.write_json(art::LOGODDS_SUMMARY, &summary)
}

fn detect_reuse(cfg: &PipelineConfig, io: &mut StageIo) -> Result<(), Halt> {
    let cleaned: Vec<Snippet> = io.read_jsonl(art::CLEANED)?;
    let sets: Vec<_> = cleaned.iter().map(|s| shingles(&s.snippet_id, &s.tokens, cfg.reuse_n)).collect();
    let options =
        DetectOptions { threshold: cfg.reuse_threshold, hot_shingle_cap: cfg.hot_shingle_cap, workers: cfg.workers };
    let edges = detect_reprints(&sets, &options);
    let dates: HashMap<String, chrono::NaiveDate> =
        cleaned.iter().map(|s| (s.snippet_id.clone(), s.issue_date)).collect();
    let clusters = reprint_clusters(&edges, &dates)?;
    log::info!("{} reprint edges in {} clusters", edges.len(), clusters.len());
    let rows: Vec<Vec<String>> =
        edges.iter().map(|e| vec![e.snippet_a.clone(), e.snippet_b.clone(), e.shared.to_string()]).collect();
    io.write_csv(art::REPRINT_EDGES, &["snippet_a", "snippet_b", "shared"], &rows)?;
    io.write_json(art::CLUSTERS, &clusters)
}

pub(crate) fn read_edges(io: &mut StageIo) -> Result<Vec<ReprintEdge>, Halt> {
    let mut edges = Vec::new();
    for row in io.read_csv(art::REPRINT_EDGES)? {
        let field =
            |k: &str| row.get(k).cloned().ok_or_else(|| Halt::format(format!("{}: no {k} column", art::REPRINT_EDGES)));
        let shared = field("shared")?.parse().map_err(|e| Halt::format(format!("{}: {e}", art::REPRINT_EDGES)))?;
        edges.push(ReprintEdge { snippet_a: field("snippet_a")?, snippet_b: field("snippet_b")?, shared });
    }
    Ok(edges)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub(crate) struct NetworkSummary {
    pub nodes: usize,
    pub edges: usize,
    pub total_weight: u64,
    pub intra_state: BTreeMap<String, u64>,
    pub clustering_unweighted: f64,
    pub clustering_weighted: f64,
}

fn coord(v: Option<f64>) -> String {
    v.map(|x| fixed(x, 4)).unwrap_or_default()
}

fn network(io: &mut StageIo) -> Result<(), Halt> {
    let edges = read_edges(io)?;
    let cleaned: Vec<Snippet> = io.read_jsonl(art::CLEANED)?;
    let states: HashMap<String, String> = cleaned.into_iter().map(|s| (s.snippet_id, s.state)).collect();
    let net = build_state_network(&edges, &states)?;
    let pos: HashMap<&str, (Option<f64>, Option<f64>)> =
        net.nodes.iter().map(|n| (n.state.as_str(), (n.lat, n.lon))).collect();
    let rows: Vec<Vec<String>> = net
        .edges
        .iter()
        .map(|e| {
            let (a, b) = (pos[e.state_a.as_str()], pos[e.state_b.as_str()]);
            vec![
                e.state_a.clone(),
                e.state_b.clone(),
                e.weight.to_string(),
                coord(a.0),
                coord(a.1),
                coord(b.0),
                coord(b.1),
            ]
        })
        .collect();
    let summary = NetworkSummary {
        nodes: net.nodes.len(),
        edges: net.edges.len(),
        total_weight: net.total_weight(),
        intra_state: net.intra_state.clone(),
        clustering_unweighted: average_clustering(&net, false),
        clustering_weighted: average_clustering(&net, true),
    };
    io.write_csv(art::STATE_NETWORK, &["state_a", "state_b", "weight", "lat_a", "lon_a", "lat_b", "lon_b"], &rows)?;
    io.write_json(art::NETWORK_SUMMARY, &summary)
}

pub(crate) type Clusters = Vec<ReprintCluster>;

/// Two states and their keyword cosine.
pub(crate) type StatePair = (String, String, f64);
