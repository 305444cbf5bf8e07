use std::collections::BTreeMap;
use std::fmt::Write as _;

use chrono::NaiveDate;

use super::artifacts::{self as art, StageIo};
use super::stages::{Clusters, LogoddsSummary, NetworkSummary, NormalizeSummary, StatePair, StatesSummary};
use super::{Halt, PipelineConfig};
use crate::embed::fixed;
use crate::geo;
use crate::snippet::Snippet;
use crate::stats::{Group, GroupingPolicy};

const TOP_Z: usize = 20;
const TOP_VARIANTS: usize = 10;
const TOP_CLUSTERS: usize = 10;

fn group_label(g: Group) -> &'static str {
    match g {
        Group::Confederate => "confederate",
        Group::Union => "union",
        Group::Excluded => "excluded",
        Group::Unknown => "unlisted",
    }
}

fn field<'a>(row: &'a BTreeMap<String, String>, key: &str) -> Result<&'a str, Halt> {
    row.get(key).map(String::as_str).ok_or_else(|| Halt::format(format!("missing column {key}")))
}

/// Writes `state_counts.csv` and `report.md` from the analysis artifacts.
/// The output depends only on those files and the config.
pub(super) fn export(cfg: &PipelineConfig, io: &mut StageIo) -> Result<(), Halt> {
    let cleaned: Vec<Snippet> = io.read_jsonl(art::CLEANED)?;
    let normalize: NormalizeSummary = io.read_json(art::NORMALIZE_SUMMARY)?;
    let variants = io.read_csv(art::VARIANTS)?;
    let mut modes = Vec::new();
    for mode in cfg.mode.modes() {
        modes.push(io.read_json::<StatesSummary>(&art::states_summary_file(mode))?);
    }
    let logodds = io.read_csv(art::LOGODDS)?;
    let logodds_summary: LogoddsSummary = io.read_json(art::LOGODDS_SUMMARY)?;
    let clusters: Clusters = io.read_json(art::CLUSTERS)?;
    let network: NetworkSummary = io.read_json(art::NETWORK_SUMMARY)?;

    let policy = GroupingPolicy::standard(cfg.grouping_mode);
    let mut per_state: BTreeMap<&str, usize> = BTreeMap::new();
    for s in &cleaned {
        *per_state.entry(s.state.as_str()).or_default() += 1;
    }
    let mut counts: Vec<(&str, usize)> = per_state.into_iter().collect();
    counts.sort_by(|a, b| b.1.cmp(&a.1).then(a.0.cmp(b.0)));
    let count_rows: Vec<Vec<String>> = counts
        .iter()
        .map(|&(state, n)| {
            vec![
                state.to_string(),
                geo::state_code(state),
                group_label(policy.classify(state)).to_string(),
                n.to_string(),
            ]
        })
        .collect();

    let mut md = String::new();
    let w = &mut md;
    let total = cleaned.len();
    let _ = writeln!(w, "# Keyword report: {}\n", cfg.keyword);

    let _ = writeln!(w, "## Snippets by state\n");
    let _ = writeln!(w, "{total} snippets from {} states.\n", counts.len());
    let _ = writeln!(w, "| State | Code | Group | Snippets |\n|---|---|---|---:|");
    for r in &count_rows {
        let _ = writeln!(w, "| {} | {} | {} | {} |", r[0], r[1], r[2], r[3]);
    }
    let _ = writeln!(w, "| Total | | | {total} |\n");

    let _ = writeln!(w, "## Spelling variants\n");
    let _ = writeln!(
        w,
        "Variants merged into `{}`: {}. Tokens rewritten: {}.\n",
        cfg.keyword, normalize.variants, normalize.tokens_replaced
    );
    if !variants.is_empty() {
        let _ = writeln!(w, "| Rank | Word | Similarity |\n|---:|---|---:|");
        for row in variants.iter().take(TOP_VARIANTS) {
            let _ =
                writeln!(w, "| {} | {} | {} |", field(row, "rank")?, field(row, "word")?, field(row, "similarity")?);
        }
        let _ = writeln!(w);
    }

    for m in &modes {
        let _ = writeln!(w, "## State similarity ({})\n", m.mode.name());
        let _ = writeln!(w, "{} states compared.", m.states.len());
        if !m.dropped.is_empty() {
            let _ = writeln!(w, "Dropped below the minimum count: {}.", m.dropped.join(", "));
        }
        let pair = |p: &Option<StatePair>| {
            p.as_ref().map_or("n/a".to_string(), |(a, b, s)| format!("{a} / {b} ({})", fixed(*s, 4)))
        };
        let _ = writeln!(w, "Most similar pair: {}.", pair(&m.most_similar));
        let _ = writeln!(w, "Least similar pair: {}.\n", pair(&m.least_similar));
        let mut means: Vec<(&String, &f64)> = m.mean_similarity.iter().collect();
        means.sort_by(|a, b| b.1.total_cmp(a.1).then(a.0.cmp(b.0)));
        let _ = writeln!(w, "| State | Mean similarity |\n|---|---:|");
        for (s, v) in means {
            let _ = writeln!(w, "| {s} | {} |", fixed(*v, 4));
        }
        let _ = writeln!(w);
    }

    let _ = writeln!(w, "## Word association\n");
    let _ = writeln!(
        w,
        "{} words scored; positive z leans {}. Confederate: {} snippets, {} tokens. Union: {} snippets, {} tokens. Excluded: {} snippets.\n",
        logodds_summary.words_scored,
        logodds_summary.positive_group,
        logodds_summary.confederate.snippets,
        logodds_summary.confederate.tokens,
        logodds_summary.union.snippets,
        logodds_summary.union.tokens,
        logodds_summary.excluded_snippets,
    );
    let z_table = |w: &mut String, title: &str, rows: &[&BTreeMap<String, String>]| -> Result<(), Halt> {
        let _ = writeln!(w, "### {title}\n\n| Word | Confederate | Union | z |\n|---|---:|---:|---:|");
        for r in rows {
            let _ = writeln!(
                w,
                "| {} | {} | {} | {} |",
                field(r, "word")?,
                field(r, "count_confederate")?,
                field(r, "count_union")?,
                field(r, "z")?
            );
        }
        let _ = writeln!(w);
        Ok(())
    };
    let top: Vec<_> = logodds.iter().take(TOP_Z).collect();
    let bottom: Vec<_> = logodds.iter().rev().take(TOP_Z).collect();
    z_table(w, "Highest z", &top)?;
    z_table(w, "Lowest z", &bottom)?;

    let state_of: BTreeMap<&str, &str> = cleaned.iter().map(|s| (s.snippet_id.as_str(), s.state.as_str())).collect();
    let _ = writeln!(w, "## Reprint clusters\n");
    let _ = writeln!(w, "{} clusters.\n", clusters.len());
    if !clusters.is_empty() {
        let _ = writeln!(w, "| Cluster | Size | Earliest | States |\n|---:|---:|---|---:|");
        for c in clusters.iter().take(TOP_CLUSTERS) {
            let states: std::collections::BTreeSet<&str> =
                c.snippet_ids.iter().filter_map(|id| state_of.get(id.as_str()).copied()).collect();
            let _ = writeln!(w, "| {} | {} | {} | {} |", c.cluster_id, c.size, c.earliest_date, states.len());
        }
        let _ = writeln!(w);
    }

    let _ = writeln!(w, "## Reprint network\n");
    let _ =
        writeln!(w, "{} states, {} state pairs, total weight {}.", network.nodes, network.edges, network.total_weight);
    let intra: u64 = network.intra_state.values().sum();
    let _ = writeln!(w, "Same-state reprint edges: {intra}.");
    let _ = writeln!(
        w,
        "Average clustering: unweighted {}, weighted {}.\n",
        fixed(network.clustering_unweighted, 4),
        fixed(network.clustering_weighted, 4)
    );

    let earliest = NaiveDate::from_ymd_opt(1690, 1, 1).expect("valid date");
    let latest = cfg.run_date.unwrap_or_else(|| chrono::Local::now().date_naive());
    let mut flagged: Vec<&Snippet> =
        cleaned.iter().filter(|s| s.issue_date < earliest || s.issue_date > latest).collect();
    flagged.sort_by(|a, b| a.snippet_id.cmp(&b.snippet_id));
    let _ = writeln!(w, "## Flagged dates\n");
    if flagged.is_empty() {
        let _ = writeln!(w, "No issue dates before 1690 or after the run date.");
    } else {
        let _ = writeln!(w, "Kept in every analysis, listed here for review:\n");
        for s in flagged {
            let _ = writeln!(w, "- {} ({})", s.snippet_id, s.issue_date);
        }
    }

    io.write_csv(art::STATE_COUNTS, &["state", "code", "group", "snippets"], &count_rows)?;
    io.write_bytes(art::REPORT, md.as_bytes())
}
