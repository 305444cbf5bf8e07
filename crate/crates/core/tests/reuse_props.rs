use std::collections::HashMap;

use newslens::reuse::{
    average_clustering, build_state_network, detect_reprints, shingles, DetectOptions, ReprintEdge, StateNetwork,
};
use proptest::prelude::*;

/// Snippets over a tiny vocabulary, so shared shingles are common.
fn corpus() -> impl Strategy<Value = Vec<Vec<String>>> {
    let doc = prop::collection::vec(prop::sample::select(vec!["a", "b", "c", "d"]).prop_map(String::from), 0..25);
    prop::collection::vec(doc, 0..30)
}

fn detect(docs: &[Vec<String>], order: &[usize], n: usize, threshold: u32, workers: usize) -> Vec<ReprintEdge> {
    let sets: Vec<_> = order.iter().map(|&i| shingles(&format!("s{i:02}"), &docs[i], n)).collect();
    detect_reprints(&sets, &DetectOptions { threshold, hot_shingle_cap: None, workers })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn edges_ignore_order_and_workers(docs in corpus(), n in 1usize..6, threshold in 1u32..6,
                                      workers in 2usize..6, seed in any::<u64>()) {
        let order: Vec<usize> = (0..docs.len()).collect();
        let mut shuffled = order.clone();
        // Deterministic permutation from the seed.
        shuffled.sort_by_key(|&i| (i as u64 + 1).wrapping_mul(seed | 1).rotate_left(17));
        let base = detect(&docs, &order, n, threshold, 1);
        prop_assert_eq!(&detect(&docs, &shuffled, n, threshold, 1), &base);
        prop_assert_eq!(&detect(&docs, &order, n, threshold, workers), &base);
        for e in &base {
            prop_assert!(e.snippet_a < e.snippet_b && e.shared >= threshold);
        }
        prop_assert!(base.windows(2).all(|w| (&w[0].snippet_a, &w[0].snippet_b) < (&w[1].snippet_a, &w[1].snippet_b)));
    }

    #[test]
    fn network_accounts_for_every_edge(docs in corpus(), states in prop::collection::vec(0usize..4, 30)) {
        let names = ["Ohio", "Texas", "Maine", "Hawaii"];
        let order: Vec<usize> = (0..docs.len()).collect();
        let edges = detect(&docs, &order, 3, 2, 1);
        let state_of: HashMap<String, String> =
            (0..docs.len()).map(|i| (format!("s{i:02}"), names[states[i]].to_string())).collect();
        let net = build_state_network(&edges, &state_of).unwrap();
        let intra: u64 = net.intra_state.values().sum();
        prop_assert_eq!(net.total_weight() + intra, edges.len() as u64);
        for weighted in [false, true] {
            let c = average_clustering(&net, weighted);
            prop_assert!((0.0..=1.0).contains(&c), "{}", c);
        }
    }

    #[test]
    fn clustering_is_a_fraction(edges in prop::collection::vec((0u8..12, 0u8..12, 1u64..50), 0..60)) {
        let edges: Vec<(String, String, u64)> =
            edges.into_iter().map(|(a, b, w)| (format!("n{a}"), format!("n{b}"), w)).collect();
        let net = StateNetwork::from_parts(&[] as &[String], &edges);
        for weighted in [false, true] {
            let c = average_clustering(&net, weighted);
            prop_assert!((0.0..=1.0 + 1e-12).contains(&c), "{}", c);
        }
        prop_assert!(average_clustering(&net, true) <= average_clustering(&net, false) + 1e-12);
    }
}

#[test]
fn split_word_pair_is_not_an_edge() {
    // The overlap straddles an OCR split ("injure" / "jure"), so no 5-gram matches.
    let a: Vec<&str> = "demolish part build injure two".split(' ').collect();
    let b: Vec<&str> = "jure two latter case lead".split(' ').collect();
    let sets = [shingles("a", &a, 5), shingles("b", &b, 5)];
    assert!(sets[0].shingles.iter().all(|s| !sets[1].shingles.contains(s)));
    assert!(detect_reprints(&sets, &DetectOptions { threshold: 1, ..Default::default() }).is_empty());
}
