use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::hash::{fnv1a_64_from, splitmix64};

/// Seed mixed into every shingle hash.
pub const SHINGLE_SEED: u64 = 0x6e65_7773_6c65_6e73;

const FNV64_OFFSET: u64 = 0xcbf2_9ce4_8422_2325;
const TOKEN_SEPARATOR: u8 = 0x1f;

/// Hashes one window of tokens to 64 bits.
pub fn shingle_hash<S: AsRef<str>>(window: &[S]) -> u64 {
    let mut h = FNV64_OFFSET ^ SHINGLE_SEED;
    for (i, t) in window.iter().enumerate() {
        if i > 0 {
            h = fnv1a_64_from(h, &[TOKEN_SEPARATOR]);
        }
        h = fnv1a_64_from(h, t.as_ref().as_bytes());
    }
    splitmix64(h)
}

/// Distinct hashed `n`-token windows of one snippet, sorted.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ShingleSet {
    pub snippet_id: String,
    pub shingles: Vec<u64>,
}

pub fn shingles<S: AsRef<str>>(snippet_id: &str, tokens: &[S], n: usize) -> ShingleSet {
    assert!(n >= 1, "shingle length must be at least 1");
    let mut out: Vec<u64> = tokens.windows(n).map(shingle_hash).collect();
    out.sort_unstable();
    out.dedup();
    ShingleSet { snippet_id: snippet_id.to_string(), shingles: out }
}

/// Two snippets sharing at least the threshold number of shingles.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct ReprintEdge {
    pub snippet_a: String,
    pub snippet_b: String,
    pub shared: u32,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DetectOptions {
    pub threshold: u32,
    /// Shingles found in more snippets than this are ignored when pairing
    /// (boilerplate guard). `None` keeps every shingle.
    pub hot_shingle_cap: Option<usize>,
    pub workers: usize,
}

impl Default for DetectOptions {
    fn default() -> Self {
        Self { threshold: 4, hot_shingle_cap: None, workers: 1 }
    }
}

/// Pairs of snippets with at least `threshold` shingles in common, sorted by
/// `(snippet_a, snippet_b)` with `snippet_a < snippet_b`.
///
/// An inverted index from shingle to snippets is built in shards by hash;
/// each shard counts co-occurrences for its shingles and the per-shard counts
/// are summed, so the output does not depend on the worker count.
pub fn detect_reprints(sets: &[ShingleSet], options: &DetectOptions) -> Vec<ReprintEdge> {
    assert!(options.threshold >= 1, "threshold must be at least 1");
    let mut order: Vec<usize> = (0..sets.len()).collect();
    order.sort_by(|&a, &b| sets[a].snippet_id.cmp(&sets[b].snippet_id));
    let workers = options.workers.max(1);

    let count_shard = |shard: usize| -> HashMap<(u32, u32), u32> {
        let mut index: HashMap<u64, Vec<u32>> = HashMap::new();
        for (rank, &i) in order.iter().enumerate() {
            for &s in &sets[i].shingles {
                if (s % workers as u64) as usize == shard {
                    index.entry(s).or_default().push(rank as u32);
                }
            }
        }
        let mut pairs: HashMap<(u32, u32), u32> = HashMap::new();
        for postings in index.values() {
            if options.hot_shingle_cap.is_some_and(|cap| postings.len() > cap) {
                continue;
            }
            for (k, &a) in postings.iter().enumerate() {
                for &b in &postings[k + 1..] {
                    *pairs.entry((a, b)).or_default() += 1;
                }
            }
        }
        pairs
    };

    let shards: Vec<HashMap<(u32, u32), u32>> = if workers == 1 {
        vec![count_shard(0)]
    } else {
        std::thread::scope(|scope| {
            let handles: Vec<_> = (0..workers).map(|w| scope.spawn(move || count_shard(w))).collect();
            handles.into_iter().map(|h| h.join().expect("reuse worker panicked")).collect()
        })
    };

    let mut total: HashMap<(u32, u32), u32> = HashMap::new();
    for shard in shards {
        for (k, v) in shard {
            *total.entry(k).or_default() += v;
        }
    }
    let mut edges: Vec<ReprintEdge> = total
        .into_iter()
        .filter(|&(_, shared)| shared >= options.threshold)
        .filter_map(|((a, b), shared)| {
            let (a, b) = (&sets[order[a as usize]].snippet_id, &sets[order[b as usize]].snippet_id);
            (a != b).then(|| ReprintEdge { snippet_a: a.clone(), snippet_b: b.clone(), shared })
        })
        .collect();
    edges.sort();
    edges
}

#[cfg(test)]
mod tests {
    use super::*;

    fn toks(n: usize) -> Vec<String> {
        (0..n).map(|i| format!("t{i}")).collect()
    }

    #[test]
    fn shingle_counts() {
        assert!(shingles("a", &toks(4), 5).shingles.is_empty());
        assert_eq!(shingles("a", &toks(5), 5).shingles.len(), 1);
        assert_eq!(shingles("a", &toks(11), 5).shingles.len(), 7);
        let rep = ["x", "y", "x", "y", "x", "y", "x"];
        assert_eq!(shingles("a", &rep, 5).shingles.len(), 2);
    }

    #[test]
    fn separator_prevents_concatenation_collisions() {
        assert_ne!(shingle_hash(&["ab", "c"]), shingle_hash(&["a", "bc"]));
    }

    #[test]
    fn identical_snippets_at_threshold() {
        let sets = [shingles("b", &toks(8), 5), shingles("a", &toks(8), 5)];
        let edges = detect_reprints(&sets, &DetectOptions::default());
        assert_eq!(edges, [ReprintEdge { snippet_a: "a".into(), snippet_b: "b".into(), shared: 4 }]);
        let sets = [shingles("a", &toks(7), 5), shingles("b", &toks(7), 5)];
        assert!(detect_reprints(&sets, &DetectOptions::default()).is_empty());
    }

    #[test]
    fn hot_cap_skips_common_shingles() {
        let sets: Vec<_> = (0..3).map(|i| shingles(&format!("s{i}"), &toks(8), 5)).collect();
        let opts = DetectOptions { hot_shingle_cap: Some(2), ..Default::default() };
        assert!(detect_reprints(&sets, &opts).is_empty());
        assert_eq!(detect_reprints(&sets, &DetectOptions::default()).len(), 3);
    }
}
