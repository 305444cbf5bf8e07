use serde::{Deserialize, Serialize};

use super::SubwordModel;
use crate::embed::cosine;
use crate::snippet::Snippet;

/// Vocabulary words most similar to the keyword, best first.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VariantSet {
    pub keyword: String,
    pub variants: Vec<(String, f64)>,
    pub k: usize,
}

impl VariantSet {
    pub fn contains(&self, word: &str) -> bool {
        self.variants.iter().any(|(w, _)| w == word)
    }
}

/// Top `k` vocabulary words by cosine to the keyword's vector, keyword
/// excluded, ties broken alphabetically. Words scoring below `floor` (when
/// given) are cut.
pub fn query_similar(model: &SubwordModel, keyword: &str, k: usize, floor: Option<f64>) -> VariantSet {
    let query = model.query_vector(keyword);
    let mut scored: Vec<(&str, f64)> = Vec::new();
    if k > 0 {
        for w in model.vocabulary.words() {
            if w == keyword {
                continue;
            }
            if let Ok(c) = cosine(&query, model.word_vector(w).unwrap()) {
                if floor.is_none_or(|f| c >= f) {
                    scored.push((w, c));
                }
            }
        }
    }
    scored.sort_by(|a, b| b.1.total_cmp(&a.1).then_with(|| a.0.cmp(b.0)));
    scored.truncate(k);
    VariantSet {
        keyword: keyword.to_string(),
        variants: scored.into_iter().map(|(w, c)| (w.to_string(), c)).collect(),
        k,
    }
}

/// Rewrites every token found in `set` to `keyword`. Returns the rewritten
/// snippets and the number of tokens changed.
pub fn merge_variants(snippets: &[Snippet], set: &VariantSet, keyword: &str) -> (Vec<Snippet>, usize) {
    assert_eq!(set.keyword, keyword, "variant set belongs to a different keyword");
    let variants: std::collections::HashSet<&str> = set.variants.iter().map(|(w, _)| w.as_str()).collect();
    let mut count = 0;
    let merged = snippets
        .iter()
        .map(|s| {
            let tokens = s
                .tokens
                .iter()
                .map(|t| {
                    if variants.contains(t.as_str()) {
                        count += 1;
                        keyword.to_string()
                    } else {
                        t.clone()
                    }
                })
                .collect();
            Snippet { tokens, ..s.clone() }
        })
        .collect();
    (merged, count)
}
