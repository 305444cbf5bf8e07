//! Exact-match keyword filtering and pseudo-sentence extraction.
//!
//! OCR text rarely keeps reliable punctuation, so instead of sentences we cut
//! a fixed window of tokens around each keyword hit.

use chrono::NaiveDate;
use serde::{Deserialize, Serialize};

use crate::ingest::PageHit;

pub const DEFAULT_RADIUS: usize = 10;

/// A window of tokens around one keyword match, with page provenance.
///
/// Field order is the `snippets.jsonl` record layout.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Snippet {
    pub snippet_id: String,
    pub lccn: String,
    pub issue_date: NaiveDate,
    pub state: String,
    pub keyword_index: usize,
    pub tokens: Vec<String>,
}

/// Whitespace tokenization with surrounding punctuation stripped and case
/// folded. Tokens that are pure punctuation disappear.
pub fn tokenize(text: &str) -> Vec<String> {
    text.split_whitespace().filter_map(normalize_token).collect()
}

fn normalize_token(raw: &str) -> Option<String> {
    let t = raw.trim_matches(|c: char| !c.is_alphanumeric());
    (!t.is_empty()).then(|| t.to_lowercase())
}

/// Token span `[start, end)` of one match and the keyword's offset inside it.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Window {
    pub start: usize,
    pub end: usize,
    pub keyword_index: usize,
}

/// Every position where `keyword` occurs, with up to `radius` tokens on each
/// side, truncated at the ends of the token list.
pub fn keyword_windows(tokens: &[String], keyword: &str, radius: usize) -> Vec<Window> {
    tokens
        .iter()
        .enumerate()
        .filter(|(_, t)| t.as_str() == keyword)
        .map(|(i, _)| {
            let start = i.saturating_sub(radius);
            let end = (i + radius + 1).min(tokens.len());
            Window { start, end, keyword_index: i - start }
        })
        .collect()
}

/// `<lccn>_<date>_ed<e>_seq<n>_m<k>`, with `k` the 0-based match ordinal.
pub fn snippet_id(hit: &PageHit, ordinal: usize) -> String {
    format!("{}_{}_ed{}_seq{}_m{}", hit.lccn, hit.issue_date.format("%Y-%m-%d"), hit.edition, hit.page_seq, ordinal)
}

/// One snippet per exact keyword match in `ocr_text`.
///
/// `keyword` must already be lowercase; matching is case-insensitive and
/// ignores punctuation around each token, so `"Coolie,"` matches `coolie`
/// while `cooli` does not.
pub fn extract_snippets(hit: &PageHit, ocr_text: &str, keyword: &str, radius: usize) -> Vec<Snippet> {
    assert!(radius >= 1, "radius must be at least 1");
    let tokens = tokenize(ocr_text);
    keyword_windows(&tokens, keyword, radius)
        .into_iter()
        .enumerate()
        .map(|(k, w)| Snippet {
            snippet_id: snippet_id(hit, k),
            lccn: hit.lccn.clone(),
            issue_date: hit.issue_date,
            state: hit.state.clone(),
            keyword_index: w.keyword_index,
            tokens: tokens[w.start..w.end].to_vec(),
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn hit() -> PageHit {
        PageHit {
            lccn: "sn83030213".into(),
            issue_date: NaiveDate::from_ymd_opt(1862, 8, 5).unwrap(),
            edition: 1,
            page_seq: 4,
            state: "New York".into(),
            title: "t".into(),
            ocr_url: String::new(),
        }
    }

    fn numbered(n: usize, hits: &[usize]) -> String {
        (0..n)
            .map(|i| if hits.contains(&i) { "coolie".to_string() } else { format!("w{i}") })
            .collect::<Vec<_>>()
            .join(" ")
    }

    #[test]
    fn short_document_is_one_snippet() {
        let s = extract_snippets(&hit(), "a b coolie c d", "coolie", 10);
        assert_eq!(s.len(), 1);
        assert_eq!(s[0].tokens, ["a", "b", "coolie", "c", "d"]);
        assert_eq!(s[0].keyword_index, 2);
        assert_eq!(s[0].snippet_id, "sn83030213_1862-08-05_ed1_seq4_m0");
    }

    #[test]
    fn window_arithmetic() {
        let text = numbered(25, &[12]);
        let s = extract_snippets(&hit(), &text, "coolie", 10);
        assert_eq!(s.len(), 1);
        let expected: Vec<String> = tokenize(&text)[2..=22].to_vec();
        assert_eq!(s[0].tokens, expected);
        assert_eq!(s[0].tokens.len(), 21);
        assert_eq!(s[0].keyword_index, 10);
    }

    #[test]
    fn two_matches_at_edges() {
        // Inclusive slices [0, 10] and [20, 39]: the second window is cut by
        // the end of the 40-token text.
        let s = extract_snippets(&hit(), &numbered(40, &[0, 30]), "coolie", 10);
        let lens: Vec<_> = s.iter().map(|x| x.tokens.len()).collect();
        assert_eq!(lens, [11, 20]);
        assert_eq!(s[0].keyword_index, 0);
        assert_eq!(s[1].snippet_id, "sn83030213_1862-08-05_ed1_seq4_m1");
    }

    #[test]
    fn near_miss_does_not_match() {
        assert!(extract_snippets(&hit(), "cooli", "coolie", 10).is_empty());
        assert!(extract_snippets(&hit(), "the cooli trade coolies", "coolie", 10).is_empty());
        assert!(extract_snippets(&hit(), "", "coolie", 10).is_empty());
    }

    #[test]
    fn punctuation_and_case_are_ignored() {
        let s = extract_snippets(&hit(), "The COOLIE, trade -- (Coolie)", "coolie", 10);
        assert_eq!(s.len(), 2);
        assert_eq!(s[0].tokens, ["the", "coolie", "trade", "coolie"]);
    }

    #[test]
    fn adjacent_matches_each_get_a_snippet() {
        let s = extract_snippets(&hit(), "coolie coolie", "coolie", 1);
        assert_eq!(s.len(), 2);
        assert_eq!(s[0].keyword_index, 0);
        assert_eq!(s[1].keyword_index, 1);
    }

    #[test]
    fn jsonl_field_order() {
        let s = &extract_snippets(&hit(), "a coolie", "coolie", 10)[0];
        let line = serde_json::to_string(s).unwrap();
        assert_eq!(
            line,
            r#"{"snippet_id":"sn83030213_1862-08-05_ed1_seq4_m0","lccn":"sn83030213","issue_date":"1862-08-05","state":"New York","keyword_index":1,"tokens":["a","coolie"]}"#
        );
    }
}
