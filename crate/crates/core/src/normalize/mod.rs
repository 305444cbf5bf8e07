//! Token cleaning, lemmatization and discovery of OCR misspellings of the
//! keyword with a character n-gram embedding model.

mod clean;
mod subword;
mod variants;

pub use clean::{parse_stopwords, CleanConfig, Lemmatizer, SuffixRule};
pub use subword::{char_ngrams, train_subword_model, SubwordModel, SubwordParams};
pub use variants::{merge_variants, query_similar, VariantSet};

use crate::snippet::Snippet;

#[derive(Debug, thiserror::Error)]
pub enum NormalizeError {
    #[error("invalid lemma rules: {0}")]
    BadRules(String),
    #[error("invalid stopword list: {0}")]
    BadStopwords(String),
    #[error("cannot read resource: {0}")]
    Io(String),
    #[error("corpus is empty")]
    EmptyCorpus,
    #[error("invalid subword parameters: {0}")]
    InvalidParams(String),
}

/// Cleans a snippet's tokens, keeping `keyword_index` pointing at the
/// cleaned form of the original match. Returns `None` if that token does not
/// survive cleaning.
pub fn clean_snippet(config: &CleanConfig, snippet: &Snippet) -> Option<Snippet> {
    let mut tokens = Vec::with_capacity(snippet.tokens.len());
    let mut keyword_index = None;
    for (i, t) in snippet.tokens.iter().enumerate() {
        if let Some(c) = config.clean_token(t) {
            if i == snippet.keyword_index {
                keyword_index = Some(tokens.len());
            }
            tokens.push(c);
        }
    }
    Some(Snippet { keyword_index: keyword_index?, tokens, ..snippet.clone() })
}

#[cfg(test)]
mod tests {
    use super::*;
    use chrono::NaiveDate;

    #[test]
    fn keyword_index_follows_cleaning() {
        let s = Snippet {
            snippet_id: "x_m0".into(),
            lccn: "x".into(),
            issue_date: NaiveDate::from_ymd_opt(1870, 1, 1).unwrap(),
            state: "Ohio".into(),
            keyword_index: 3,
            tokens: ["the", "1870", "chinese", "coolie", "was"].map(String::from).to_vec(),
        };
        let cfg = CleanConfig::bundled();
        let c = clean_snippet(&cfg, &s).unwrap();
        assert_eq!(c.tokens, ["chinese", "coolie"]);
        assert_eq!(c.keyword_index, 1);
        let gone = Snippet { keyword_index: 0, ..s };
        assert!(clean_snippet(&cfg, &gone).is_none());
    }
}
