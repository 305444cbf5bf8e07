use std::collections::HashSet;

use super::states::TAG_SEPARATOR;
use super::{cosine, EmbedError, WordVectors};

/// The `k` words closest to `query` by cosine, best first, ties broken
/// alphabetically.
///
/// State-tagged tokens (those containing `@`), words in `exclude` and words
/// with an all-zero vector are skipped.
pub fn nearest_neighbors(
    vectors: &WordVectors,
    query: &[f32],
    k: usize,
    exclude: &HashSet<&str>,
) -> Result<Vec<(String, f64)>, EmbedError> {
    if query.len() != vectors.dim() {
        return Err(EmbedError::DimensionMismatch { left: query.len(), right: vectors.dim() });
    }
    if query.iter().all(|&x| x == 0.0) {
        return Err(EmbedError::ZeroVector);
    }
    let mut scored: Vec<(&str, f64)> = Vec::new();
    for (word, v) in vectors.iter() {
        if word.contains(TAG_SEPARATOR) || exclude.contains(word) {
            continue;
        }
        match cosine(query, v) {
            Ok(c) => scored.push((word, c)),
            Err(EmbedError::ZeroVector) => continue,
            Err(e) => return Err(e),
        }
    }
    scored.sort_by(|a, b| b.1.total_cmp(&a.1).then_with(|| a.0.cmp(b.0)));
    scored.truncate(k);
    Ok(scored.into_iter().map(|(w, c)| (w.to_string(), c)).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn store() -> WordVectors {
        let words = ["a", "b", "c", "coolie", "coolie@NY", "z"].map(String::from).to_vec();
        #[rustfmt::skip]
        let data = vec![
            1.0, 0.0,
            0.0, 1.0,
            1.0, 1.0,
            1.0, 0.1,
            1.0, 0.0,
            0.0, 0.0,
        ];
        WordVectors::new(words, 2, data)
    }

    #[test]
    fn self_is_first() {
        let s = store();
        let n = nearest_neighbors(&s, s.get("b").unwrap(), 1, &HashSet::new()).unwrap();
        assert_eq!(n, vec![("b".to_string(), 1.0)]);
    }

    #[test]
    fn exclusions_and_k_overflow() {
        let s = store();
        let ex: HashSet<&str> = ["coolie"].into();
        let n = nearest_neighbors(&s, &[1.0, 0.0], 100, &ex).unwrap();
        let words: Vec<_> = n.iter().map(|(w, _)| w.as_str()).collect();
        assert_eq!(words, ["a", "c", "b"]);
    }

    #[test]
    fn ties_are_alphabetical() {
        let s = WordVectors::new(vec!["y".into(), "x".into()], 2, vec![2.0, 0.0, 1.0, 0.0]);
        let n = nearest_neighbors(&s, &[1.0, 0.0], 2, &HashSet::new()).unwrap();
        assert_eq!(n[0].0, "x");
    }

    #[test]
    fn bad_query() {
        let s = store();
        assert!(nearest_neighbors(&s, &[0.0, 0.0], 3, &HashSet::new()).is_err());
        assert!(nearest_neighbors(&s, &[1.0], 3, &HashSet::new()).is_err());
    }
}
