//! Per-state keyword vectors and their pairwise cosine matrix.
//!
//! Two ways of obtaining comparable vectors are offered. In the shared space,
//! keyword occurrences are rewritten to a per-state token (`coolie@NY`)
//! before a single model is trained, so every state's keyword lives in the
//! same coordinates. Alternatively one model is trained per state; those
//! spaces are unrelated up to rotation, so they can optionally be aligned to
//! a reference state with orthogonal Procrustes over their shared words.

use std::collections::{BTreeMap, BTreeSet};

use log::warn;
use nalgebra::DMatrix;

use super::{cosine, train_embeddings, EmbedError, TrainParams, WordVectors};
use crate::geo;
use crate::snippet::Snippet;

pub const TAG_SEPARATOR: char = '@';

/// Token standing for `keyword` as used in `state`, e.g. `coolie@NY`.
pub fn state_tag(keyword: &str, state: &str) -> String {
    format!("{keyword}{TAG_SEPARATOR}{}", geo::state_code(state))
}

/// Snippet token lists with every occurrence of `keyword` replaced by its
/// state tag.
pub fn tag_keyword(snippets: &[Snippet], keyword: &str) -> Vec<Vec<String>> {
    snippets
        .iter()
        .map(|s| {
            let tag = state_tag(keyword, &s.state);
            s.tokens.iter().map(|t| if t == keyword { tag.clone() } else { t.clone() }).collect()
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct StateKeywordMatrix {
    pub states: Vec<String>,
    pub vectors: Vec<Vec<f32>>,
    pub similarity: Vec<Vec<f64>>,
}

impl StateKeywordMatrix {
    pub fn from_vectors(states: Vec<String>, vectors: Vec<Vec<f32>>) -> Result<Self, EmbedError> {
        assert_eq!(states.len(), vectors.len());
        if states.len() < 2 {
            return Err(EmbedError::TooFewStates { found: states.len() });
        }
        let n = states.len();
        let mut similarity = vec![vec![0.0; n]; n];
        for i in 0..n {
            for j in i..n {
                let c = cosine(&vectors[i], &vectors[j])?;
                similarity[i][j] = c;
                similarity[j][i] = c;
            }
        }
        Ok(Self { states, vectors, similarity })
    }

    /// Checks symmetry, unit diagonal (within 1e-6) and range.
    pub fn check(&self) -> Result<(), String> {
        let n = self.states.len();
        for i in 0..n {
            if (self.similarity[i][i] - 1.0).abs() > 1e-6 {
                return Err(format!("diagonal entry {} is {}", self.states[i], self.similarity[i][i]));
            }
            for j in 0..n {
                let v = self.similarity[i][j];
                if !(-1.0..=1.0).contains(&v) {
                    return Err(format!("entry ({i}, {j}) = {v} outside [-1, 1]"));
                }
                if v != self.similarity[j][i] {
                    return Err(format!("entry ({i}, {j}) is not symmetric"));
                }
            }
        }
        Ok(())
    }

    /// Mean similarity of each state to the others.
    pub fn mean_similarity(&self) -> Vec<f64> {
        let n = self.states.len();
        (0..n)
            .map(|i| (0..n).filter(|&j| j != i).map(|j| self.similarity[i][j]).sum::<f64>() / (n - 1) as f64)
            .collect()
    }

    /// `state,<names...>` header, then one row per state with four decimals.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("state");
        for s in &self.states {
            out.push(',');
            out.push_str(s);
        }
        out.push('\n');
        for (s, row) in self.states.iter().zip(&self.similarity) {
            out.push_str(s);
            for &v in row {
                out.push(',');
                out.push_str(&fixed(v, 4));
            }
            out.push('\n');
        }
        out
    }
}

/// Fixed-point formatting that never prints a negative zero.
pub(crate) fn fixed(v: f64, decimals: usize) -> String {
    let s = format!("{v:.decimals$}");
    if s.starts_with('-') && s[1..].chars().all(|c| c == '0' || c == '.') {
        s[1..].to_string()
    } else {
        s
    }
}

/// Reads each state's tagged keyword vector out of one shared space.
///
/// States whose tag did not survive the minimum count are dropped with a
/// warning and returned in the second element.
pub fn shared_space_matrix(
    vectors: &WordVectors,
    states: &[String],
    keyword: &str,
) -> Result<(StateKeywordMatrix, Vec<String>), EmbedError> {
    let states: BTreeSet<&String> = states.iter().collect();
    let (mut kept, mut vecs, mut dropped) = (Vec::new(), Vec::new(), Vec::new());
    for state in states {
        match vectors.get(&state_tag(keyword, state)) {
            Some(v) if v.iter().any(|&x| x != 0.0) => {
                kept.push(state.clone());
                vecs.push(v.to_vec());
            }
            _ => {
                warn!("dropping {state}: keyword tag below the minimum count");
                dropped.push(state.clone());
            }
        }
    }
    Ok((StateKeywordMatrix::from_vectors(kept, vecs)?, dropped))
}

/// Trains one model per state on that state's snippets.
///
/// States whose corpus yields no vocabulary are dropped with a warning.
pub fn train_per_state(
    snippets: &[Snippet],
    params: &TrainParams,
) -> Result<(BTreeMap<String, WordVectors>, Vec<String>), EmbedError> {
    params.validate()?;
    let mut by_state: BTreeMap<&str, Vec<&Vec<String>>> = BTreeMap::new();
    for s in snippets {
        by_state.entry(&s.state).or_default().push(&s.tokens);
    }
    let mut models = BTreeMap::new();
    let mut dropped = Vec::new();
    for (state, sentences) in by_state {
        let sentences: Vec<Vec<&str>> = sentences.iter().map(|t| t.iter().map(String::as_str).collect()).collect();
        let p = TrainParams { seed: crate::hash::substream_seed(params.seed, state), ..params.clone() };
        match train_embeddings(&sentences, &p) {
            Ok(space) => {
                models.insert(state.to_string(), space.word_vectors());
            }
            Err(EmbedError::EmptyVocabulary) => {
                warn!("dropping {state}: no word reaches the minimum count");
                dropped.push(state.to_string());
            }
            Err(e) => return Err(e),
        }
    }
    Ok((models, dropped))
}

/// Compares the keyword vector of independently trained per-state models.
///
/// With `align`, every space is rotated onto the reference space (the one
/// with the largest vocabulary, ties by name) before comparison.
pub fn replicate_matrix(
    models: &BTreeMap<String, WordVectors>,
    keyword: &str,
    align: bool,
) -> Result<(StateKeywordMatrix, Vec<String>), EmbedError> {
    let mut dropped = Vec::new();
    let present: Vec<(&String, &WordVectors)> = models
        .iter()
        .filter(|(state, m)| {
            let ok = m.get(keyword).is_some_and(|v| v.iter().any(|&x| x != 0.0));
            if !ok {
                warn!("dropping {state}: keyword below the minimum count");
                dropped.push((*state).clone());
            }
            ok
        })
        .collect();
    let reference = present.iter().max_by(|a, b| a.1.len().cmp(&b.1.len()).then_with(|| b.0.cmp(a.0))).map(|(_, m)| *m);

    let mut states = Vec::new();
    let mut vectors = Vec::new();
    for (state, model) in &present {
        let v = model.get(keyword).unwrap();
        let v = match (align, reference) {
            (true, Some(r)) if !std::ptr::eq(r, *model) => match procrustes(model, r, keyword) {
                Some(rot) => rotate(v, &rot),
                None => {
                    warn!("{state}: too few shared words to align, comparing unaligned");
                    v.to_vec()
                }
            },
            _ => v.to_vec(),
        };
        states.push((*state).clone());
        vectors.push(v);
    }
    Ok((StateKeywordMatrix::from_vectors(states, vectors)?, dropped))
}

/// Orthogonal `R` minimizing `‖B R − A‖` over words present in both spaces
/// (the keyword and tagged tokens excluded), where rows of `B` come from
/// `from` and rows of `A` from `onto`.
fn procrustes(from: &WordVectors, onto: &WordVectors, keyword: &str) -> Option<DMatrix<f64>> {
    if from.dim() != onto.dim() {
        return None;
    }
    let anchors: Vec<(&[f32], &[f32])> = from
        .iter()
        .filter(|(w, _)| *w != keyword && !w.contains(TAG_SEPARATOR))
        .filter_map(|(w, v)| onto.get(w).map(|u| (v, u)))
        .collect();
    if anchors.len() < 2 {
        return None;
    }
    let d = from.dim();
    let b = DMatrix::from_fn(anchors.len(), d, |i, j| f64::from(anchors[i].0[j]));
    let a = DMatrix::from_fn(anchors.len(), d, |i, j| f64::from(anchors[i].1[j]));
    let svd = (b.transpose() * a).svd(true, true);
    Some(svd.u? * svd.v_t?)
}

fn rotate(v: &[f32], rot: &DMatrix<f64>) -> Vec<f32> {
    let row = DMatrix::from_row_slice(1, v.len(), &v.iter().map(|&x| f64::from(x)).collect::<Vec<_>>());
    (row * rot).iter().map(|&x| x as f32).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tags_use_state_codes() {
        assert_eq!(state_tag("coolie", "New York"), "coolie@NY");
        assert_eq!(state_tag("coolie", "District of Columbia"), "coolie@DC");
    }

    #[test]
    fn matrix_contract_and_csv() {
        let m = StateKeywordMatrix::from_vectors(
            vec!["Alpha".into(), "Beta".into(), "Gamma".into()],
            vec![vec![1.0, 0.0], vec![0.0, 1.0], vec![-1.0, 1e-9]],
        )
        .unwrap();
        m.check().unwrap();
        assert_eq!(
            m.to_csv(),
            "state,Alpha,Beta,Gamma\nAlpha,1.0000,0.0000,-1.0000\nBeta,0.0000,1.0000,0.0000\nGamma,-1.0000,0.0000,1.0000\n"
        );
    }

    #[test]
    fn negative_zero_is_not_printed() {
        assert_eq!(fixed(-0.00001, 4), "0.0000");
        assert_eq!(fixed(-0.5, 1), "-0.5");
    }

    #[test]
    fn too_few_states() {
        let r = StateKeywordMatrix::from_vectors(vec!["A".into()], vec![vec![1.0]]);
        assert!(matches!(r, Err(EmbedError::TooFewStates { found: 1 })));
    }

    #[test]
    fn procrustes_recovers_rotation() {
        let words: Vec<String> = (0..6).map(|i| format!("w{i}")).collect();
        let base: Vec<f32> = vec![1.0, 0.2, 0.3, -1.0, 0.5, 0.5, -0.7, 0.1, 2.0, 1.0, 0.0, -0.4];
        let onto = WordVectors::new(words.clone(), 2, base.clone());
        // Rotate by 90 degrees: (x, y) -> (-y, x).
        let rotated: Vec<f32> = base.chunks(2).flat_map(|p| [-p[1], p[0]]).collect();
        let from = WordVectors::new(words, 2, rotated);
        let rot = procrustes(&from, &onto, "coolie").unwrap();
        let back = rotate(from.get("w3").unwrap(), &rot);
        let want = onto.get("w3").unwrap();
        for (a, b) in back.iter().zip(want) {
            assert!((a - b).abs() < 1e-5);
        }
    }

    #[test]
    fn replicate_alignment_undoes_rotation() {
        let words: Vec<String> = ["coolie", "a", "b", "c"].map(String::from).to_vec();
        let base: Vec<f32> = vec![0.6, 0.8, 1.0, 0.0, 0.0, 1.0, 0.7, -0.7];
        let rotated: Vec<f32> = base.chunks(2).flat_map(|p| [-p[1], p[0]]).collect();
        let mut models = BTreeMap::new();
        models.insert("Ohio".to_string(), WordVectors::new(words.clone(), 2, base));
        models.insert("Texas".to_string(), WordVectors::new(words, 2, rotated));
        let (raw, _) = replicate_matrix(&models, "coolie", false).unwrap();
        assert!(raw.similarity[0][1].abs() < 1e-6);
        let (aligned, _) = replicate_matrix(&models, "coolie", true).unwrap();
        assert!((aligned.similarity[0][1] - 1.0).abs() < 1e-5);
        aligned.check().unwrap();
    }
}
