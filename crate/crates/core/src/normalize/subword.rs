//! Skip-gram embeddings where a word is the sum of its own vector and the
//! vectors of its hashed character n-grams, so misspellings that share most
//! n-grams with a word end up close to it.

use serde::{Deserialize, Serialize};

use super::NormalizeError;
use crate::embed::train::{self, Components, Mode, Settings};
use crate::embed::Vocabulary;
use crate::hash::fnv1a_32;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SubwordParams {
    pub ngram_min: usize,
    pub ngram_max: usize,
    pub dim: usize,
    pub epochs: usize,
    pub seed: u64,
    pub buckets: u32,
    pub min_count: u64,
    pub window: usize,
    pub negatives: usize,
    pub initial_lr: f32,
    pub subsample: f64,
    pub workers: usize,
}

impl Default for SubwordParams {
    fn default() -> Self {
        Self {
            ngram_min: 3,
            ngram_max: 6,
            dim: 100,
            epochs: 5,
            seed: 1,
            buckets: 1 << 21,
            min_count: 1,
            window: 5,
            negatives: 5,
            initial_lr: 0.025,
            subsample: 1e-3,
            workers: 1,
        }
    }
}

impl SubwordParams {
    pub fn validate(&self) -> Result<(), NormalizeError> {
        let bad = |m: &str| Err(NormalizeError::InvalidParams(m.to_string()));
        if self.ngram_min < 1 || self.ngram_max < self.ngram_min {
            return bad("need 1 <= ngram_min <= ngram_max");
        }
        if self.dim < 8 {
            return bad("dim must be at least 8");
        }
        if self.epochs < 1 || self.window < 1 || self.negatives < 1 || self.workers < 1 {
            return bad("epochs, window, negatives and workers must be positive");
        }
        if self.buckets < 1 || self.min_count < 1 {
            return bad("buckets and min_count must be positive");
        }
        if !(self.initial_lr > 0.0) || !(self.subsample >= 0.0) {
            return bad("initial_lr must be positive and subsample non-negative");
        }
        Ok(())
    }
}

/// Character n-grams of `<word>` with lengths `min..=max`, ordered by start
/// position then length. The bracketed word itself is not included.
pub fn char_ngrams(word: &str, min: usize, max: usize) -> Vec<String> {
    let chars: Vec<char> = format!("<{word}>").chars().collect();
    let mut out = Vec::new();
    for start in 0..chars.len() {
        for n in min..=max {
            if start + n > chars.len() || (start == 0 && n == chars.len()) {
                break;
            }
            out.push(chars[start..start + n].iter().collect());
        }
    }
    out
}

#[derive(Debug, Clone)]
pub struct SubwordModel {
    pub ngram_min: usize,
    pub ngram_max: usize,
    pub dim: usize,
    pub buckets: u32,
    pub vocabulary: Vocabulary,
    /// Bucket ids that occur in the vocabulary, sorted; row `i` of the n-gram
    /// block belongs to `bucket_ids[i]`.
    bucket_ids: Vec<u32>,
    /// Whole-word rows followed by n-gram rows.
    input: Vec<f32>,
    word_vectors: Vec<f32>,
}

impl SubwordModel {
    fn bucket(&self, ngram: &str) -> u32 {
        fnv1a_32(ngram.as_bytes()) % self.buckets
    }

    fn ngram_row(&self, ngram: &str) -> Option<usize> {
        let b = self.bucket(ngram);
        self.bucket_ids.binary_search(&b).ok().map(|i| self.vocabulary.len() + i)
    }

    fn row(&self, r: usize) -> &[f32] {
        &self.input[r * self.dim..(r + 1) * self.dim]
    }

    /// Vector stored for an n-gram's bucket, if the bucket was seen.
    pub fn ngram_vector(&self, ngram: &str) -> Option<&[f32]> {
        self.ngram_row(ngram).map(|r| self.row(r))
    }

    /// The stored vector of a vocabulary word.
    pub fn word_vector(&self, word: &str) -> Option<&[f32]> {
        let i = self.vocabulary.id(word)? as usize;
        Some(&self.word_vectors[i * self.dim..(i + 1) * self.dim])
    }

    /// Recomputes a word's vector from its parts: the whole-word row (for
    /// vocabulary words) plus every known n-gram row, summed in that order.
    /// Out-of-vocabulary words get the sum of their known n-grams.
    pub fn compose(&self, word: &str) -> Vec<f32> {
        let mut v = match self.vocabulary.id(word) {
            Some(i) => self.row(i as usize).to_vec(),
            None => vec![0.0; self.dim],
        };
        for g in char_ngrams(word, self.ngram_min, self.ngram_max) {
            if let Some(r) = self.ngram_row(&g) {
                for (a, &b) in v.iter_mut().zip(self.row(r)) {
                    *a += b;
                }
            }
        }
        v
    }

    /// Stored vector for vocabulary words, composed vector otherwise.
    pub fn query_vector(&self, word: &str) -> Vec<f32> {
        match self.word_vector(word) {
            Some(v) => v.to_vec(),
            None => self.compose(word),
        }
    }
}

/// Trains the subword model on tokenized sentences with the skip-gram
/// objective. Single-worker runs are reproducible for a given seed.
pub fn train_subword_model<S: AsRef<str>>(
    sentences: &[Vec<S>],
    params: &SubwordParams,
) -> Result<SubwordModel, NormalizeError> {
    params.validate()?;
    let vocabulary = Vocabulary::build(sentences, params.min_count);
    if vocabulary.is_empty() {
        return Err(NormalizeError::EmptyCorpus);
    }
    let bucket_of = |g: &str| fnv1a_32(g.as_bytes()) % params.buckets;
    let word_grams: Vec<Vec<u32>> = vocabulary
        .words()
        .iter()
        .map(|w| char_ngrams(w, params.ngram_min, params.ngram_max).iter().map(|g| bucket_of(g)).collect())
        .collect();
    let mut bucket_ids: Vec<u32> = word_grams.iter().flatten().copied().collect();
    bucket_ids.sort_unstable();
    bucket_ids.dedup();

    let nv = vocabulary.len();
    let lists: Vec<Vec<u32>> = word_grams
        .iter()
        .enumerate()
        .map(|(w, grams)| {
            let mut rows = vec![w as u32];
            rows.extend(grams.iter().map(|b| (nv + bucket_ids.binary_search(b).unwrap()) as u32));
            rows
        })
        .collect();
    let comps = Components::from_lists(&lists);

    let dim = params.dim;
    let settings = Settings {
        mode: Mode::Skipgram,
        dim,
        window: params.window,
        negatives: params.negatives,
        epochs: params.epochs,
        initial_lr: params.initial_lr,
        min_lr: 1e-4f32.min(params.initial_lr),
        subsample: params.subsample,
        seed: params.seed,
        workers: params.workers,
    };
    let encoded = vocabulary.encode(sentences);
    let input = train::init_input(nv + bucket_ids.len(), dim, params.seed);
    let trained = train::train(&encoded, vocabulary.counts(), &comps, input, &settings);

    let mut model = SubwordModel {
        ngram_min: params.ngram_min,
        ngram_max: params.ngram_max,
        dim,
        buckets: params.buckets,
        vocabulary,
        bucket_ids,
        input: trained.input,
        word_vectors: Vec::new(),
    };
    let word_vectors: Vec<f32> = model.vocabulary.words().iter().flat_map(|w| model.compose(w)).collect();
    model.word_vectors = word_vectors;
    Ok(model)
}
