use std::collections::HashMap;
use std::io::{Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::train::{self, Components, Mode, Settings};
use super::EmbedError;

const MAGIC: &[u8; 4] = b"NLV1";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct TrainParams {
    pub mode: Mode,
    pub window: usize,
    pub min_count: u64,
    pub dim: usize,
    pub negatives: usize,
    pub epochs: usize,
    pub initial_lr: f32,
    pub min_lr: f32,
    /// Frequent-word subsampling threshold; 0 disables subsampling.
    pub subsample: f64,
    pub seed: u64,
    pub workers: usize,
}

impl Default for TrainParams {
    fn default() -> Self {
        Self {
            mode: Mode::Cbow,
            window: 5,
            min_count: 5,
            dim: 100,
            negatives: 5,
            epochs: 5,
            initial_lr: 0.025,
            min_lr: 1e-4,
            subsample: 1e-3,
            seed: 1,
            workers: 1,
        }
    }
}

impl TrainParams {
    pub fn validate(&self) -> Result<(), EmbedError> {
        let bad = |m: &str| Err(EmbedError::InvalidParams(m.to_string()));
        if self.window < 1 {
            return bad("window must be at least 1");
        }
        if self.min_count < 1 {
            return bad("min_count must be at least 1");
        }
        if self.dim < 2 {
            return bad("dim must be at least 2");
        }
        if self.negatives < 1 {
            return bad("negatives must be at least 1");
        }
        if self.epochs < 1 {
            return bad("epochs must be at least 1");
        }
        if self.workers < 1 {
            return bad("workers must be at least 1");
        }
        if !(self.initial_lr > 0.0 && self.min_lr >= 0.0 && self.min_lr <= self.initial_lr) {
            return bad("learning rates must satisfy 0 <= min_lr <= initial_lr, initial_lr > 0");
        }
        if !(self.subsample >= 0.0) {
            return bad("subsample must be non-negative");
        }
        Ok(())
    }

    pub(crate) fn settings(&self) -> Settings {
        Settings {
            mode: self.mode,
            dim: self.dim,
            window: self.window,
            negatives: self.negatives,
            epochs: self.epochs,
            initial_lr: self.initial_lr,
            min_lr: self.min_lr,
            subsample: self.subsample,
            seed: self.seed,
            workers: self.workers,
        }
    }
}

/// Words with their corpus counts, most frequent first, ties alphabetical.
#[derive(Debug, Clone, Default)]
pub struct Vocabulary {
    words: Vec<String>,
    counts: Vec<u64>,
    index: HashMap<String, u32>,
}

impl Vocabulary {
    pub fn build<S: AsRef<str>>(sentences: &[Vec<S>], min_count: u64) -> Self {
        let mut counts: HashMap<&str, u64> = HashMap::new();
        for s in sentences {
            for w in s {
                *counts.entry(w.as_ref()).or_default() += 1;
            }
        }
        let mut kept: Vec<(&str, u64)> = counts.into_iter().filter(|&(_, c)| c >= min_count).collect();
        kept.sort_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(b.0)));
        let words: Vec<String> = kept.iter().map(|(w, _)| w.to_string()).collect();
        let index = words.iter().enumerate().map(|(i, w)| (w.clone(), i as u32)).collect();
        Self { words, counts: kept.iter().map(|&(_, c)| c).collect(), index }
    }

    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }

    pub fn id(&self, word: &str) -> Option<u32> {
        self.index.get(word).copied()
    }

    pub fn word(&self, id: u32) -> &str {
        &self.words[id as usize]
    }

    pub fn count(&self, word: &str) -> Option<u64> {
        self.id(word).map(|i| self.counts[i as usize])
    }

    pub fn words(&self) -> &[String] {
        &self.words
    }

    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    /// Maps sentences to ids, dropping out-of-vocabulary tokens and
    /// sentences left empty.
    pub(crate) fn encode<S: AsRef<str>>(&self, sentences: &[Vec<S>]) -> Vec<Vec<u32>> {
        sentences
            .iter()
            .map(|s| s.iter().filter_map(|w| self.id(w.as_ref())).collect::<Vec<_>>())
            .filter(|s| !s.is_empty())
            .collect()
    }
}

/// A trained model: vocabulary plus input and output matrices.
#[derive(Debug, Clone)]
pub struct EmbeddingSpace {
    pub vocabulary: Vocabulary,
    pub dim: usize,
    pub input_vectors: Vec<f32>,
    pub output_vectors: Vec<f32>,
    /// Summed training loss per epoch.
    pub epoch_loss: Vec<f64>,
}

impl EmbeddingSpace {
    pub fn vector(&self, word: &str) -> Option<&[f32]> {
        let i = self.vocabulary.id(word)? as usize;
        Some(&self.input_vectors[i * self.dim..(i + 1) * self.dim])
    }

    pub fn word_vectors(&self) -> WordVectors {
        WordVectors::new(self.vocabulary.words().to_vec(), self.dim, self.input_vectors.clone())
    }
}

/// Trains a CBOW or skip-gram model on tokenized sentences.
///
/// Tokens below `min_count` are removed before windows are formed. With one
/// worker the result is bit-reproducible for a given seed.
pub fn train_embeddings<S: AsRef<str>>(
    sentences: &[Vec<S>],
    params: &TrainParams,
) -> Result<EmbeddingSpace, EmbedError> {
    params.validate()?;
    let vocabulary = Vocabulary::build(sentences, params.min_count);
    if vocabulary.is_empty() {
        return Err(EmbedError::EmptyVocabulary);
    }
    let encoded = vocabulary.encode(sentences);
    let comps = Components::identity(vocabulary.len());
    let input = train::init_input(vocabulary.len(), params.dim, params.seed);
    let trained = train::train(&encoded, vocabulary.counts(), &comps, input, &params.settings());
    Ok(EmbeddingSpace {
        vocabulary,
        dim: params.dim,
        input_vectors: trained.input,
        output_vectors: trained.output,
        epoch_loss: trained.epoch_loss,
    })
}

/// Words and their vectors, as stored in `vectors.bin`.
#[derive(Debug, Clone, PartialEq)]
pub struct WordVectors {
    words: Vec<String>,
    dim: usize,
    data: Vec<f32>,
    index: HashMap<String, usize>,
}

impl WordVectors {
    pub fn new(words: Vec<String>, dim: usize, data: Vec<f32>) -> Self {
        assert_eq!(words.len() * dim, data.len(), "vector data does not match vocabulary");
        let index = words.iter().enumerate().map(|(i, w)| (w.clone(), i)).collect();
        Self { words, dim, data, index }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }

    pub fn words(&self) -> &[String] {
        &self.words
    }

    pub fn get(&self, word: &str) -> Option<&[f32]> {
        self.index.get(word).map(|&i| self.row(i))
    }

    pub fn row(&self, i: usize) -> &[f32] {
        &self.data[i * self.dim..(i + 1) * self.dim]
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &[f32])> {
        self.words.iter().enumerate().map(|(i, w)| (w.as_str(), self.row(i)))
    }

    pub fn scaled(&self, factor: f32) -> Self {
        Self::new(self.words.clone(), self.dim, self.data.iter().map(|x| x * factor).collect())
    }

    pub fn write_to<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        w.write_all(MAGIC)?;
        w.write_all(&(self.dim as u32).to_le_bytes())?;
        w.write_all(&(self.words.len() as u32).to_le_bytes())?;
        for (word, v) in self.iter() {
            w.write_all(&(word.len() as u32).to_le_bytes())?;
            w.write_all(word.as_bytes())?;
            for x in v {
                w.write_all(&x.to_le_bytes())?;
            }
        }
        w.flush()
    }

    pub fn read_from<R: Read>(mut r: R) -> Result<Self, EmbedError> {
        let mut bytes = Vec::new();
        r.read_to_end(&mut bytes)?;
        let mut cur = Cursor { bytes: &bytes, pos: 0 };
        if cur.take(4)? != MAGIC {
            return Err(EmbedError::BadVectorFile("missing NLV1 header".into()));
        }
        let dim = cur.u32()? as usize;
        let n = cur.u32()? as usize;
        let mut words = Vec::with_capacity(n);
        let mut data = Vec::with_capacity(n.saturating_mul(dim).min(bytes.len() / 4));
        for _ in 0..n {
            let len = cur.u32()? as usize;
            let word = std::str::from_utf8(cur.take(len)?)
                .map_err(|_| EmbedError::BadVectorFile("token is not UTF-8".into()))?;
            words.push(word.to_string());
            for _ in 0..dim {
                data.push(f32::from_le_bytes(cur.take(4)?.try_into().unwrap()));
            }
        }
        if cur.pos != bytes.len() {
            return Err(EmbedError::BadVectorFile("trailing bytes".into()));
        }
        Ok(Self::new(words, dim, data))
    }

    pub fn save(&self, path: &Path) -> Result<(), EmbedError> {
        let f = std::fs::File::create(path)?;
        self.write_to(std::io::BufWriter::new(f))?;
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Self, EmbedError> {
        Self::read_from(std::fs::File::open(path)?)
    }
}

struct Cursor<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Cursor<'a> {
    fn take(&mut self, n: usize) -> Result<&'a [u8], EmbedError> {
        let end = self.pos.checked_add(n).filter(|&e| e <= self.bytes.len());
        let end = end.ok_or_else(|| EmbedError::BadVectorFile("truncated".into()))?;
        let s = &self.bytes[self.pos..end];
        self.pos = end;
        Ok(s)
    }

    fn u32(&mut self) -> Result<u32, EmbedError> {
        Ok(u32::from_le_bytes(self.take(4)?.try_into().unwrap()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sentences(text: &[&str]) -> Vec<Vec<String>> {
        text.iter().map(|s| s.split(' ').map(String::from).collect()).collect()
    }

    #[test]
    fn vocabulary_order_and_cutoff() {
        let v = Vocabulary::build(&sentences(&["b a a c", "b a c d"]), 2);
        assert_eq!(v.words(), ["a", "b", "c"]);
        assert_eq!(v.counts(), [3, 2, 2]);
        assert_eq!(v.count("d"), None);
        assert_eq!(v.encode(&sentences(&["d d", "d c"])), vec![vec![2]]);
    }

    #[test]
    fn rare_word_has_no_vector() {
        let mut corpus = sentences(&["x y z w"; 5]);
        corpus.push(vec!["rare".into(); 4]);
        let params = TrainParams { dim: 8, epochs: 1, ..Default::default() };
        let space = train_embeddings(&corpus, &params).unwrap();
        assert!(space.vector("rare").is_none());
        assert!(space.vector("x").is_some());
        assert_eq!(space.input_vectors.len(), space.output_vectors.len());
    }

    #[test]
    fn empty_vocabulary() {
        let corpus = sentences(&["a b c"]);
        assert!(matches!(train_embeddings(&corpus, &TrainParams::default()), Err(EmbedError::EmptyVocabulary)));
    }

    #[test]
    fn invalid_params() {
        let p = TrainParams { window: 0, ..Default::default() };
        assert!(matches!(p.validate(), Err(EmbedError::InvalidParams(_))));
        let p = TrainParams { dim: 1, ..Default::default() };
        assert!(p.validate().is_err());
    }

    #[test]
    fn vector_file_roundtrip() {
        let wv = WordVectors::new(vec!["a".into(), "größe".into()], 2, vec![1.0, -0.5, 0.25, 3.0]);
        let mut buf = Vec::new();
        wv.write_to(&mut buf).unwrap();
        assert_eq!(&buf[..4], b"NLV1");
        assert_eq!(&buf[4..12], &[2, 0, 0, 0, 2, 0, 0, 0]);
        assert_eq!(WordVectors::read_from(&buf[..]).unwrap(), wv);
        assert!(WordVectors::read_from(&buf[..buf.len() - 1]).is_err());
        assert!(WordVectors::read_from(&b"XXXX"[..]).is_err());
    }
}
