//! Log-odds ratio with an informative Dirichlet prior.
//!
//! For word `w`, corpora `i` and `j` with sizes `n` and word counts `y`, and
//! prior counts `a_w` summing to `a_0`:
//!
//! ```text
//! δ = ln((y_i + a_w) / (n_i + a_0 − y_i − a_w)) − ln((y_j + a_w) / (n_j + a_0 − y_j − a_w))
//! z = δ / sqrt(1/(y_i + a_w) + 1/(y_j + a_w))
//! ```
//!
//! Positive values mean the word is over-represented in `i`.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use super::StatsError;

/// Token counts of one corpus.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct GroupCounts {
    pub label: String,
    pub n: u64,
    pub y: BTreeMap<String, u64>,
}

impl GroupCounts {
    pub fn new(label: &str) -> Self {
        Self { label: label.to_string(), ..Self::default() }
    }

    pub fn from_documents<'a, D, S>(label: &str, docs: D) -> Self
    where
        D: IntoIterator<Item = &'a [S]>,
        S: AsRef<str> + 'a,
    {
        let mut c = Self::new(label);
        for d in docs {
            for t in d {
                c.add(t.as_ref(), 1);
            }
        }
        c
    }

    pub fn add(&mut self, word: &str, count: u64) {
        if count > 0 {
            *self.y.entry(word.to_string()).or_default() += count;
            self.n += count;
        }
    }

    pub fn get(&self, word: &str) -> u64 {
        self.y.get(word).copied().unwrap_or(0)
    }
}

/// Dirichlet prior pseudo-counts.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct PriorCounts {
    pub a0: f64,
    pub aw: BTreeMap<String, f64>,
}

impl PriorCounts {
    /// Prior from the pooled counts of `groups`, scaled by `strength`.
    /// `a0` is the sum of the `aw` values, accumulated in word order.
    pub fn pooled(groups: &[&GroupCounts], strength: f64) -> Result<Self, StatsError> {
        if !(strength > 0.0 && strength.is_finite()) {
            return Err(StatsError::InvalidPrior(format!("strength {strength} must be positive")));
        }
        let mut pooled: BTreeMap<String, u64> = BTreeMap::new();
        for g in groups {
            for (w, &c) in &g.y {
                *pooled.entry(w.clone()).or_default() += c;
            }
        }
        let aw: BTreeMap<String, f64> = pooled.into_iter().map(|(w, c)| (w, c as f64 * strength)).collect();
        let a0 = aw.values().sum();
        Ok(Self { a0, aw })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LogOddsRow {
    pub word: String,
    pub count_i: u64,
    pub count_j: u64,
    pub delta: f64,
    pub z: f64,
    pub freq_ratio: f64,
}

/// Words ranked by pooled frequency, ties alphabetical, cut at `top_m`.
pub fn top_words(counts_i: &GroupCounts, counts_j: &GroupCounts, top_m: usize) -> Vec<String> {
    let words: BTreeSet<&String> = counts_i.y.keys().chain(counts_j.y.keys()).collect();
    let mut ranked: Vec<(&String, u64)> = words.into_iter().map(|w| (w, counts_i.get(w) + counts_j.get(w))).collect();
    ranked.sort_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(b.0)));
    ranked.into_iter().take(top_m).map(|(w, _)| w.clone()).collect()
}

fn log_odds(y: f64, n: f64, aw: f64, a0: f64) -> f64 {
    ((y + aw) / (n + a0 - y - aw)).ln()
}

/// Scores the `top_m` most frequent words; rows sorted by `z` descending,
/// ties alphabetical.
pub fn compute_log_odds(
    counts_i: &GroupCounts,
    counts_j: &GroupCounts,
    prior: &PriorCounts,
    top_m: usize,
) -> Result<Vec<LogOddsRow>, StatsError> {
    for c in [counts_i, counts_j] {
        if c.n == 0 {
            return Err(StatsError::DegenerateCorpus(format!("corpus {:?} has no tokens", c.label)));
        }
    }
    let (ni, nj) = (counts_i.n as f64, counts_j.n as f64);
    let total = ni + nj;
    let a0 = prior.a0;
    let mut rows = Vec::new();
    for word in top_words(counts_i, counts_j, top_m) {
        let aw = match prior.aw.get(&word) {
            Some(&a) if a > 0.0 => a,
            _ => return Err(StatsError::MissingPrior(word)),
        };
        let (ci, cj) = (counts_i.get(&word), counts_j.get(&word));
        let (yi, yj) = (ci as f64, cj as f64);
        let delta = log_odds(yi, ni, aw, a0) - log_odds(yj, nj, aw, a0);
        let z = delta / (1.0 / (yi + aw) + 1.0 / (yj + aw)).sqrt();
        if !delta.is_finite() || !z.is_finite() {
            return Err(StatsError::DegenerateCorpus(format!("word {word:?} has no complement mass in one corpus")));
        }
        rows.push(LogOddsRow { freq_ratio: (yi + yj) / total, word, count_i: ci, count_j: cj, delta, z });
    }
    rows.sort_by(|a, b| b.z.total_cmp(&a.z).then_with(|| a.word.cmp(&b.word)));
    Ok(rows)
}
