//! Training engine for negative-sampling embeddings.
//!
//! A word's input representation is the sum of one or more input rows (its
//! "components"). Plain word2vec has one component per word; the subword
//! model adds one row per hashed character n-gram. Both use this engine.

use std::cell::RefCell;
use std::sync::atomic::{AtomicU32, AtomicU64, Ordering};

use num_traits::Float;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::sgns::ns_update;
use crate::hash::substream_seed;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Cbow,
    Skipgram,
}

impl Mode {
    pub fn name(self) -> &'static str {
        match self {
            Mode::Cbow => "cbow",
            Mode::Skipgram => "skipgram",
        }
    }
}

/// Input rows making up each word, stored flat.
#[derive(Debug, Clone)]
pub(crate) struct Components {
    offsets: Vec<usize>,
    rows: Vec<u32>,
}

impl Components {
    /// One row per word, row `i` for word `i`.
    pub(crate) fn identity(words: usize) -> Self {
        Self { offsets: (0..=words).collect(), rows: (0..words as u32).collect() }
    }

    pub(crate) fn from_lists(lists: &[Vec<u32>]) -> Self {
        let mut offsets = Vec::with_capacity(lists.len() + 1);
        let mut rows = Vec::new();
        offsets.push(0);
        for l in lists {
            rows.extend_from_slice(l);
            offsets.push(rows.len());
        }
        Self { offsets, rows }
    }

    pub(crate) fn of(&self, word: u32) -> &[u32] {
        let w = word as usize;
        &self.rows[self.offsets[w]..self.offsets[w + 1]]
    }
}

/// Row-addressable parameter storage.
pub(crate) trait Rows<F> {
    fn read_row(&self, row: u32, out: &mut [F]);
    fn add_row(&self, row: u32, delta: &[F]);
}

/// f32 matrix whose cells are atomics, so several workers can update it
/// without locks. Relaxed loads and stores compile to plain moves; concurrent
/// updates may overwrite each other, which is the usual lock-free SGD trade.
pub(crate) struct SharedMatrix {
    dim: usize,
    cells: Vec<AtomicU32>,
}

impl SharedMatrix {
    pub(crate) fn from_vec(data: Vec<f32>, dim: usize) -> Self {
        Self { dim, cells: data.into_iter().map(|x| AtomicU32::new(x.to_bits())).collect() }
    }

    pub(crate) fn into_vec(self) -> Vec<f32> {
        self.cells.into_iter().map(|c| f32::from_bits(c.into_inner())).collect()
    }
}

impl Rows<f32> for SharedMatrix {
    fn read_row(&self, row: u32, out: &mut [f32]) {
        let base = row as usize * self.dim;
        for (o, c) in out.iter_mut().zip(&self.cells[base..base + self.dim]) {
            *o = f32::from_bits(c.load(Ordering::Relaxed));
        }
    }

    fn add_row(&self, row: u32, delta: &[f32]) {
        let base = row as usize * self.dim;
        for (c, d) in self.cells[base..base + self.dim].iter().zip(delta) {
            let v = f32::from_bits(c.load(Ordering::Relaxed)) + d;
            c.store(v.to_bits(), Ordering::Relaxed);
        }
    }
}

/// Single-threaded dense storage, used by the gradient check.
pub(crate) struct DenseRows<F> {
    pub(crate) dim: usize,
    pub(crate) data: RefCell<Vec<F>>,
}

impl<F: Float> Rows<F> for DenseRows<F> {
    fn read_row(&self, row: u32, out: &mut [F]) {
        let base = row as usize * self.dim;
        out.copy_from_slice(&self.data.borrow()[base..base + self.dim]);
    }

    fn add_row(&self, row: u32, delta: &[F]) {
        let base = row as usize * self.dim;
        let mut data = self.data.borrow_mut();
        for (c, &d) in data[base..base + self.dim].iter_mut().zip(delta) {
            *c = *c + d;
        }
    }
}

/// Reusable buffers for one worker.
pub(crate) struct Scratch<F> {
    hidden: Vec<F>,
    step: Vec<F>,
    row: Vec<F>,
    outputs: Vec<F>,
    before: Vec<F>,
    labels: Vec<bool>,
    targets: Vec<u32>,
}

impl<F: Float> Scratch<F> {
    pub(crate) fn new(dim: usize) -> Self {
        Self {
            hidden: vec![F::zero(); dim],
            step: vec![F::zero(); dim],
            row: vec![F::zero(); dim],
            outputs: Vec::new(),
            before: Vec::new(),
            labels: Vec::new(),
            targets: Vec::new(),
        }
    }
}

/// Adds the composed input vector of `word` (sum of its rows) into `out`.
fn accumulate_word<F: Float, R: Rows<F>>(input: &R, comps: &Components, word: u32, row: &mut [F], out: &mut [F]) {
    for &r in comps.of(word) {
        input.read_row(r, row);
        for (o, &x) in out.iter_mut().zip(row.iter()) {
            *o = *o + x;
        }
    }
}

/// Applies a hidden-vector step to every row of `word`. The composed vector
/// is a plain sum, so each row's gradient equals the hidden gradient.
fn distribute<F: Float, R: Rows<F>>(input: &R, comps: &Components, word: u32, step: &[F], scale: F, row: &mut [F]) {
    for (o, &x) in row.iter_mut().zip(step) {
        *o = x * scale;
    }
    for &r in comps.of(word) {
        input.add_row(r, row);
    }
}

/// Gathers target output rows, runs the kernel, scatters the row deltas back.
fn score_targets<F: Float, R: Rows<F>>(output: &R, s: &mut Scratch<F>, lr: F) -> F {
    let dim = s.hidden.len();
    let n = s.targets.len();
    s.outputs.resize(n * dim, F::zero());
    for (k, &t) in s.targets.iter().enumerate() {
        output.read_row(t, &mut s.outputs[k * dim..(k + 1) * dim]);
    }
    s.before.clear();
    s.before.extend_from_slice(&s.outputs);
    for x in s.step.iter_mut() {
        *x = F::zero();
    }
    let loss = ns_update(&s.hidden, &mut s.outputs, &s.labels, lr, &mut s.step);
    for (k, &t) in s.targets.iter().enumerate() {
        let span = k * dim..(k + 1) * dim;
        for ((d, &new), &old) in s.row.iter_mut().zip(&s.outputs[span.clone()]).zip(&s.before[span]) {
            *d = new - old;
        }
        output.add_row(t, &s.row);
    }
    loss
}

fn set_targets<F>(s: &mut Scratch<F>, positive: u32, negatives: &[u32]) {
    s.targets.clear();
    s.labels.clear();
    s.targets.push(positive);
    s.labels.push(true);
    for &n in negatives {
        s.targets.push(n);
        s.labels.push(false);
    }
}

/// CBOW step: the mean of the context words' vectors predicts `target`.
#[allow(clippy::too_many_arguments)]
pub(crate) fn cbow_step<F: Float, R: Rows<F>>(
    input: &R,
    output: &R,
    comps: &Components,
    context: &[u32],
    target: u32,
    negatives: &[u32],
    lr: F,
    s: &mut Scratch<F>,
) -> F {
    if context.is_empty() {
        return F::zero();
    }
    for h in s.hidden.iter_mut() {
        *h = F::zero();
    }
    for &c in context {
        accumulate_word(input, comps, c, &mut s.row, &mut s.hidden);
    }
    let inv = F::one() / F::from(context.len()).unwrap();
    for h in s.hidden.iter_mut() {
        *h = *h * inv;
    }
    set_targets(s, target, negatives);
    let loss = score_targets(output, s, lr);
    let step = std::mem::take(&mut s.step);
    for &c in context {
        distribute(input, comps, c, &step, inv, &mut s.row);
    }
    s.step = step;
    loss
}

/// Skip-gram step: `center`'s vector predicts the context word `target`.
#[allow(clippy::too_many_arguments)]
pub(crate) fn skipgram_step<F: Float, R: Rows<F>>(
    input: &R,
    output: &R,
    comps: &Components,
    center: u32,
    target: u32,
    negatives: &[u32],
    lr: F,
    s: &mut Scratch<F>,
) -> F {
    for h in s.hidden.iter_mut() {
        *h = F::zero();
    }
    accumulate_word(input, comps, center, &mut s.row, &mut s.hidden);
    set_targets(s, target, negatives);
    let loss = score_targets(output, s, lr);
    let step = std::mem::take(&mut s.step);
    distribute(input, comps, center, &step, F::one(), &mut s.row);
    s.step = step;
    loss
}

/// Noise distribution proportional to `count^0.75`.
pub(crate) struct NoiseTable {
    cumulative: Vec<f64>,
}

impl NoiseTable {
    pub(crate) fn new(counts: &[u64]) -> Self {
        let mut acc = 0.0;
        let cumulative = counts
            .iter()
            .map(|&c| {
                acc += (c as f64).powf(0.75);
                acc
            })
            .collect();
        Self { cumulative }
    }

    pub(crate) fn sample<R: Rng>(&self, rng: &mut R) -> u32 {
        let total = *self.cumulative.last().expect("non-empty vocabulary");
        let r = rng.random::<f64>() * total;
        let i = self.cumulative.partition_point(|&c| c <= r);
        i.min(self.cumulative.len() - 1) as u32
    }
}

#[derive(Debug, Clone, Copy)]
pub(crate) struct Settings {
    pub mode: Mode,
    pub dim: usize,
    pub window: usize,
    pub negatives: usize,
    pub epochs: usize,
    pub initial_lr: f32,
    pub min_lr: f32,
    pub subsample: f64,
    pub seed: u64,
    pub workers: usize,
}

pub(crate) struct Trained {
    pub input: Vec<f32>,
    pub output: Vec<f32>,
    pub epoch_loss: Vec<f64>,
}

/// Uniform `[-0.5/dim, 0.5/dim)` initial input rows from a seeded stream.
pub(crate) fn init_input(rows: usize, dim: usize, seed: u64) -> Vec<f32> {
    let mut rng = ChaCha8Rng::seed_from_u64(substream_seed(seed, "init"));
    let scale = 1.0 / dim as f32;
    (0..rows * dim).map(|_| (rng.random::<f32>() - 0.5) * scale).collect()
}

/// Runs `settings.epochs` passes over `sentences` (vocabulary ids).
///
/// With one worker the result depends only on the inputs and the seed. With
/// more, workers update shared rows without locks and the result is not
/// reproducible.
pub(crate) fn train(
    sentences: &[Vec<u32>],
    counts: &[u64],
    comps: &Components,
    input: Vec<f32>,
    settings: &Settings,
) -> Trained {
    let dim = settings.dim;
    let vocab = counts.len();
    let input = SharedMatrix::from_vec(input, dim);
    let output = SharedMatrix::from_vec(vec![0.0; vocab * dim], dim);
    let noise = NoiseTable::new(counts);

    let total_words: u64 = counts.iter().sum();
    let keep_prob: Vec<f64> = counts
        .iter()
        .map(|&c| {
            if settings.subsample <= 0.0 {
                return 1.0;
            }
            let t = settings.subsample * total_words as f64;
            ((c as f64 / t).sqrt() + 1.0) * t / c as f64
        })
        .collect();

    let corpus_words: u64 = sentences.iter().map(|s| s.len() as u64).sum();
    let budget = (corpus_words * settings.epochs as u64).max(1);
    let progress = AtomicU64::new(0);

    let workers = settings.workers.max(1).min(sentences.len().max(1));
    let chunks = split_by_tokens(sentences, workers);

    let run_worker = |worker: usize, chunk: &[Vec<u32>]| -> Vec<f64> {
        let mut rng = ChaCha8Rng::seed_from_u64(substream_seed(settings.seed, &format!("worker{worker}")));
        let mut scratch = Scratch::<f32>::new(dim);
        let mut kept = Vec::new();
        let mut ctx = Vec::new();
        let mut negs = Vec::with_capacity(settings.negatives);
        let mut losses = vec![0.0f64; settings.epochs];
        for loss in losses.iter_mut() {
            for sentence in chunk {
                let done = progress.load(Ordering::Relaxed);
                let frac = (done as f64 / budget as f64).min(1.0) as f32;
                let lr = (settings.initial_lr - (settings.initial_lr - settings.min_lr) * frac).max(settings.min_lr);

                kept.clear();
                for &w in sentence {
                    let p = keep_prob[w as usize];
                    if p >= 1.0 || rng.random::<f64>() < p {
                        kept.push(w);
                    }
                }
                for pos in 0..kept.len() {
                    let reach = settings.window - rng.random_range(0..settings.window);
                    let lo = pos.saturating_sub(reach);
                    let hi = (pos + reach).min(kept.len() - 1);
                    let word = kept[pos];
                    match settings.mode {
                        Mode::Cbow => {
                            ctx.clear();
                            ctx.extend((lo..=hi).filter(|&i| i != pos).map(|i| kept[i]));
                            draw_negatives(&noise, &mut rng, word, settings.negatives, &mut negs);
                            *loss += f64::from(cbow_step(&input, &output, comps, &ctx, word, &negs, lr, &mut scratch));
                        }
                        Mode::Skipgram => {
                            for i in (lo..=hi).filter(|&i| i != pos) {
                                let target = kept[i];
                                draw_negatives(&noise, &mut rng, target, settings.negatives, &mut negs);
                                *loss += f64::from(skipgram_step(
                                    &input,
                                    &output,
                                    comps,
                                    word,
                                    target,
                                    &negs,
                                    lr,
                                    &mut scratch,
                                ));
                            }
                        }
                    }
                }
                progress.fetch_add(sentence.len() as u64, Ordering::Relaxed);
            }
        }
        losses
    };

    let per_worker: Vec<Vec<f64>> = if workers == 1 {
        vec![run_worker(0, sentences)]
    } else {
        std::thread::scope(|scope| {
            let handles: Vec<_> = chunks
                .iter()
                .enumerate()
                .map(|(w, chunk)| {
                    let run = &run_worker;
                    scope.spawn(move || run(w, chunk))
                })
                .collect();
            handles.into_iter().map(|h| h.join().expect("training worker panicked")).collect()
        })
    };

    let mut epoch_loss = vec![0.0; settings.epochs];
    for losses in per_worker {
        for (acc, l) in epoch_loss.iter_mut().zip(losses) {
            *acc += l;
        }
    }
    Trained { input: input.into_vec(), output: output.into_vec(), epoch_loss }
}

/// Draws noise words, skipping any that equal the observed word.
fn draw_negatives<R: Rng>(noise: &NoiseTable, rng: &mut R, observed: u32, k: usize, out: &mut Vec<u32>) {
    out.clear();
    for _ in 0..k {
        let n = noise.sample(rng);
        if n != observed {
            out.push(n);
        }
    }
}

fn split_by_tokens(sentences: &[Vec<u32>], parts: usize) -> Vec<&[Vec<u32>]> {
    if parts <= 1 {
        return vec![sentences];
    }
    let total: usize = sentences.iter().map(Vec::len).sum();
    let target = total.div_ceil(parts).max(1);
    let mut out = Vec::with_capacity(parts);
    let mut start = 0;
    let mut acc = 0;
    for (i, s) in sentences.iter().enumerate() {
        acc += s.len();
        if acc >= target && out.len() + 1 < parts {
            out.push(&sentences[start..=i]);
            start = i + 1;
            acc = 0;
        }
    }
    if start < sentences.len() {
        out.push(&sentences[start..]);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn noise_table_follows_powered_counts() {
        let table = NoiseTable::new(&[1, 0, 16]);
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let mut hits = [0usize; 3];
        for _ in 0..90_000 {
            hits[table.sample(&mut rng) as usize] += 1;
        }
        assert_eq!(hits[1], 0);
        // 16^0.75 = 8, so word 2 is drawn 8 times as often as word 0.
        let ratio = hits[2] as f64 / hits[0] as f64;
        assert!((ratio - 8.0).abs() < 0.5, "ratio {ratio}");
    }

    #[test]
    fn token_split_covers_everything_once() {
        let sentences: Vec<Vec<u32>> = (0..10).map(|i| vec![0; i + 1]).collect();
        for parts in 1..=12 {
            let chunks = split_by_tokens(&sentences, parts);
            assert!(chunks.len() <= parts);
            let n: usize = chunks.iter().map(|c| c.len()).sum();
            assert_eq!(n, sentences.len());
        }
    }

    #[test]
    fn components_flatten() {
        let c = Components::from_lists(&[vec![0, 5], vec![], vec![1]]);
        assert_eq!(c.of(0), [0, 5]);
        assert!(c.of(1).is_empty());
        assert_eq!(c.of(2), [1]);
        assert_eq!(Components::identity(3).of(2), [2]);
    }
}
