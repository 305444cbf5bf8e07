use std::cell::RefCell;

use super::train::{cbow_step, skipgram_step, Components, DenseRows, Scratch};

/// Double-precision copy of a model's parameters that runs the same update
/// code as training. Used to compare the applied step against numerical
/// gradients.
///
/// `components[w]` lists the input rows summed to form word `w`'s vector;
/// output rows are indexed by word.
#[derive(Debug, Clone)]
pub struct CheckModel {
    pub dim: usize,
    pub input: Vec<f64>,
    pub output: Vec<f64>,
    pub components: Vec<Vec<u32>>,
}

impl CheckModel {
    /// One CBOW step; returns the loss before the update.
    pub fn cbow_step(&mut self, context: &[u32], target: u32, negatives: &[u32], lr: f64) -> f64 {
        self.run(|input, output, comps, s| cbow_step(input, output, comps, context, target, negatives, lr, s))
    }

    /// One skip-gram step; returns the loss before the update.
    pub fn skipgram_step(&mut self, center: u32, target: u32, negatives: &[u32], lr: f64) -> f64 {
        self.run(|input, output, comps, s| skipgram_step(input, output, comps, center, target, negatives, lr, s))
    }

    fn run(&mut self, f: impl FnOnce(&DenseRows<f64>, &DenseRows<f64>, &Components, &mut Scratch<f64>) -> f64) -> f64 {
        let comps = Components::from_lists(&self.components);
        let input = DenseRows { dim: self.dim, data: RefCell::new(std::mem::take(&mut self.input)) };
        let output = DenseRows { dim: self.dim, data: RefCell::new(std::mem::take(&mut self.output)) };
        let mut scratch = Scratch::new(self.dim);
        let loss = f(&input, &output, &comps, &mut scratch);
        self.input = input.data.into_inner();
        self.output = output.data.into_inner();
        loss
    }
}
