//! Negative-sampling objective shared by CBOW, skip-gram and the subword model.
//!
//! For a hidden vector `h` and output rows `u_0` (the observed word) and
//! `u_1..u_k` (noise words), the loss is
//!
//! ```text
//! L = -ln σ(u_0·h) - Σ_k ln σ(-u_k·h)
//! ```
//!
//! [`ns_update`] performs one SGD step on that loss. It is generic over the
//! float type: training instantiates it with `f32`, the gradient check with
//! `f64`.

use num_traits::Float;

/// `ln(1 + e^x)` without overflow.
fn softplus<F: Float>(x: F) -> F {
    if x > F::zero() {
        x + (-x).exp().ln_1p()
    } else {
        x.exp().ln_1p()
    }
}

fn sigmoid<F: Float>(x: F) -> F {
    if x >= F::zero() {
        F::one() / (F::one() + (-x).exp())
    } else {
        let e = x.exp();
        e / (F::one() + e)
    }
}

pub(crate) fn dot<F: Float>(a: &[F], b: &[F]) -> F {
    a.iter().zip(b).fold(F::zero(), |acc, (&x, &y)| acc + x * y)
}

/// One SGD step of the negative-sampling loss.
///
/// `outputs` holds `labels.len()` gathered output rows of width
/// `hidden.len()`; they are updated in place. The matching step for the
/// hidden vector, `-lr · ∂L/∂h`, is added into `hidden_step` (the hidden
/// vector itself is left untouched). Returns the loss before the step.
pub fn ns_update<F: Float>(hidden: &[F], outputs: &mut [F], labels: &[bool], lr: F, hidden_step: &mut [F]) -> F {
    let dim = hidden.len();
    debug_assert_eq!(outputs.len(), dim * labels.len());
    debug_assert_eq!(hidden_step.len(), dim);
    let mut loss = F::zero();
    for (row, &label) in outputs.chunks_exact_mut(dim).zip(labels) {
        let f = dot(hidden, row);
        let (target, l) = if label { (F::one(), softplus(-f)) } else { (F::zero(), softplus(f)) };
        loss = loss + l;
        // (t - σ(f)) is -∂L/∂f.
        let g = (target - sigmoid(f)) * lr;
        for ((s, r), &h) in hidden_step.iter_mut().zip(row.iter_mut()).zip(hidden) {
            *s = *s + g * *r;
            *r = *r + g * h;
        }
    }
    loss
}
