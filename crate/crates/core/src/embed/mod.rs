//! Word embeddings trained with negative sampling, per-state keyword
//! comparison and nearest-neighbor tables.

mod gradcheck;
mod neighbors;
mod sgns;
mod space;
mod states;
pub(crate) mod train;

pub use gradcheck::CheckModel;
pub use neighbors::nearest_neighbors;
pub use sgns::ns_update;
pub use space::{train_embeddings, EmbeddingSpace, TrainParams, Vocabulary, WordVectors};
pub(crate) use states::fixed;
pub use states::{
    replicate_matrix, shared_space_matrix, state_tag, tag_keyword, train_per_state, StateKeywordMatrix, TAG_SEPARATOR,
};
pub use train::Mode;

#[derive(Debug, thiserror::Error)]
pub enum EmbedError {
    #[error("no word reaches the minimum count")]
    EmptyVocabulary,
    #[error("invalid training parameters: {0}")]
    InvalidParams(String),
    #[error("cosine of a zero vector is undefined")]
    ZeroVector,
    #[error("vector dimensions differ ({left} vs {right})")]
    DimensionMismatch { left: usize, right: usize },
    #[error("at least two states are needed for comparison, {found} survived")]
    TooFewStates { found: usize },
    #[error("malformed vector file: {0}")]
    BadVectorFile(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Cosine similarity, computed in `f64` and clamped to `[-1, 1]`.
pub fn cosine<T: Copy + Into<f64>>(u: &[T], v: &[T]) -> Result<f64, EmbedError> {
    if u.len() != v.len() {
        return Err(EmbedError::DimensionMismatch { left: u.len(), right: v.len() });
    }
    let (mut uv, mut uu, mut vv) = (0.0f64, 0.0f64, 0.0f64);
    for (&a, &b) in u.iter().zip(v) {
        let (a, b) = (a.into(), b.into());
        uv += a * b;
        uu += a * a;
        vv += b * b;
    }
    if uu == 0.0 || vv == 0.0 {
        return Err(EmbedError::ZeroVector);
    }
    Ok((uv / (uu.sqrt() * vv.sqrt())).clamp(-1.0, 1.0))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cosine_reference_values() {
        assert!((cosine(&[0.3f64, -2.0, 5.5], &[0.3, -2.0, 5.5]).unwrap() - 1.0).abs() < 1e-12);
        assert_eq!(cosine(&[1.0f64, 0.0], &[0.0, 1.0]).unwrap(), 0.0);
        assert!((cosine(&[1.0f64, 0.0], &[1.0, 1.0]).unwrap() - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-15);
        assert!((cosine(&[1.0f64, 2.0], &[-1.0, -2.0]).unwrap() + 1.0).abs() < 1e-12);
    }

    #[test]
    fn cosine_errors() {
        assert!(matches!(cosine(&[0.0f32, 0.0], &[1.0, 0.0]), Err(EmbedError::ZeroVector)));
        assert!(matches!(cosine(&[1.0f32], &[1.0, 0.0]), Err(EmbedError::DimensionMismatch { left: 1, right: 2 })));
    }
}
